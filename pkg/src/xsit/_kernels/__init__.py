"""Training kernel dispatch: compiled extension when available, numpy otherwise.

Set ``XSIT_PURE_PYTHON=1`` to force the numpy implementation. Results are
deterministic within a backend; the two backends agree to floating-point
rounding (see benchmarks/bench_gd.py for a timing and parity comparison).
"""

from __future__ import annotations

import os

import numpy as np

from . import _numpy_ref
from ._numpy_ref import loss_and_grad

if os.environ.get("XSIT_PURE_PYTHON"):
    _impl = _numpy_ref
    BACKEND = "numpy"
else:
    try:
        from . import _gdcore as _impl
        BACKEND = "compiled"
    except ImportError:
        _impl = _numpy_ref
        BACKEND = "numpy"


def backend() -> str:
    """Name of the active implementation: 'compiled' or 'numpy'."""
    return BACKEND


def train_softmax_gd(X, y, n_classes: int, lr: float, epochs: int):
    """Train a zero-initialized multinomial linear classifier.

    Full-batch gradient descent on the mean softmax cross-entropy loss.
    Returns (weights of shape (n_features, n_classes), per-epoch losses of
    length epochs + 1). Raises FloatingPointError if the loss diverges.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.int64)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
        raise ValueError("X must be (n, d) and y must be (n,)")
    if X.shape[0] == 0:
        raise ValueError("training set is empty")
    if n_classes < 1 or y.min() < 0 or y.max() >= n_classes:
        raise ValueError("labels must lie in [0, n_classes)")
    if epochs < 0:
        raise ValueError("epochs must be nonnegative")
    W, losses = _impl.train_softmax_gd(X, y, int(n_classes), float(lr), int(epochs))
    if not np.isfinite(losses).all():
        raise FloatingPointError(
            "training loss is not finite; the learning rate is too large"
        )
    return W, losses


__all__ = ["BACKEND", "backend", "loss_and_grad", "train_softmax_gd"]
