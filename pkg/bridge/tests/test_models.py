"""Classifier behavior on controlled problems."""

from __future__ import annotations

import numpy as np
import pytest

from trainer_bridge.models import (
    fit_nearest_centroid,
    predict_linear,
    predict_nearest_centroid,
    train_linear,
)


def separable_problem(n_per_class=10, n_obj=6, k=3, seed=0):
    """Noise-free world features: one-hot object + exact action prototype."""
    rng = np.random.default_rng(seed)
    rows, ys = [], []
    for cls in range(k):
        for _ in range(n_per_class):
            vec = np.zeros(n_obj + k)
            vec[rng.integers(0, n_obj)] = 1.0
            vec[n_obj + cls] = 1.0
            rows.append(vec)
            ys.append(cls)
    return np.array(rows), np.array(ys)


def test_nearest_centroid_perfect_on_separable_features():
    X, y = separable_problem()
    centroids = fit_nearest_centroid(X, y, 3)
    assert np.array_equal(predict_nearest_centroid(centroids, X), y)


def test_nearest_centroid_rejects_empty_class():
    X, y = separable_problem(k=2)
    with pytest.raises(ValueError, match="class 2"):
        fit_nearest_centroid(X, y, 3)


def test_linear_perfect_on_separable_features():
    X, y = separable_problem()
    W = train_linear(X, y, 3, lr=0.5, epochs=300)
    assert np.array_equal(predict_linear(W, X), y)


def test_linear_zero_epochs_predicts_first_class():
    X, y = separable_problem()
    W = train_linear(X, y, 3, epochs=0)
    assert np.all(predict_linear(W, X) == 0)


def test_linear_divergence_detected():
    X, y = separable_problem()
    with np.errstate(all="ignore"), pytest.raises(FloatingPointError):
        train_linear(X * 1e160, y, 3, lr=1e10, epochs=5)
