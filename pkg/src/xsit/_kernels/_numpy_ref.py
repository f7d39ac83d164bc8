"""Numpy reference implementation of the softmax-GD training kernel."""

from __future__ import annotations

import numpy as np


def loss_and_grad(W: np.ndarray, X: np.ndarray, y: np.ndarray, n_classes: int):
    """Mean softmax cross-entropy loss and its gradient in W."""
    n = X.shape[0]
    logits = X @ W
    shift = logits - logits.max(axis=1, keepdims=True)
    expz = np.exp(shift)
    z = expz.sum(axis=1)
    loss = float(np.mean(np.log(z) - shift[np.arange(n), y]))
    delta = expz / z[:, None]
    delta[np.arange(n), y] -= 1.0
    grad = X.T @ delta / n
    return loss, grad


def train_softmax_gd(X: np.ndarray, y: np.ndarray, n_classes: int, lr: float, epochs: int):
    """Full-batch gradient descent from zero-initialized weights.

    Returns (W, losses); losses[e] is the loss before update e, with the
    final entry evaluated at the returned weights.
    """
    W = np.zeros((X.shape[1], n_classes))
    losses = np.empty(epochs + 1)
    for e in range(epochs):
        loss, grad = loss_and_grad(W, X, y, n_classes)
        losses[e] = loss
        W -= lr * grad
    losses[epochs] = loss_and_grad(W, X, y, n_classes)[0]
    return W, losses
