"""Lightweight classifiers standing in for real video trainers."""

from __future__ import annotations

import numpy as np


def train_linear(X: np.ndarray, y: np.ndarray, n_classes: int,
                 lr: float = 0.5, epochs: int = 10000) -> np.ndarray:
    """Multinomial linear classifier: zero init, full-batch GD on mean
    softmax cross-entropy. Mirrors the harness's in-process learner so the
    two agree under identical hyperparameters."""
    n, d = X.shape
    W = np.zeros((d, n_classes))
    onehot = np.zeros((n, n_classes))
    onehot[np.arange(n), y] = 1.0
    for _ in range(epochs):
        logits = X @ W
        logits -= logits.max(axis=1, keepdims=True)
        p = np.exp(logits)
        p /= p.sum(axis=1, keepdims=True)
        if not np.isfinite(p).all():
            raise FloatingPointError("training diverged; lower the learning rate")
        W -= lr * (X.T @ (p - onehot)) / n
    return W


def predict_linear(W: np.ndarray, X: np.ndarray) -> np.ndarray:
    return np.argmax(X @ W, axis=1)  # first maximum: lowest class index


def fit_nearest_centroid(X: np.ndarray, y: np.ndarray, n_classes: int) -> np.ndarray:
    centroids = np.zeros((n_classes, X.shape[1]))
    for k in range(n_classes):
        members = X[y == k]
        if len(members) == 0:
            raise ValueError(f"class {k} has no training rows")
        centroids[k] = members.mean(axis=0)
    return centroids


def predict_nearest_centroid(centroids: np.ndarray, X: np.ndarray) -> np.ndarray:
    # squared euclidean distance; first minimum wins ties
    d2 = ((X[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    return np.argmin(d2, axis=1)
