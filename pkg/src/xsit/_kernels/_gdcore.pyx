# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled softmax-GD training loop; semantics match _numpy_ref."""

import numpy as np

from libc.math cimport exp, log


def train_softmax_gd(X, y, int n_classes, double lr, int epochs):
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.longlong)
    W = np.zeros((X.shape[1], n_classes), dtype=np.float64)
    losses = np.empty(epochs + 1, dtype=np.float64)
    _descend(X, y, W, losses, lr, epochs)
    return W, losses


cdef void _descend(double[:, ::1] X, long long[::1] y, double[:, ::1] W,
                   double[::1] losses, double lr, int epochs):
    cdef Py_ssize_t n = X.shape[0]
    cdef Py_ssize_t d = X.shape[1]
    cdef Py_ssize_t K = W.shape[1]
    delta_arr = np.empty((n, K), dtype=np.float64)
    grad_arr = np.empty((d, K), dtype=np.float64)
    cdef double[:, ::1] delta = delta_arr
    cdef double[:, ::1] grad = grad_arr
    cdef Py_ssize_t e, i, j, k
    cdef double rowmax, s, zt, xv, loss

    for e in range(epochs + 1):
        loss = 0.0
        for i in range(n):
            for k in range(K):
                delta[i, k] = 0.0
            for j in range(d):
                xv = X[i, j]
                if xv != 0.0:  # exact no-op terms skipped; one-hot blocks are mostly zero
                    for k in range(K):
                        delta[i, k] += xv * W[j, k]
            rowmax = delta[i, 0]
            for k in range(1, K):
                if delta[i, k] > rowmax:
                    rowmax = delta[i, k]
            zt = delta[i, y[i]] - rowmax
            s = 0.0
            for k in range(K):
                delta[i, k] = exp(delta[i, k] - rowmax)
                s += delta[i, k]
            loss += log(s) - zt
            for k in range(K):
                delta[i, k] /= s
            delta[i, y[i]] -= 1.0
        losses[e] = loss / n
        if e == epochs:
            break
        for j in range(d):
            for k in range(K):
                grad[j, k] = 0.0
        for i in range(n):
            for j in range(d):
                xv = X[i, j]
                if xv != 0.0:
                    for k in range(K):
                        grad[j, k] += xv * delta[i, k]
        for j in range(d):
            for k in range(K):
                W[j, k] -= lr * (grad[j, k] / n)
