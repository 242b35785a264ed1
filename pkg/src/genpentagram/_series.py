"""Truncated Taylor-series arithmetic on numpy arrays.

A series is an array whose leading axis indexes powers of t; trailing axes
hold vector or matrix coefficients. All operations truncate to the length of
their inputs.
"""

from itertools import permutations
from math import comb

import numpy as np


def mul(a, b):
    """Product of two scalar series (1-d arrays), truncated."""
    n = min(len(a), len(b))
    return np.convolve(a[:n], b[:n])[:n]


def power(a, p):
    """Real power a(t)**p of a scalar series with a[0] > 0 (J.C.P. Miller recurrence)."""
    n = len(a)
    out = np.zeros(n)
    out[0] = a[0] ** p
    for k in range(1, n):
        j = np.arange(1, k + 1)
        out[k] = np.dot(((p + 1) * j - k) * a[j], out[k - j]) / (k * a[0])
    return out


def det(mat):
    """Determinant of a square matrix of scalar series, shape (K, n, n).

    Leibniz expansion; intended for n <= 6.
    """
    K, n, _ = mat.shape
    total = np.zeros(K)
    for perm in permutations(range(n)):
        sign = _perm_sign(perm)
        term = mat[:, 0, perm[0]].copy()
        for i in range(1, n):
            term = mul(term, mat[:, i, perm[i]])
        total += sign * term
    return total


def _perm_sign(perm):
    sign = 1
    seen = list(perm)
    for i in range(len(seen)):
        while seen[i] != i:
            j = seen[i]
            seen[i], seen[j] = seen[j], seen[i]
            sign = -sign
    return sign


def matvec(mat, vec):
    """Series product of a matrix series (K, r, c) and a vector series (K, c)."""
    K = min(len(mat), len(vec))
    out = np.zeros((K,) + mat.shape[1:2])
    for k in range(K):
        for j in range(k + 1):
            out[k] += mat[j] @ vec[k - j]
    return out


def solve(mat, rhs):
    """Solve mat(t) x(t) = rhs(t) order by order; mat[0] must be invertible."""
    K = len(rhs)
    lu = np.linalg.inv(mat[0])
    x = np.zeros_like(rhs, dtype=float)
    for k in range(K):
        acc = rhs[k].copy()
        for j in range(1, min(k, len(mat) - 1) + 1):
            acc -= mat[j] @ x[k - j]
        x[k] = lu @ acc
    return x


def derivatives(coeffs):
    """Convert Taylor coefficients c_j into derivatives j! * c_j (leading axis)."""
    fact = np.cumprod(np.r_[1.0, np.arange(1, len(coeffs))])
    return coeffs * fact.reshape((-1,) + (1,) * (coeffs.ndim - 1))


def shift(coeffs, h, order):
    """Taylor coefficients at x+h of the polynomial sum_j coeffs[j] t^j, up to `order`."""
    K = len(coeffs)
    out = np.zeros((order + 1,) + coeffs.shape[1:])
    hp = h ** np.arange(K)
    for p in range(order + 1):
        j = np.arange(p, K)
        w = np.array([float(comb(int(jj), p)) for jj in j]) * hp[j - p]
        out[p] = np.tensordot(w, coeffs[p:], axes=(0, 0))
    return out

