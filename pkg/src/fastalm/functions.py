"""Objective building blocks.

Each block objective is a sum ``f_i = g_i + h_i`` of a smooth term with
Lipschitz gradient and a nonsmooth term with a cheap proximal map

    prox_{tau h}(a) = argmin_x  h(x) + 1/(2 tau) ||x - a||_F^2 .

The shrinkage kernels live at module level; the classes wrap them with
weights and values so solvers can treat all terms uniformly.
"""

from __future__ import annotations

import numpy as np

from . import linops


def soft_threshold(a, t):
    """Entrywise shrinkage sign(a) * max(|a| - t, 0)."""
    return np.sign(a) * np.maximum(np.abs(a) - t, 0.0)


def singular_value_threshold(a, t):
    """Shrink the singular values of ``a`` by ``t`` (exact thin SVD)."""
    u, s, vt = np.linalg.svd(np.asarray(a, dtype=float), full_matrices=False)
    return (u * np.maximum(s - t, 0.0)) @ vt


def column_shrink(a, t):
    """Scale each column toward zero: col * max(0, 1 - t/||col||).

    Columns with norm <= t (including all-zero columns) map to zero.
    """
    a = np.asarray(a, dtype=float)
    norms = np.linalg.norm(a, axis=0)
    scale = np.zeros_like(norms)
    keep = norms > t
    scale[keep] = 1.0 - t / norms[keep]
    return a * scale


def _check_tau(tau):
    tau = float(tau)
    if not tau > 0:
        raise ValueError(f"prox step tau must be positive, got {tau}")
    return tau


def _check_weight(weight):
    weight = float(weight)
    if weight < 0:
        raise ValueError(f"weight must be nonnegative, got {weight}")
    return weight


class SmoothFn:
    """Differentiable term with a known gradient Lipschitz constant."""

    @property
    def lipschitz(self):
        raise NotImplementedError

    def value(self, x):
        raise NotImplementedError

    def grad(self, x):
        raise NotImplementedError


class Quadratic(SmoothFn):
    """g(X) = alpha/2 * ||C X - D||_F^2.

    Parameters
    ----------
    c_mat : (m, n) array
    d_mat : (m, p) array
        Fixes the argument shape to (n, p).
    alpha : float
        Positive scale.

    The gradient is ``alpha * C^T (C X - D)`` and its Lipschitz constant
    ``alpha * ||C||^2`` is estimated once by power iteration and cached.
    """

    def __init__(self, c_mat, d_mat, alpha=1.0):
        self.c_mat = np.asarray(c_mat, dtype=float)
        self.d_mat = np.asarray(d_mat, dtype=float)
        if self.c_mat.ndim != 2 or self.d_mat.ndim != 2:
            raise ValueError("Quadratic expects 2-D C and D")
        if self.c_mat.shape[0] != self.d_mat.shape[0]:
            raise ValueError(
                f"C has {self.c_mat.shape[0]} rows but D has "
                f"{self.d_mat.shape[0]}"
            )
        self.alpha = float(alpha)
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {alpha}")
        self._lipschitz = None

    @property
    def lipschitz(self):
        if self._lipschitz is None:
            self._lipschitz = self.alpha * linops.op_norm_sq(
                linops.DenseMatrix(self.c_mat)
            )
        return self._lipschitz

    def value(self, x):
        r = self.c_mat @ x - self.d_mat
        return 0.5 * self.alpha * float(np.sum(r * r))

    def grad(self, x):
        return self.alpha * (self.c_mat.T @ (self.c_mat @ x - self.d_mat))


class ZeroSmooth(SmoothFn):
    """The identically-zero smooth term."""

    @property
    def lipschitz(self):
        return 0.0

    def value(self, x):
        return 0.0

    def grad(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))


class ProxFn:
    """Nonsmooth term with an exact proximal map."""

    def value(self, x):
        raise NotImplementedError

    def prox(self, a, tau):
        raise NotImplementedError


class L1(ProxFn):
    """weight * sum |x_ij|; prox is entrywise soft thresholding."""

    def __init__(self, weight=1.0):
        self.weight = _check_weight(weight)

    def value(self, x):
        return self.weight * float(np.abs(x).sum())

    def prox(self, a, tau):
        return soft_threshold(np.asarray(a, dtype=float), _check_tau(tau) * self.weight)


class NuclearNorm(ProxFn):
    """weight * sum of singular values; prox shrinks the spectrum."""

    def __init__(self, weight=1.0):
        self.weight = _check_weight(weight)

    def value(self, x):
        return self.weight * float(np.linalg.svd(x, compute_uv=False).sum())

    def prox(self, a, tau):
        return singular_value_threshold(a, _check_tau(tau) * self.weight)


class L21(ProxFn):
    """weight * sum of column Euclidean norms; prox shrinks columns."""

    def __init__(self, weight=1.0):
        self.weight = _check_weight(weight)

    def value(self, x):
        return self.weight * float(np.linalg.norm(x, axis=0).sum())

    def prox(self, a, tau):
        return column_shrink(a, _check_tau(tau) * self.weight)


class ZeroProx(ProxFn):
    """The identically-zero nonsmooth term; prox is the identity."""

    def value(self, x):
        return 0.0

    def prox(self, a, tau):
        _check_tau(tau)
        return np.asarray(a, dtype=float).copy()
