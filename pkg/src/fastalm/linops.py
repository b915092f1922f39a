"""Bounded linear maps used to express coupling constraints.

Every map sends a dense 2-D array of a fixed ``input_shape`` to a dense 2-D
array of a fixed ``output_shape``; vectors travel as single-column matrices.
Each map knows its adjoint, so the pair satisfies

    <A(x), y> = <x, A.adjoint(y)>

for all conforming ``x``, ``y`` (Frobenius inner product).  The squared
operator norm ``||A||^2`` (largest eigenvalue of ``A* A``) is estimated by a
deterministic power iteration and cached on first use; it feeds step sizes
and the eta constants of the parallel-splitting solvers.

Matrices are read and written in MatrixMarket array format (real, general)
via :func:`load_matrix` / :func:`save_matrix`; in memory they are plain
row-major ``float64`` arrays.
"""

from __future__ import annotations

import warnings

import numpy as np
import scipy.io

from .errors import DimensionError

# Fixed seed for the power-iteration start vector.  One library-level
# constant keeps norm estimates reproducible across processes.
_POWER_SEED = 91452


def _as_matrix(a):
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise DimensionError(f"expected a 2-D array, got ndim={a.ndim}")
    return a


class LinearMap:
    """Base class: a bounded linear map between fixed matrix shapes."""

    def __init__(self, input_shape, output_shape):
        self.input_shape = (int(input_shape[0]), int(input_shape[1]))
        self.output_shape = (int(output_shape[0]), int(output_shape[1]))
        self._norm_sq = None

    def apply(self, x):
        """Evaluate ``A(x)``. ``x`` must have shape ``input_shape``."""
        raise NotImplementedError

    def adjoint(self, y):
        """Evaluate ``A*(y)``. ``y`` must have shape ``output_shape``."""
        raise NotImplementedError

    def __call__(self, x):
        return self.apply(x)

    def norm_sq(self, tol=1e-10, max_iter=1000):
        """Squared operator norm, cached after the first power iteration."""
        if self._norm_sq is None:
            self._norm_sq = op_norm_sq(self, tol=tol, max_iter=max_iter)
        return self._norm_sq

    def _check_input(self, x):
        x = _as_matrix(x)
        if x.shape != self.input_shape:
            raise DimensionError(
                f"{type(self).__name__}: expected input of shape "
                f"{self.input_shape}, got {x.shape}"
            )
        return x

    def _check_output(self, y):
        y = _as_matrix(y)
        if y.shape != self.output_shape:
            raise DimensionError(
                f"{type(self).__name__}: expected adjoint input of shape "
                f"{self.output_shape}, got {y.shape}"
            )
        return y


class LeftMultiply(LinearMap):
    """X -> M X for a fixed dense matrix ``M``.

    Parameters
    ----------
    mat : (m, n) array
        The multiplying matrix.
    input_cols : int
        Number of columns of the argument, so the map sends
        ``(n, input_cols)`` to ``(m, input_cols)``.
    """

    def __init__(self, mat, input_cols):
        mat = _as_matrix(mat)
        super().__init__((mat.shape[1], input_cols), (mat.shape[0], input_cols))
        self.mat = mat

    def apply(self, x):
        return self.mat @ self._check_input(x)

    def adjoint(self, y):
        return self.mat.T @ self._check_output(y)


class DenseMatrix(LeftMultiply):
    """x -> M x on single-column vectors."""

    def __init__(self, mat):
        super().__init__(mat, 1)


class RowSum(LinearMap):
    """X -> 1^T X, the row vector of column sums."""

    def __init__(self, input_shape):
        super().__init__(input_shape, (1, input_shape[1]))

    def apply(self, x):
        return self._check_input(x).sum(axis=0, keepdims=True)

    def adjoint(self, y):
        return np.repeat(self._check_output(y), self.input_shape[0], axis=0)


class Identity(LinearMap):
    def __init__(self, shape):
        super().__init__(shape, shape)

    def apply(self, x):
        return self._check_input(x).copy()

    def adjoint(self, y):
        return self._check_output(y).copy()


class Scale(LinearMap):
    """X -> c X for a real scalar ``c``."""

    def __init__(self, c, shape):
        super().__init__(shape, shape)
        self.c = float(c)

    def apply(self, x):
        return self.c * self._check_input(x)

    def adjoint(self, y):
        return self.c * self._check_output(y)


class Negation(Scale):
    def __init__(self, shape):
        super().__init__(-1.0, shape)


class Zero(LinearMap):
    """The zero map between two fixed shapes."""

    def __init__(self, input_shape, output_shape):
        super().__init__(input_shape, output_shape)

    def apply(self, x):
        self._check_input(x)
        return np.zeros(self.output_shape)

    def adjoint(self, y):
        self._check_output(y)
        return np.zeros(self.input_shape)


class VStack(LinearMap):
    """Vertical stack of maps sharing one input: x -> [A_1(x); ...; A_p(x)].

    All components must agree on ``input_shape`` and on the number of output
    columns; the stacked output has the summed row count.  The adjoint splits
    its argument into the component row bands and sums the component adjoints.
    """

    def __init__(self, maps):
        maps = list(maps)
        if not maps:
            raise ValueError("VStack needs at least one component map")
        in_shape = maps[0].input_shape
        cols = maps[0].output_shape[1]
        for m in maps[1:]:
            if m.input_shape != in_shape:
                raise DimensionError(
                    f"VStack components disagree on input shape: "
                    f"{in_shape} vs {m.input_shape}"
                )
            if m.output_shape[1] != cols:
                raise DimensionError(
                    f"VStack components disagree on output columns: "
                    f"{cols} vs {m.output_shape[1]}"
                )
        rows = sum(m.output_shape[0] for m in maps)
        super().__init__(in_shape, (rows, cols))
        self.maps = maps
        self._offsets = np.cumsum([0] + [m.output_shape[0] for m in maps])

    def apply(self, x):
        x = self._check_input(x)
        return np.vstack([m.apply(x) for m in self.maps])

    def adjoint(self, y):
        y = self._check_output(y)
        out = np.zeros(self.input_shape)
        for m, lo, hi in zip(self.maps, self._offsets[:-1], self._offsets[1:]):
            out += m.adjoint(y[lo:hi])
        return out


def op_norm_sq(op, tol=1e-10, max_iter=1000):
    """Largest eigenvalue of ``A* A`` by power iteration.

    The start vector is drawn from a fixed library seed, so repeated calls
    give identical estimates.  Convergence is declared when the Rayleigh
    quotient changes by at most ``tol`` relatively between sweeps; hitting
    ``max_iter`` first returns the last estimate and emits a RuntimeWarning.

    Parameters
    ----------
    op : LinearMap
    tol : float
        Relative change threshold on the eigenvalue estimate.
    max_iter : int
        Maximum number of A*A applications.

    Returns
    -------
    float
        Estimate of ``||A||^2`` (0.0 for the zero map).
    """
    rng = np.random.default_rng(_POWER_SEED)
    v = rng.standard_normal(op.input_shape)
    v /= np.linalg.norm(v)
    est = 0.0
    for _ in range(max_iter):
        w = op.adjoint(op.apply(v))
        # Rayleigh quotient of A*A at the unit vector v.
        new_est = float(np.sum(v * w))
        norm_w = np.linalg.norm(w)
        if norm_w == 0.0:
            return 0.0
        v = w / norm_w
        if abs(new_est - est) <= tol * max(1.0, abs(new_est)):
            return new_est
        est = new_est
    warnings.warn(
        f"power iteration did not reach tol={tol:g} in {max_iter} sweeps; "
        f"returning the last estimate",
        RuntimeWarning,
    )
    return est


def save_matrix(path, mat):
    """Write a dense matrix as MatrixMarket array (real, general).

    The precision is pinned so regenerating the same matrix reproduces the
    file byte for byte.
    """
    scipy.io.mmwrite(str(path), _as_matrix(mat), field="real", symmetry="general", precision=17)


def load_matrix(path):
    """Read a MatrixMarket file into a row-major float64 array."""
    mat = scipy.io.mmread(str(path))
    if not isinstance(mat, np.ndarray):  # sparse input: densify
        mat = mat.toarray()
    return np.ascontiguousarray(np.asarray(mat, dtype=float))
