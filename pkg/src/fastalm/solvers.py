"""Augmented-Lagrangian solvers for linearly constrained separable programs.

Problems have the form

    min_x  sum_i g_i(x_i) + h_i(x_i)    s.t.    sum_i A_i(x_i) = b

with each ``g_i`` smooth (gradient Lipschitz constant ``L_i``), each ``h_i``
prox-friendly, and each ``A_i`` a bounded linear map.  Four solvers share the
same calling convention and trace format:

``palm_run``
    Proximal augmented-Lagrangian method: one prox-linearized primal step per
    iteration with a constant penalty, then a dual ascent step.  O(1/K).
``fast_palm_run``
    Accelerated variant: interpolated iterates driven by the theta schedule,
    penalty growing like 1/theta, and an inner FISTA solve for the
    z-subproblem.  Improves the smooth and penalty terms to O(1/K^2).
``pl_admm_ps_run``
    Proximal linearized ADMM with parallel splitting: every block takes one
    prox step per iteration (Jacobi style), then one dual step.
``fast_pl_admm_ps_run``
    Accelerated parallel splitting: same per-iteration cost, with the smooth
    part of the rate improved to O(1/K^2).

Multi-block input to the PALM family is merged into one superblock: the
nonsmooth term stays separable (blockwise prox) and the smooth Lipschitz
constant is ``max_i L_i``.  Solvers are deterministic, perform no I/O, and
abort with :class:`~fastalm.errors.NumericError` if an iterate goes
non-finite.  An optional ``trace_hook(record, state)`` sees every record as
it is produced and may fill in the ``conv_fn`` / ``bound`` fields; the state
holds live references, so hooks must copy anything they keep.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .blocks import BlockPoint
from .errors import DimensionError, NumericError
from .inner import Subproblem, fista_solve
from .schedule import theta_next


@dataclass
class Block:
    """One separable block: smooth term, prox term, constraint map."""

    smooth: object
    prox: object
    op: object


class BlockProblem:
    """A linearly constrained separable program.

    Parameters
    ----------
    blocks : sequence of Block
    target : ndarray
        Right-hand side ``b``; every block map must output its shape.

    Per-block gradient Lipschitz constants and squared operator norms are
    computed once here and cached.
    """

    def __init__(self, blocks, target):
        self.blocks = tuple(blocks)
        if not self.blocks:
            raise ValueError("a problem needs at least one block")
        self.target = np.asarray(target, dtype=float)
        if self.target.ndim != 2:
            raise DimensionError("target must be a 2-D matrix")
        for i, blk in enumerate(self.blocks):
            if blk.op.output_shape != self.target.shape:
                raise DimensionError(
                    f"block {i} maps to {blk.op.output_shape} but the "
                    f"target has shape {self.target.shape}"
                )
        self.norm_a_sq = tuple(float(blk.op.norm_sq()) for blk in self.blocks)
        self.block_lipschitz = tuple(float(blk.smooth.lipschitz) for blk in self.blocks)
        for i, lip in enumerate(self.block_lipschitz):
            if not (math.isfinite(lip) and lip >= 0):
                raise ValueError(f"block {i} has invalid Lipschitz constant {lip}")

    @property
    def n(self):
        return len(self.blocks)

    @property
    def input_shapes(self):
        return tuple(blk.op.input_shape for blk in self.blocks)

    @property
    def prox_fns(self):
        return tuple(blk.prox for blk in self.blocks)

    @property
    def ops(self):
        return tuple(blk.op for blk in self.blocks)

    @property
    def lipschitz_max(self):
        return max(self.block_lipschitz)

    @property
    def joint_norm_sq(self):
        """Upper bound on ||[A_1 ... A_n]||^2 (exact when n == 1)."""
        return float(sum(self.norm_a_sq))

    def zeros(self):
        return BlockPoint.zeros(self.input_shapes)

    def zeros_dual(self):
        return np.zeros_like(self.target)

    def _check_point(self, x):
        if not isinstance(x, BlockPoint):
            x = BlockPoint(x)
        if x.shapes != self.input_shapes:
            raise DimensionError(
                f"expected blocks of shapes {self.input_shapes}, got {x.shapes}"
            )
        return x

    def apply(self, x):
        """Constraint map sum_i A_i(x_i)."""
        x = self._check_point(x)
        out = self.blocks[0].op.apply(x[0])
        for blk, xi in zip(self.blocks[1:], x.blocks[1:]):
            out += blk.op.apply(xi)
        return out

    def adjoint(self, y):
        return BlockPoint([blk.op.adjoint(y) for blk in self.blocks])

    def smooth_grads(self, x):
        x = self._check_point(x)
        return BlockPoint(
            [blk.smooth.grad(xi) for blk, xi in zip(self.blocks, x.blocks)]
        )

    def objective(self, x):
        """f(x) = sum_i g_i(x_i) + h_i(x_i)."""
        x = self._check_point(x)
        return float(
            sum(
                blk.smooth.value(xi) + blk.prox.value(xi)
                for blk, xi in zip(self.blocks, x.blocks)
            )
        )

    def feasibility(self, x):
        """||A(x) - b||_F."""
        r = self.apply(x) - self.target
        return float(np.linalg.norm(r))


@dataclass
class SolverConfig:
    """Run-level knobs shared by all solvers.

    ``beta_fixed`` is the constant penalty of the plain methods and of the
    parallel-splitting family; the accelerated single-block solver overrides
    it with the 1/theta rule unless asked not to.  ``eta_slack`` scales the
    parallel-splitting proximal constants eta_i = eta_slack * n * ||A_i||^2
    and must exceed 1 for the method's convergence guarantee.
    """

    max_iters: int
    beta_fixed: float = 1.0
    eta_slack: float = 1.02
    inner_tol: float = 1e-9
    inner_max_iter: int = 2000
    trace_every: int = 1
    algorithm: Optional[str] = None

    def __post_init__(self):
        if self.max_iters < 0:
            raise ValueError(f"max_iters must be nonnegative, got {self.max_iters}")
        if not self.beta_fixed > 0:
            raise ValueError(f"beta_fixed must be positive, got {self.beta_fixed}")
        if not self.eta_slack > 1.0:
            raise ValueError(f"eta_slack must exceed 1, got {self.eta_slack}")
        if not self.inner_tol > 0:
            raise ValueError(f"inner_tol must be positive, got {self.inner_tol}")
        if self.inner_max_iter < 1:
            raise ValueError(
                f"inner_max_iter must be at least 1, got {self.inner_max_iter}"
            )
        if self.trace_every < 1:
            raise ValueError(f"trace_every must be at least 1, got {self.trace_every}")


@dataclass
class TraceRecord:
    """Diagnostics for one outer iteration (the post-update iterate x^{k+1}).

    ``conv_fn`` and ``bound`` stay NaN unless a trace hook fills them in;
    ``time_ms`` is the duration of the iteration on a monotonic clock and is
    machine-dependent.  ``z_from_init`` / ``lam_from_init`` record distances
    from the starting point (used for empirical diameter proxies) and
    ``max_block_norm`` the largest block norm (boundedness monitor).
    """

    k: int
    time_ms: float
    objective: float
    feas_norm: float
    conv_fn: float = math.nan
    bound: float = math.nan
    inner_converged: bool = True
    z_from_init: float = 0.0
    lam_from_init: float = 0.0
    max_block_norm: float = 0.0


@dataclass
class SolverState:
    """Live view of the iterates handed to trace hooks."""

    k: int
    x: BlockPoint
    z: BlockPoint
    y: Optional[BlockPoint]
    lam: np.ndarray
    theta: float
    beta: float


TraceHook = Callable[[TraceRecord, SolverState], None]


def eta_values(problem, eta_slack):
    """Parallel-splitting proximal constants eta_i = eta_slack * n * ||A_i||^2."""
    if not eta_slack > 1.0:
        raise ValueError(f"eta_slack must exceed 1, got {eta_slack}")
    n = problem.n
    return tuple(eta_slack * n * nsq for nsq in problem.norm_a_sq)


def _prep_init(problem, init, dual_init):
    if init is None:
        x = problem.zeros()
    else:
        x = problem._check_point(init).copy()
    if dual_init is None:
        lam = problem.zeros_dual()
    else:
        lam = np.asarray(dual_init, dtype=float).copy()
        if lam.shape != problem.target.shape:
            raise DimensionError(
                f"dual init has shape {lam.shape}, expected {problem.target.shape}"
            )
    return x, lam


def _record(trace, hook, problem, config, algorithm, *, k, tic, x, z, y, lam,
            theta, beta, inner_ok, z0, lam0, feas):
    """Finiteness check every iteration; full record on the trace cadence."""
    z_dist = z.dist(z0)
    lam_dist = float(np.linalg.norm(lam - lam0))
    max_norm = x.max_block_norm()
    if not (math.isfinite(feas) and math.isfinite(z_dist)
            and math.isfinite(lam_dist) and math.isfinite(max_norm)):
        raise NumericError(f"{algorithm}: non-finite iterate at iteration {k}")
    if k % config.trace_every and k != config.max_iters - 1:
        return
    obj = problem.objective(x)
    if not math.isfinite(obj):
        raise NumericError(f"{algorithm}: non-finite objective at iteration {k}")
    rec = TraceRecord(
        k=k,
        time_ms=(time.perf_counter() - tic) * 1e3,
        objective=obj,
        feas_norm=feas,
        inner_converged=inner_ok,
        z_from_init=z_dist,
        lam_from_init=lam_dist,
        max_block_norm=max_norm,
    )
    if hook is not None:
        hook(rec, SolverState(k=k, x=x, z=z, y=y, lam=lam, theta=theta, beta=beta))
    trace.append(rec)


def palm_run(problem, config, init=None, dual_init=None, trace_hook=None):
    """Plain proximal augmented-Lagrangian method (constant penalty).

    Multi-block problems are treated as one superblock.  Each iteration
    linearizes the smooth term at x^k and solves

        x^{k+1} = argmin_x <grad g(x^k), x> + h(x) + <lam^k, A(x)>
                  + beta/2 ||A(x) - b||^2 + L/2 ||x - x^k||^2

    with the inner FISTA loop, then takes the dual step
    lam^{k+1} = lam^k + beta (A(x^{k+1}) - b).

    Returns
    -------
    (BlockPoint, ndarray, list[TraceRecord])
        Final primal point, final multiplier, and the trace.
    """
    x, lam = _prep_init(problem, init, dual_init)
    z0, lam0 = x.copy(), lam.copy()
    beta = config.beta_fixed
    mu = problem.lipschitz_max
    ls = beta * problem.joint_norm_sq + mu
    trace = []
    for k in range(config.max_iters):
        tic = time.perf_counter()
        sub = Subproblem(
            lin=problem.smooth_grads(x),
            prox_fns=problem.prox_fns,
            ops=problem.ops,
            lam=lam,
            target=problem.target,
            beta=beta,
            mu=mu,
            center=x,
            smooth_lipschitz=ls,
        )
        x, inner_ok = fista_solve(
            sub, warm_start=x, tol=config.inner_tol, max_iter=config.inner_max_iter
        )
        r = problem.apply(x) - problem.target
        lam = lam + beta * r
        _record(
            trace, trace_hook, problem, config, "palm",
            k=k, tic=tic, x=x, z=x, y=x, lam=lam, theta=1.0, beta=beta,
            inner_ok=inner_ok, z0=z0, lam0=lam0, feas=float(np.linalg.norm(r)),
        )
    return x, lam, trace


def fast_palm_run(problem, config, init=None, dual_init=None, trace_hook=None,
                  constant_schedule=False):
    """Accelerated proximal augmented-Lagrangian method.

    Runs, per iteration k (theta^0 = 1, beta^k = 1/theta^k):

        y^{k+1} = (1 - theta^k) x^k + theta^k z^k
        z^{k+1} = argmin_x <grad g(y^{k+1}), x> + h(x) + <lam^k, A(x)>
                  + beta^k/2 ||A(x) - b||^2 + L theta^k / 2 ||x - z^k||^2
        x^{k+1} = (1 - theta^k) x^k + theta^k z^{k+1}
        lam^{k+1} = lam^k + beta^k (A(z^{k+1}) - b)

    with the z-step solved by warm-started FISTA.  Multi-block problems are
    merged into one superblock (separable prox, L = max_i L_i).

    With ``constant_schedule=True`` the schedule is pinned to theta == 1 and
    beta == ``config.beta_fixed``, which reproduces :func:`palm_run` exactly;
    this is exercised by the reduction tests.
    """
    x, lam = _prep_init(problem, init, dual_init)
    z = x.copy()
    z0, lam0 = z.copy(), lam.copy()
    mu0 = problem.lipschitz_max
    jns = problem.joint_norm_sq
    theta = 1.0
    trace = []
    for k in range(config.max_iters):
        tic = time.perf_counter()
        beta = config.beta_fixed if constant_schedule else 1.0 / theta
        y = (1.0 - theta) * x + theta * z
        mu = mu0 * theta
        sub = Subproblem(
            lin=problem.smooth_grads(y),
            prox_fns=problem.prox_fns,
            ops=problem.ops,
            lam=lam,
            target=problem.target,
            beta=beta,
            mu=mu,
            center=z,
            smooth_lipschitz=beta * jns + mu,
        )
        z_new, inner_ok = fista_solve(
            sub, warm_start=z, tol=config.inner_tol, max_iter=config.inner_max_iter
        )
        x = (1.0 - theta) * x + theta * z_new
        lam = lam + beta * (problem.apply(z_new) - problem.target)
        z = z_new
        _record(
            trace, trace_hook, problem, config, "fast_palm",
            k=k, tic=tic, x=x, z=z, y=y, lam=lam, theta=theta, beta=beta,
            inner_ok=inner_ok, z0=z0, lam0=lam0, feas=problem.feasibility(x),
        )
        if not constant_schedule:
            theta = theta_next(theta)
    return x, lam, trace


def _splitting_weights(problem, beta_etas, theta):
    """Prox weights L_i * theta + beta * eta_i."""
    return tuple(
        lip * theta + be for lip, be in zip(problem.block_lipschitz, beta_etas)
    )


def pl_admm_ps_run(problem, config, init=None, dual_init=None, trace_hook=None):
    """Proximal linearized ADMM with parallel splitting (constant penalty).

    All blocks update simultaneously from the same shifted multiplier:

        shift = lam^k + beta (A(x^k) - b)
        x_i^{k+1} = prox_{h_i / w_i}( x_i^k - (grad g_i(x_i^k)
                        + A_i^T shift) / w_i ),   w_i = L_i + beta eta_i
        lam^{k+1} = lam^k + beta (A(x^{k+1}) - b)

    with eta_i = eta_slack * n * ||A_i||^2 (eta_slack > 1).
    """
    x, lam = _prep_init(problem, init, dual_init)
    z0, lam0 = x.copy(), lam.copy()
    beta = config.beta_fixed
    beta_etas = tuple(beta * e for e in eta_values(problem, config.eta_slack))
    weights = _splitting_weights(problem, beta_etas, 1.0)
    _check_weights(weights)
    trace = []
    for k in range(config.max_iters):
        tic = time.perf_counter()
        shift = lam + beta * (problem.apply(x) - problem.target)
        x = BlockPoint([
            blk.prox.prox(xi - (blk.smooth.grad(xi) + blk.op.adjoint(shift)) / w,
                          1.0 / w)
            for blk, xi, w in zip(problem.blocks, x.blocks, weights)
        ])
        r = problem.apply(x) - problem.target
        lam = lam + beta * r
        _record(
            trace, trace_hook, problem, config, "pl_admm_ps",
            k=k, tic=tic, x=x, z=x, y=x, lam=lam, theta=1.0, beta=beta,
            inner_ok=True, z0=z0, lam0=lam0, feas=float(np.linalg.norm(r)),
        )
    return x, lam, trace


def fast_pl_admm_ps_run(problem, config, init=None, dual_init=None,
                        trace_hook=None, constant_schedule=False):
    """Accelerated proximal linearized ADMM with parallel splitting.

    Per iteration k (theta^0 = 1, beta fixed):

        y_i^{k+1} = (1 - theta^k) x_i^k + theta^k z_i^k
        shift     = lam^k + beta (A(z^k) - b)
        z_i^{k+1} = prox_{h_i / w_i}( z_i^k - (grad g_i(y_i^{k+1})
                        + A_i^T shift) / w_i ),  w_i = L_i theta^k + beta eta_i
        x_i^{k+1} = (1 - theta^k) x_i^k + theta^k z_i^{k+1}
        lam^{k+1} = lam^k + beta (A(z^{k+1}) - b)

    ``constant_schedule=True`` pins theta == 1, which reproduces
    :func:`pl_admm_ps_run` exactly (reduction tests rely on this).
    """
    x, lam = _prep_init(problem, init, dual_init)
    z = x.copy()
    z0, lam0 = z.copy(), lam.copy()
    beta = config.beta_fixed
    beta_etas = tuple(beta * e for e in eta_values(problem, config.eta_slack))
    _check_weights(_splitting_weights(problem, beta_etas, 1.0))
    theta = 1.0
    trace = []
    for k in range(config.max_iters):
        tic = time.perf_counter()
        weights = _splitting_weights(problem, beta_etas, theta)
        y = (1.0 - theta) * x + theta * z
        shift = lam + beta * (problem.apply(z) - problem.target)
        z_new = BlockPoint([
            blk.prox.prox(zi - (blk.smooth.grad(yi) + blk.op.adjoint(shift)) / w,
                          1.0 / w)
            for blk, zi, yi, w in zip(problem.blocks, z.blocks, y.blocks, weights)
        ])
        x = (1.0 - theta) * x + theta * z_new
        lam = lam + beta * (problem.apply(z_new) - problem.target)
        z = z_new
        _record(
            trace, trace_hook, problem, config, "fast_pl_admm_ps",
            k=k, tic=tic, x=x, z=z, y=y, lam=lam, theta=theta, beta=beta,
            inner_ok=True, z0=z0, lam0=lam0, feas=problem.feasibility(x),
        )
        if not constant_schedule:
            theta = theta_next(theta)
    return x, lam, trace


def _check_weights(weights):
    for i, w in enumerate(weights):
        if not w > 0:
            raise ValueError(
                f"block {i} has zero proximal weight (L_i and beta*eta_i both "
                f"vanish); its update is not well posed"
            )


SOLVERS = {
    "palm": palm_run,
    "fast_palm": fast_palm_run,
    "pl_admm_ps": pl_admm_ps_run,
    "fast_pl_admm_ps": fast_pl_admm_ps_run,
}


def run(problem, config, init=None, dual_init=None, trace_hook=None):
    """Dispatch on ``config.algorithm`` (one of %s).""" % ", ".join(sorted(SOLVERS))
    if config.algorithm not in SOLVERS:
        raise ValueError(
            f"unknown algorithm {config.algorithm!r}; "
            f"choose one of {sorted(SOLVERS)}"
        )
    return SOLVERS[config.algorithm](
        problem, config, init=init, dual_init=dual_init, trace_hook=trace_hook
    )
