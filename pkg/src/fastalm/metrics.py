"""Convergence measurement against an estimated saddle point.

For constrained programs the objective gap alone can be negative at
infeasible iterates, so progress is measured by the convergence function

    conv(x) = f(x) - f(x*) + <lam*, A(x) - b> + penalty * ||A(x) - b||^2 ,

which is nonnegative for any saddle point (x*, lam*) and any penalty > 0,
and vanishes exactly at optima.  The penalty coefficient is 1/2 for the
accelerated single-block analysis and beta * alpha / 2 for the parallel
splitting analysis (:func:`admm_alpha`).

Since real saddle points are unavailable, :func:`estimate_saddle` runs a
long reference solve (at least ten times the horizon under comparison) and
treats its final primal/dual pair as (x*, lam*).  The theoretical rate
certificates are evaluated by :func:`theorem_bound`; the parallel-splitting
bound needs feasible-set diameters, which are replaced by empirical proxies
(twice the largest observed distance from the initial point) and labeled as
such wherever they are reported.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .blocks import BlockPoint
from .solvers import SolverConfig, eta_values, fast_palm_run, fast_pl_admm_ps_run


@dataclass
class SaddleEstimate:
    """Reference optimum from a long solver run.

    ``feas_floor`` is the best constraint residual the reference run
    reached; downstream tolerance arguments should not be pushed below it.
    """

    x_star: BlockPoint
    lam_star: np.ndarray
    f_star: float
    feas_floor: float
    provenance: str


def estimate_saddle(problem, reference_iters, config=None, method="auto"):
    """Run a long reference solve and freeze its endpoint as the saddle.

    Parameters
    ----------
    problem : BlockProblem
    reference_iters : int
        Iteration budget; callers comparing a horizon of K iterations
        should use at least 10 * K.
    config : SolverConfig, optional
        Template for penalties/tolerances; its ``max_iters`` is overridden.
    method : {"auto", "fast_palm", "fast_pl_admm_ps"}
        Reference solver.  "auto" picks the accelerated single-block solver
        for one-block problems (tight inner solves give the best floor) and
        the accelerated parallel splitting otherwise (tractable per-iteration
        cost on multi-block instances).
    """
    if reference_iters < 0:
        raise ValueError(f"reference_iters must be nonnegative, got {reference_iters}")
    if config is None:
        config = SolverConfig(max_iters=reference_iters)
    cfg = replace(config, max_iters=reference_iters, algorithm=None)
    if method == "auto":
        method = "fast_palm" if problem.n == 1 else "fast_pl_admm_ps"
    if method == "fast_palm":
        x, lam, trace = fast_palm_run(problem, cfg)
    elif method == "fast_pl_admm_ps":
        x, lam, trace = fast_pl_admm_ps_run(problem, cfg)
    else:
        raise ValueError(f"unknown reference method {method!r}")
    feas = problem.feasibility(x)
    floor = min([feas] + [rec.feas_norm for rec in trace])
    return SaddleEstimate(
        x_star=x,
        lam_star=lam,
        f_star=problem.objective(x),
        feas_floor=floor,
        provenance=(
            f"{method} reference run, {reference_iters} iterations, "
            f"beta_fixed={cfg.beta_fixed:g}, eta_slack={cfg.eta_slack:g}, "
            f"inner_tol={cfg.inner_tol:g}"
        ),
    )


def conv_function(problem, x, saddle, penalty):
    """Evaluate the convergence function at ``x``.

    ``penalty`` multiplies the squared residual: pass 0.5 for the
    single-block analysis or beta * alpha / 2 for parallel splitting.
    """
    if not penalty > 0:
        raise ValueError(f"penalty must be positive, got {penalty}")
    r = problem.apply(x) - problem.target
    return (
        problem.objective(x)
        - saddle.f_star
        + float(np.sum(saddle.lam_star * r))
        + penalty * float(np.sum(r * r))
    )


def feasibility(problem, x):
    """||A(x) - b||_F (thin alias for BlockProblem.feasibility)."""
    return problem.feasibility(x)


def admm_alpha(problem, etas):
    """Penalty coefficient of the parallel-splitting convergence analysis:

        alpha = min( 1/(n+1),
                     min_i (eta_i - n ||A_i||^2) / (2 (n+1) ||A_i||^2) )

    taken over blocks with nonzero maps.  Positive whenever every
    eta_i > n ||A_i||^2.
    """
    n = problem.n
    terms = [1.0 / (n + 1)]
    for nsq, eta in zip(problem.norm_a_sq, etas):
        if nsq > 0:
            terms.append((eta - n * nsq) / (2.0 * (n + 1) * nsq))
    return min(terms)


def theorem_bound(k, kind, **constants):
    """Theoretical convergence-function bound after iteration ``k``.

    kind="fast_palm" (constants: lipschitz, dist_x_sq, dist_lam_sq):

        2 / (k+2)^2 * (L * ||x^0 - x*||^2 + ||lam^0 - lam*||^2)

    kind="fast_pl_admm_ps" (constants: l_max, dist_x_sq, beta, eta_max,
    diam_x_sq, diam_lam_sq):

        2 L_max ||x^0 - x*||^2 / (k+2)^2 + 2 beta eta_max D_X^2 / (k+2)
        + 2 D_Lam^2 / (beta (k+2))

    where D_X, D_Lam are (proxies for) feasible-set diameters.
    """
    if k < 0:
        raise ValueError(f"iteration index must be nonnegative, got {k}")
    if kind == "fast_palm":
        lip = constants["lipschitz"]
        dx2 = constants["dist_x_sq"]
        dl2 = constants["dist_lam_sq"]
        return 2.0 * (lip * dx2 + dl2) / (k + 2) ** 2
    if kind == "fast_pl_admm_ps":
        l_max = constants["l_max"]
        dx2 = constants["dist_x_sq"]
        beta = constants["beta"]
        eta_max = constants["eta_max"]
        diam_x_sq = constants["diam_x_sq"]
        diam_lam_sq = constants["diam_lam_sq"]
        return (
            2.0 * l_max * dx2 / (k + 2) ** 2
            + 2.0 * beta * eta_max * diam_x_sq / (k + 2)
            + 2.0 * diam_lam_sq / (beta * (k + 2))
        )
    raise ValueError(f"unknown bound kind {kind!r}")


def fast_palm_constants(problem, saddle, init=None, dual_init=None):
    """Bound constants for kind="fast_palm" from a saddle estimate."""
    x0 = problem.zeros() if init is None else init
    lam0 = problem.zeros_dual() if dual_init is None else np.asarray(dual_init, float)
    return {
        "lipschitz": problem.lipschitz_max,
        "dist_x_sq": saddle.x_star.dist(x0) ** 2,
        "dist_lam_sq": float(np.linalg.norm(saddle.lam_star - lam0)) ** 2,
    }


def fast_pl_admm_ps_constants(problem, saddle, trace, beta, eta_slack,
                              init=None, dual_init=None):
    """Bound constants for kind="fast_pl_admm_ps".

    The feasible-set diameters of the analysis are unobservable; they are
    replaced by empirical proxies — twice the largest distance of the run's
    z-iterates (resp. multipliers) from their initial points, read off
    ``trace``.  Callers reporting these values must label them as proxies.
    """
    x0 = problem.zeros() if init is None else init
    lam0 = problem.zeros_dual() if dual_init is None else np.asarray(dual_init, float)
    etas = eta_values(problem, eta_slack)
    diam_x = 2.0 * max([rec.z_from_init for rec in trace], default=0.0)
    diam_lam = 2.0 * max([rec.lam_from_init for rec in trace], default=0.0)
    return {
        "l_max": problem.lipschitz_max,
        "dist_x_sq": saddle.x_star.dist(x0) ** 2,
        "beta": beta,
        "eta_max": max(etas),
        "diam_x_sq": diam_x**2,
        "diam_lam_sq": diam_lam**2,
    }


def fit_loglog_slope(ks, values):
    """Least-squares slope of log(value) against log(k).

    Rows with nonpositive values are dropped (the convergence function can
    graze zero near the saddle estimate's accuracy floor).  Returns NaN when
    fewer than two usable points remain.
    """
    ks = np.asarray(ks, dtype=float)
    values = np.asarray(values, dtype=float)
    keep = (ks > 0) & (values > 0) & np.isfinite(values)
    if keep.sum() < 2:
        return float("nan")
    slope, _ = np.polyfit(np.log(ks[keep]), np.log(values[keep]), 1)
    return float(slope)
