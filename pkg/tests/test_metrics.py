"""Convergence-function, saddle-estimation, and bound-formula checks."""

import math

import numpy as np
import pytest

from fastalm.blocks import BlockPoint
from fastalm.functions import L1, ZeroProx, ZeroSmooth
from fastalm.linops import Identity, Zero
from fastalm.metrics import (
    SaddleEstimate,
    admm_alpha,
    conv_function,
    estimate_saddle,
    fast_palm_constants,
    fast_pl_admm_ps_constants,
    fit_loglog_slope,
    theorem_bound,
)
from fastalm.problems import gen_lasso_simplex
from fastalm.solvers import (
    Block,
    BlockProblem,
    SolverConfig,
    TraceRecord,
    eta_values,
    fast_palm_run,
)


def abs_value_problem():
    """min |x|  s.t.  x = 1; saddle at x* = 1, lam* = -1, f* = 1."""
    block = Block(smooth=ZeroSmooth(), prox=L1(1.0), op=Identity((1, 1)))
    return BlockProblem([block], np.ones((1, 1)))


def exact_saddle():
    return SaddleEstimate(
        x_star=BlockPoint([np.ones((1, 1))]),
        lam_star=-np.ones((1, 1)),
        f_star=1.0,
        feas_floor=0.0,
        provenance="hand-built",
    )


def test_conv_function_hand_values():
    problem = abs_value_problem()
    saddle = exact_saddle()
    at = lambda v: BlockPoint([np.array([[float(v)]])])
    # conv(x) = |x| - 1 - (x - 1) + p (x - 1)^2
    assert conv_function(problem, at(1.0), saddle, 0.5) == pytest.approx(0.0, abs=1e-15)
    assert conv_function(problem, at(0.0), saddle, 0.5) == pytest.approx(0.5)
    assert conv_function(problem, at(0.0), saddle, 2.0) == pytest.approx(2.0)
    assert conv_function(problem, at(2.0), saddle, 0.5) == pytest.approx(0.5)
    assert conv_function(problem, at(-1.0), saddle, 0.5) == pytest.approx(4.0)
    with pytest.raises(ValueError):
        conv_function(problem, at(0.0), saddle, 0.0)


def test_conv_function_nonnegative_at_random_points():
    problem = abs_value_problem()
    saddle = exact_saddle()
    rng = np.random.default_rng(40)
    for _ in range(200):
        x = BlockPoint([rng.uniform(-4, 4, (1, 1))])
        assert conv_function(problem, x, saddle, 0.5) >= -1e-15


def test_estimate_saddle_recovers_known_optimum():
    problem = abs_value_problem()
    sad = estimate_saddle(problem, 400)
    assert float(sad.x_star.blocks[0][0, 0]) == pytest.approx(1.0, abs=1e-4)
    assert float(sad.lam_star[0, 0]) == pytest.approx(-1.0, abs=1e-3)
    assert sad.f_star == pytest.approx(1.0, abs=1e-4)
    assert 0 <= sad.feas_floor <= 1e-4
    assert "fast_palm" in sad.provenance  # auto picks it for one block


def test_estimate_saddle_method_selection_and_guards():
    problem = abs_value_problem()
    sad = estimate_saddle(problem, 50, method="fast_palm")
    assert sad.provenance.startswith("fast_palm")
    two = BlockProblem(
        [
            Block(smooth=ZeroSmooth(), prox=L1(1.0), op=Identity((1, 1))),
            Block(smooth=ZeroSmooth(), prox=L1(1.0), op=Identity((1, 1))),
        ],
        np.ones((1, 1)),
    )
    sad = estimate_saddle(two, 50)
    assert sad.provenance.startswith("fast_pl_admm_ps")  # auto on multi-block
    with pytest.raises(ValueError):
        estimate_saddle(problem, -1)
    with pytest.raises(ValueError):
        estimate_saddle(problem, 10, method="subgradient")


def test_estimate_saddle_respects_config_template():
    problem = abs_value_problem()
    cfg = SolverConfig(max_iters=1, beta_fixed=3.0)  # max_iters is overridden
    sad = estimate_saddle(problem, 60, config=cfg, method="fast_pl_admm_ps")
    assert "beta_fixed=3" in sad.provenance
    assert "60 iterations" in sad.provenance


def test_admm_alpha_formula():
    problem = gen_lasso_simplex(6, 12, seed=1).problem  # n=1, ||A||^2 = 12
    etas = eta_values(problem, 1.02)
    # terms: 1/2 and (1.02*12 - 12) / (2 * 2 * 12) = 0.02/4
    assert admm_alpha(problem, etas) == pytest.approx(0.005, rel=1e-9)

    # zero-map blocks are excluded from the minimum
    two = BlockProblem(
        [
            Block(smooth=ZeroSmooth(), prox=ZeroProx(), op=Identity((1, 1))),
            Block(smooth=ZeroSmooth(), prox=ZeroProx(), op=Zero((1, 1), (1, 1))),
        ],
        np.zeros((1, 1)),
    )
    etas = (2.04, 0.0)  # eta_slack=1.02, n=2, norms (1, 0)
    expected = min(1.0 / 3.0, (2.04 - 2.0) / (2.0 * 3.0 * 1.0))
    assert admm_alpha(two, etas) == pytest.approx(expected, rel=1e-12)


def test_theorem_bound_hand_values():
    b0 = theorem_bound(0, "fast_palm", lipschitz=1.0, dist_x_sq=1.0, dist_lam_sq=1.0)
    assert b0 == pytest.approx(1.0)
    b2 = theorem_bound(2, "fast_palm", lipschitz=3.0, dist_x_sq=2.0, dist_lam_sq=1.0)
    assert b2 == pytest.approx(2.0 * 7.0 / 16.0)

    b = theorem_bound(
        0,
        "fast_pl_admm_ps",
        l_max=2.0,
        dist_x_sq=1.0,
        beta=4.0,
        eta_max=3.0,
        diam_x_sq=1.0,
        diam_lam_sq=8.0,
    )
    # 2*2*1/4 + 2*4*3*1/2 + 2*8/(4*2) = 1 + 12 + 2
    assert b == pytest.approx(15.0)

    with pytest.raises(ValueError):
        theorem_bound(-1, "fast_palm", lipschitz=1, dist_x_sq=1, dist_lam_sq=1)
    with pytest.raises(ValueError):
        theorem_bound(0, "newton")


def test_theorem_bound_decays_at_expected_rates():
    # large k so the +2 offset inside the bound is negligible
    ks = np.array([100, 1000, 10000, 100000])
    fp = [
        theorem_bound(int(k), "fast_palm", lipschitz=1.0, dist_x_sq=1.0, dist_lam_sq=1.0)
        for k in ks
    ]
    assert fit_loglog_slope(ks, fp) == pytest.approx(-2.0, abs=1e-2)
    ps = [
        theorem_bound(
            int(k), "fast_pl_admm_ps", l_max=0.0, dist_x_sq=0.0, beta=1.0,
            eta_max=1.0, diam_x_sq=1.0, diam_lam_sq=1.0,
        )
        for k in ks
    ]
    assert fit_loglog_slope(ks, ps) == pytest.approx(-1.0, abs=1e-2)


def test_fast_palm_constants():
    problem = abs_value_problem()
    saddle = exact_saddle()
    consts = fast_palm_constants(problem, saddle)
    assert consts["lipschitz"] == 0.0
    assert consts["dist_x_sq"] == pytest.approx(1.0)
    assert consts["dist_lam_sq"] == pytest.approx(1.0)
    shifted = fast_palm_constants(
        problem, saddle,
        init=BlockPoint([np.ones((1, 1))]),
        dual_init=-np.ones((1, 1)),
    )
    assert shifted["dist_x_sq"] == pytest.approx(0.0)
    assert shifted["dist_lam_sq"] == pytest.approx(0.0)


def test_fast_pl_admm_ps_constants_use_trace_proxies():
    problem = abs_value_problem()
    saddle = exact_saddle()
    mk = lambda z, lam: TraceRecord(
        k=0, time_ms=0.0, objective=0.0, feas_norm=0.0,
        z_from_init=z, lam_from_init=lam,
    )
    trace = [mk(0.5, 0.1), mk(2.0, 0.4), mk(1.0, 0.2)]
    consts = fast_pl_admm_ps_constants(
        problem, saddle, trace, beta=1.0, eta_slack=1.02
    )
    assert consts["diam_x_sq"] == pytest.approx((2.0 * 2.0) ** 2)
    assert consts["diam_lam_sq"] == pytest.approx((2.0 * 0.4) ** 2)
    assert consts["eta_max"] == pytest.approx(1.02)
    assert consts["l_max"] == 0.0
    assert consts["beta"] == 1.0
    empty = fast_pl_admm_ps_constants(problem, saddle, [], beta=1.0, eta_slack=1.02)
    assert empty["diam_x_sq"] == 0.0
    assert empty["diam_lam_sq"] == 0.0


def test_fit_loglog_slope():
    ks = np.arange(1, 50)
    assert fit_loglog_slope(ks, 3.0 * ks**-2.0) == pytest.approx(-2.0, abs=1e-10)
    assert fit_loglog_slope(ks, 0.5 * ks**1.5) == pytest.approx(1.5, abs=1e-10)
    # nonpositive values are dropped, not fatal
    vals = 3.0 * ks**-1.0
    vals[::2] = -1.0
    assert fit_loglog_slope(ks, vals) == pytest.approx(-1.0, abs=1e-10)
    assert math.isnan(fit_loglog_slope([1, 2], [0.0, -1.0]))
    assert math.isnan(fit_loglog_slope([], []))


def test_conv_function_along_a_real_run():
    problem = gen_lasso_simplex(8, 16, seed=5).problem
    saddle = estimate_saddle(problem, 3000, method="fast_palm")
    cfg = SolverConfig(max_iters=200, trace_every=10)
    collected = []

    def hook(rec, state):
        collected.append(conv_function(problem, state.x, saddle, 0.5))

    fast_palm_run(problem, cfg, trace_hook=hook)
    assert all(v >= -1e-8 for v in collected)
    assert collected[-1] < collected[0]
