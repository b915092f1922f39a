"""Accelerated augmented-Lagrangian solvers for linearly constrained
separable convex programs, with rate instrumentation and a subspace
clustering harness."""

from .blocks import BlockPoint
from .errors import DimensionError, NumericError
from .functions import L1, L21, NuclearNorm, Quadratic, ZeroProx, ZeroSmooth
from .metrics import (
    SaddleEstimate,
    admm_alpha,
    conv_function,
    estimate_saddle,
    feasibility,
    theorem_bound,
)
from .schedule import ThetaState, beta_fast_palm, theta_next
from .solvers import (
    Block,
    BlockProblem,
    SolverConfig,
    SolverState,
    TraceRecord,
    fast_palm_run,
    fast_pl_admm_ps_run,
    palm_run,
    pl_admm_ps_run,
    run,
)

__version__ = "0.1.0"

__all__ = [
    "BlockPoint",
    "Block",
    "BlockProblem",
    "DimensionError",
    "NumericError",
    "L1",
    "L21",
    "NuclearNorm",
    "Quadratic",
    "ZeroProx",
    "ZeroSmooth",
    "SaddleEstimate",
    "SolverConfig",
    "SolverState",
    "TraceRecord",
    "ThetaState",
    "admm_alpha",
    "beta_fast_palm",
    "conv_function",
    "estimate_saddle",
    "feasibility",
    "theorem_bound",
    "theta_next",
    "palm_run",
    "fast_palm_run",
    "pl_admm_ps_run",
    "fast_pl_admm_ps_run",
    "run",
]
