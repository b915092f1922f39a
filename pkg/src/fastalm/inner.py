"""Inner solver for the prox-linearized augmented-Lagrangian subproblem.

The accelerated single-block solver must minimize, at every outer step,

    q(x) = <c, x> + h(x) + <lam, A(x)> + beta/2 ||A(x) - b||^2
           + mu/2 ||x - z||^2 ,

which has no closed form when ``A`` is not unitary.  ``fista_solve`` runs an
accelerated proximal-gradient loop on the splitting (smooth part = everything
except ``h``) with the constant step ``1 / (beta ||A||^2 + mu)``.  Writing
``T`` for the prox-gradient step ``T(x) = prox_{h/Ls}(x - grad_s(x)/Ls)``,
the loop stops once ``||v - T(v)|| <= tol`` and returns ``T(v)``; since
``T`` is nonexpansive (convex smooth part, step <= 1/Ls), the fixed-point
residual at the returned point obeys

    || T(v) - T(T(v)) || <= || v - T(v) || <= tol ,

so the returned candidate itself satisfies the residual tolerance without a
second gradient evaluation per sweep.  Warm starts come from the previous
outer iterate, so late outer iterations typically need a handful of sweeps.

Everything is expressed over block tuples so a merged multi-block
("superblock") subproblem with separable ``h`` works unchanged; the
single-block case is a one-element tuple.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .blocks import BlockPoint


@dataclass
class Subproblem:
    """One outer step's subproblem data.

    Attributes
    ----------
    lin : BlockPoint
        Gradient of the linearized smooth objective (the ``c`` term).
    prox_fns : sequence of ProxFn
        Blockwise nonsmooth terms; their sum is ``h``.
    ops : sequence of LinearMap
        Blockwise constraint maps; ``A(x) = sum_i ops[i](x_i)``.
    lam : ndarray
        Current multiplier estimate.
    target : ndarray
        Right-hand side ``b``.
    beta : float
        Penalty on the constraint residual.
    mu : float
        Proximal weight tying ``x`` to ``center``.
    center : BlockPoint
        Proximal center ``z``.
    smooth_lipschitz : float
        Precomputed ``beta * ||A||^2 + mu``.
    """

    lin: BlockPoint
    prox_fns: Sequence
    ops: Sequence
    lam: np.ndarray
    target: np.ndarray
    beta: float
    mu: float
    center: BlockPoint
    smooth_lipschitz: float

    def apply(self, x):
        out = self.ops[0].apply(x[0])
        for op, blk in zip(self.ops[1:], x.blocks[1:]):
            out += op.apply(blk)
        return out

    def adjoint(self, y):
        return BlockPoint([op.adjoint(y) for op in self.ops])

    def grad_smooth(self, x):
        """Gradient of q minus h at x."""
        shift = self.lam + self.beta * (self.apply(x) - self.target)
        return self.lin + self.adjoint(shift) + self.mu * (x - self.center)

    def prox(self, a, tau):
        return BlockPoint(
            [h.prox(blk, tau) for h, blk in zip(self.prox_fns, a.blocks)]
        )

    def objective(self, x):
        r = self.apply(x) - self.target
        val = self.lin.dot(x)
        val += sum(h.value(blk) for h, blk in zip(self.prox_fns, x.blocks))
        val += float(np.sum(self.lam * self.apply(x)))
        val += 0.5 * self.beta * float(np.sum(r * r))
        val += 0.5 * self.mu * x.dist(self.center) ** 2
        return val


def fista_solve(sub, warm_start, tol=1e-9, max_iter=2000):
    """Minimize the subproblem by accelerated proximal gradient.

    Parameters
    ----------
    sub : Subproblem
    warm_start : BlockPoint
        Starting point (previous outer iterate).
    tol : float
        Threshold on the prox-gradient residual (see module docstring: the
        bound holds at the returned point).
    max_iter : int
        Sweep budget; exhausting it returns the smallest-residual iterate
        seen, flagged unconverged.

    Returns
    -------
    (BlockPoint, bool)
        The approximate minimizer and whether ``tol`` was reached.  The
        objective at the return value never exceeds its value at the warm
        start.
    """
    ls = float(sub.smooth_lipschitz)
    if not ls > 0:
        raise ValueError(f"smooth Lipschitz constant must be positive, got {ls}")
    if max_iter < 1:
        raise ValueError(f"max_iter must be at least 1, got {max_iter}")
    step = 1.0 / ls
    ops, proxs = sub.ops, sub.prox_fns
    lam, target, beta, mu = sub.lam, sub.target, sub.beta, sub.mu
    n = len(ops)
    # grad_s(x) = (lin - mu*center) + A^T(lam + beta (A(x) - b)) + mu x,
    # so x - step*grad_s(x) = (1 - step*mu) x - step*(const + A^T shift).
    consts = [
        step * (li - mu * ci) for li, ci in zip(sub.lin.blocks, sub.center.blocks)
    ]
    decay = 1.0 - step * mu
    x_prev = [b.copy() for b in warm_start.blocks]
    v = x_prev
    t = 1.0
    # seed with the warm start so a run of NaN residuals still returns a point
    best = x_prev
    best_res = math.inf
    for _ in range(max_iter):
        av = ops[0].apply(v[0])
        for op, vi in zip(ops[1:], v[1:]):
            av += op.apply(vi)
        shift = lam + beta * (av - target)
        p = [
            proxs[i].prox(decay * v[i] - (consts[i] + step * ops[i].adjoint(shift)), step)
            for i in range(n)
        ]
        res = math.sqrt(
            sum(float(np.sum((vi - pi) ** 2)) for vi, pi in zip(v, p))
        )
        if res < best_res:
            best_res, best = res, p
        if res <= tol:
            return BlockPoint(p), True
        t_new = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t * t))
        gamma = (t - 1.0) / t_new
        v = [pi + gamma * (pi - xi) for pi, xi in zip(p, x_prev)]
        x_prev = p
        t = t_new
    best = BlockPoint(best)
    if sub.objective(best) > sub.objective(warm_start):
        best = warm_start.copy()
    return best, False
