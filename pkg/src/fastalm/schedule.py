"""Acceleration parameter schedule.

The accelerated solvers drive a sequence theta_0 = 1, theta_{k+1} solving

    (1 - theta_{k+1}) / theta_{k+1}^2 = 1 / theta_k^2 ,

whose positive root we evaluate in the cancellation-free form

    theta_{k+1} = 2 theta_k^2 / (theta_k^2 + sqrt(theta_k^4 + 4 theta_k^2)).

Consequences used by the solvers and their tests: theta_k <= 2/(k+2), the
partial sums satisfy sum_{j<=k} 1/theta_j = 1/theta_k^2, and the increments
1/theta_{k+1} - 1/theta_k stay inside (0, 1).  The penalty rule for the
accelerated single-block solver is beta_k = 1/theta_k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


def theta_next(theta):
    """Advance the acceleration parameter one step.

    Raises
    ------
    ValueError
        If ``theta`` is outside (0, 1].
    """
    theta = float(theta)
    if not 0.0 < theta <= 1.0:
        raise ValueError(f"theta must lie in (0, 1], got {theta}")
    t2 = theta * theta
    return 2.0 * t2 / (t2 + math.sqrt(t2 * t2 + 4.0 * t2))


def beta_fast_palm(theta):
    """Penalty parameter 1/theta paired with the accelerated schedule."""
    theta = float(theta)
    if not 0.0 < theta <= 1.0:
        raise ValueError(f"theta must lie in (0, 1], got {theta}")
    return 1.0 / theta


@dataclass
class ThetaState:
    """Schedule position: step index, current theta, running sum of 1/theta."""

    k: int = 0
    theta: float = 1.0
    inv_theta_sum: float = 1.0

    def advance(self):
        """Return the state one step further along the schedule."""
        t = theta_next(self.theta)
        return ThetaState(self.k + 1, t, self.inv_theta_sum + 1.0 / t)
