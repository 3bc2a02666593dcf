"""Chernoff-style binomial tail bounds used for threshold sanity checks.

With mu = n p and H(b) = 1 - b + b ln b (the convex rate function; H(1) = 0):

  P(Bin(n,p) <= x) <= exp(-mu H(x/mu))          for x <= mu
  P(Bin(n,p) >= x) <= exp(-mu H(x/mu))          for x > mu
  P(Bin(n,p) >= x) <= exp(-(x/2) ln(x/mu))      for x > e^2 mu
"""

from __future__ import annotations

import math
from typing import NamedTuple

__all__ = ["entropy_rate", "tail_bounds", "TailBounds"]


def entropy_rate(b: float) -> float:
    """H(b) = 1 - b + b ln b for b >= 0 (limit 1 at b = 0)."""
    if b < 0:
        raise ValueError("rate argument must be non-negative")
    if b == 0.0:
        return 1.0
    return 1.0 - b + b * math.log(b)


class TailBounds(NamedTuple):
    """One bound per side condition; None where the condition fails."""

    lower_tail_bound: float | None   # P(Bin <= x), valid when x <= mu
    upper_tail_bound: float | None   # P(Bin >= x), valid when x > mu
    far_upper_bound: float | None    # P(Bin >= x), valid when x > e^2 mu


def tail_bounds(n_trials: int, p: float, x: float) -> TailBounds:
    """The three tail bounds at their respective side conditions."""
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie in (0, 1)")
    if x < 0:
        raise ValueError("x must be non-negative")
    if n_trials < 1:
        raise ValueError("need at least one trial")
    mu = n_trials * p
    lower = math.exp(-mu * entropy_rate(x / mu)) if x <= mu else None
    upper = math.exp(-mu * entropy_rate(x / mu)) if x > mu else None
    far = (math.exp(-0.5 * x * math.log(x / mu))
           if x > math.e ** 2 * mu else None)
    return TailBounds(lower, upper, far)
