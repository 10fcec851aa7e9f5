"""Closed-form one-dimensional models on X = [0, 1].

Three variants, all costless (c == 0) with interval neighborhoods:

``example31``
    u(x) = 1 - x/4, phi(x, y) = (1 - y/4) + 0.6*|0.5 - x|*(y - x),
    D(x) = [x, x + 0.1*(1 - x)].  Forward-only moves; the estimate slope
    flips sign at x = 1/12, so descent from 0 settles just past that point
    even though u itself keeps falling.

``example32``
    u(x) = 1 - x/4, phi(x, y) = (1 - y/4) + max(0.5 - x, 0)*(y - x),
    D(x) = [x - 0.1*max(0.5 - x, 0), x + 0.1*(2 - x)] (clipped to X).
    Two-sided moves below 0.5; descent from 0 oscillates onto x = 0.25.

``example41``
    u(x) = x, phi(x, y) = y, D(x) = X.  The over-estimate vanishes, every
    uphill step looks profitable, and vanishing step sizes can stall short
    of the stationary state x = 1 when no threshold floor is enforced.
"""

from __future__ import annotations

import numpy as np

from ..core import RelativeProblem, StatePoint, ValidationError

VARIANTS = ("example31", "example32", "example41")


class Example1D(RelativeProblem):
    """One of the closed-form interval models, selected by ``variant``."""

    def __init__(self, variant: str):
        if variant not in VARIANTS:
            raise ValidationError(
                f"unknown variant {variant!r}; expected one of {VARIANTS}")
        self.variant = variant

    @property
    def dimension(self) -> int:
        return 1

    def utility_estimate(self, x: StatePoint, y: StatePoint,
                         move_index: int | None = None) -> float:
        xv, yv = x.coords[0], y.coords[0]
        base = 1.0 - yv / 4.0
        if self.variant == "example31":
            return base + 0.6 * abs(0.5 - xv) * (yv - xv)
        if self.variant == "example32":
            return base + max(0.5 - xv, 0.0) * (yv - xv)
        return yv

    def move_cost(self, x: StatePoint, y: StatePoint) -> float:
        return 0.0

    def feasible_interval(self, x: StatePoint) -> tuple[float, float]:
        xv = x.coords[0]
        if self.variant == "example31":
            lo, hi = xv, xv + 0.1 * (1.0 - xv)
        elif self.variant == "example32":
            lo, hi = xv - 0.1 * max(0.5 - xv, 0.0), xv + 0.1 * (2.0 - xv)
        else:
            lo, hi = 0.0, 1.0
        return max(lo, 0.0), min(hi, 1.0)

    def feasible_contains(self, x: StatePoint, y: StatePoint) -> bool:
        if y.dimension != 1 or not self.state_contains(y):
            return False
        lo, hi = self.feasible_interval(x)
        return lo <= y.coords[0] <= hi

    def sample_feasible(self, x, rng, count):
        lo, hi = self.feasible_interval(x)
        return [StatePoint((v,)) for v in rng.uniform(lo, hi, size=count)]

    def sample_states(self, rng, count):
        return [StatePoint((v,)) for v in rng.uniform(0.0, 1.0, size=count)]

    def metric(self, x: StatePoint, y: StatePoint) -> float:
        return abs(x.coords[0] - y.coords[0])

    def state_contains(self, x: StatePoint) -> bool:
        return x.dimension == 1 and 0.0 <= x.coords[0] <= 1.0


def make_example(variant: str, **params) -> Example1D:
    """Build one of the closed-form models; they take no further parameters."""
    if params:
        raise ValidationError(
            f"variant {variant!r} accepts no parameters, got {sorted(params)}")
    return Example1D(variant)
