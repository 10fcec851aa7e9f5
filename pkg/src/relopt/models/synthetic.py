"""Synthetic line model whose move cost breaks the triangle inequality.

c(x, y) = (y - x)^2 on X = [0, 1] makes a direct move dearer than the same
displacement split into halves, so the triangle-inequality check is
guaranteed to find violations here.  Utility is flat-estimated (phi = u),
keeping everything else inert.
"""

from __future__ import annotations

from ..core import RelativeProblem, StatePoint


class SquaredCostLine(RelativeProblem):
    @property
    def dimension(self) -> int:
        return 1

    def utility_estimate(self, x, y, move_index=None):
        return y.coords[0]

    def move_cost(self, x, y):
        return (y.coords[0] - x.coords[0]) ** 2

    def feasible_contains(self, x, y):
        return y.dimension == 1 and self.state_contains(y)

    def sample_feasible(self, x, rng, count):
        return [StatePoint((v,)) for v in rng.uniform(0.0, 1.0, size=count)]

    def sample_states(self, rng, count):
        return [StatePoint((v,)) for v in rng.uniform(0.0, 1.0, size=count)]

    def metric(self, x, y):
        return abs(x.coords[0] - y.coords[0])

    def state_contains(self, x):
        return x.dimension == 1 and 0.0 <= x.coords[0] <= 1.0
