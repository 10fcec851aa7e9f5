"""Discrete grid model: states i/n with a flat per-move cost floor.

Every distinct move costs at least ``delta_cost``, which is what makes
plain descent (accept any f < 0) terminate after finitely many moves: each
accepted move must raise the estimated utility by more than the cost floor
minus the injected estimate error, and the utility table is bounded.

The estimate carries an optional decaying error: with ``move_index`` k the
model reports phi(x, y) = u(y) + offset[y] * 2**(-k) for y != x, emulating
an estimator whose bias washes out as the run proceeds.  ``move_index=None``
is the stationary (bias-free) estimate used by diagnostics.  Offsets default
to delta_cost / 2 everywhere so a certified improvement never lies about the
sign of the true utility gain.
"""

from __future__ import annotations

import numpy as np

from ..core import DomainError, RelativeProblem, StatePoint, ValidationError

_SNAP_TOL = 1e-12


class DiscreteGridModel(RelativeProblem):
    def __init__(self, n: int, delta_cost: float, window: int,
                 utility: np.ndarray, offsets: np.ndarray):
        if n < 1:
            raise ValidationError("n must be a positive integer")
        if not delta_cost > 0.0:
            raise ValidationError("delta_cost must be positive")
        if window < 1:
            raise ValidationError("window must be a positive integer")
        utility = np.asarray(utility, dtype=float)
        offsets = np.asarray(offsets, dtype=float)
        if utility.shape != (n + 1,):
            raise ValidationError(f"utility table must have length {n + 1}")
        if offsets.shape != (n + 1,):
            raise ValidationError(f"offsets table must have length {n + 1}")
        if not np.all(np.isfinite(utility)):
            raise ValidationError("utility table must be finite")
        if np.any(offsets < 0.0) or not np.all(np.isfinite(offsets)):
            raise ValidationError("offsets must be finite and non-negative")
        self.n = int(n)
        self.delta_cost = float(delta_cost)
        self.window = int(window)
        self.utility = utility
        self.offsets = offsets
        # declared off-diagonal cost floor, consumed by check_b1_conditions
        self.b1_delta = float(delta_cost)

    @property
    def dimension(self) -> int:
        return 1

    def point(self, index: int) -> StatePoint:
        return StatePoint((index / self.n,), discrete_id=int(index))

    def _resolve(self, x: StatePoint) -> int:
        if x.discrete_id is not None:
            i = x.discrete_id
            if not 0 <= i <= self.n:
                raise DomainError(f"grid index {i} outside 0..{self.n}")
            return i
        i = round(x.coords[0] * self.n)
        if 0 <= i <= self.n and abs(i / self.n - x.coords[0]) <= _SNAP_TOL:
            return i
        raise DomainError(f"{x.coords[0]!r} is not a grid state")

    def _window_range(self, i: int) -> range:
        return range(max(0, i - self.window), min(self.n, i + self.window) + 1)

    def utility_estimate(self, x, y, move_index=None):
        i, j = self._resolve(x), self._resolve(y)
        value = float(self.utility[j])
        if move_index is not None and j != i:
            value += float(self.offsets[j]) * 2.0 ** (-move_index)
        return value

    def move_cost(self, x, y):
        return 0.0 if self._resolve(x) == self._resolve(y) else self.delta_cost

    def feasible_contains(self, x, y):
        try:
            i, j = self._resolve(x), self._resolve(y)
        except DomainError:
            return False
        return abs(j - i) <= self.window

    def enumerate_feasible(self, x):
        i = self._resolve(x)
        return [self.point(j) for j in self._window_range(i)]

    def sample_feasible(self, x, rng, count):
        w = self._window_range(self._resolve(x))
        picks = rng.integers(w.start, w.stop, size=count)
        return [self.point(j) for j in picks]

    def sample_states(self, rng, count):
        return [self.point(j) for j in rng.integers(0, self.n + 1, size=count)]

    def metric(self, x, y):
        return abs(x.coords[0] - y.coords[0])

    def state_contains(self, x):
        if x.dimension != 1:
            return False
        try:
            self._resolve(x)
        except DomainError:
            return False
        return True


def make_discrete_grid(n: int = 100, delta_cost: float = 0.05,
                       window: int = 10, utility=None, offsets=None,
                       **extra) -> DiscreteGridModel:
    """Grid model with a mildly multimodal default utility table."""
    if extra:
        raise ValidationError(f"unknown grid parameters {sorted(extra)}")
    if int(n) < 1:
        raise ValidationError("n must be a positive integer")
    if utility is None:
        t = np.arange(int(n) + 1) / float(n)
        utility = t + 0.5 * np.sin(6.0 * np.pi * t)
    if offsets is None:
        offsets = np.full(int(n) + 1, float(delta_cost) / 2.0)
    return DiscreteGridModel(n, delta_cost, window, utility, offsets)
