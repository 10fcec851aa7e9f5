"""Production planning with emission-priced waste treatment.

States are activity levels x in [0, x_max]^n of n technologies.  Running
them emits m pollutants, q(x) = Q x, each charged a per-unit treatment
price that rises with the emitted amount: pi_i(t) = pi0_i + s_i t^2.
Gross profit is quadratic, mu(x) = a.x - x.(h*x)/2.

The exact utility prices treatment at the destination's own emissions,

    u(x) = mu(x) - sum_i q_i(x) * pi_i(q_i(x)),

while the estimate available when planning a move from x linearizes the
price around the current emissions q(x),

    phi(x, y) = mu(y) - sum_i q_i(y) * [pi_i(q_i(x)) + pi_i'(q_i(x)) * (q_i(y) - q_i(x))].

Since pi_i is convex the linearization under-prices treatment, so the
over-estimate b(x, y) = sum_i q_i(y) * s_i * (q_i(y) - q_i(x))^2 is
genuinely positive and quadratic in the emission displacement.  Moves are
charged c(x, y) = kappa * ||q(y) - q(x)||_1 and are restricted to the
emission ball ||q(y) - q(x)||_inf <= rho.  Whenever

    rho <= kappa / (2 * max_i s_i * q_max),

with q_max the largest reachable single-pollutant emission, b <= c holds on
every feasible move; ``rho_bound_for_cost_domination`` exposes that bound
and the default rho sits safely inside it.
"""

from __future__ import annotations

import numpy as np

from ..core import RelativeProblem, StatePoint, ValidationError

_REJECT_CAP = 1000
_BATCH = 128


class WasteModel(RelativeProblem):
    def __init__(self, emission_matrix, revenue, curvature, price_base,
                 price_slope, kappa: float, rho: float | None = None,
                 x_max: float = 1.0):
        Q = np.asarray(emission_matrix, dtype=float)
        if Q.ndim != 2 or Q.size == 0:
            raise ValidationError("emission_matrix must be a non-empty 2-D array")
        if np.any(Q < 0.0) or not np.all(np.isfinite(Q)):
            raise ValidationError("emission_matrix entries must be finite and >= 0")
        m, n = Q.shape
        self.Q = Q
        self.a = self._vector(revenue, n, "revenue")
        self.h = self._vector(curvature, n, "curvature", positive=True)
        self.pi0 = self._vector(price_base, m, "price_base")
        self.s = self._vector(price_slope, m, "price_slope", positive=True)
        if not kappa > 0.0:
            raise ValidationError("kappa must be positive")
        if not x_max > 0.0:
            raise ValidationError("x_max must be positive")
        self.kappa = float(kappa)
        self.x_max = float(x_max)
        # largest single-pollutant emission over X and the largest row sum,
        # both used for the cost-domination bound and sampler shrink floor
        self._row_sums = self.Q.sum(axis=1)
        self.q_max = float(self._row_sums.max() * self.x_max)
        if rho is None:
            rho = 0.9 * self.rho_bound_for_cost_domination()
        if not rho > 0.0:
            raise ValidationError("rho must be positive")
        self.rho = float(rho)

    @staticmethod
    def _vector(values, length, name, positive=False):
        v = np.asarray(values, dtype=float)
        if v.shape != (length,):
            raise ValidationError(f"{name} must have length {length}")
        if not np.all(np.isfinite(v)):
            raise ValidationError(f"{name} must be finite")
        if positive and np.any(v <= 0.0):
            raise ValidationError(f"{name} entries must be positive")
        return v

    def rho_bound_for_cost_domination(self) -> float:
        """Largest move radius for which b <= c is guaranteed on all moves."""
        return self.kappa / (2.0 * float(self.s.max()) * self.q_max)

    @property
    def dimension(self) -> int:
        return self.Q.shape[1]

    def emissions(self, x: StatePoint) -> np.ndarray:
        return self.Q @ x.as_array()

    def _profit(self, x: np.ndarray) -> float:
        return float(self.a @ x - 0.5 * x @ (self.h * x))

    def utility_estimate(self, x, y, move_index=None):
        qx = self.emissions(x)
        qy = self.emissions(y)
        price = self.pi0 + self.s * qx ** 2 + 2.0 * self.s * qx * (qy - qx)
        return self._profit(y.as_array()) - float(qy @ price)

    def move_cost(self, x, y):
        return self.kappa * float(np.abs(self.emissions(y) - self.emissions(x)).sum())

    def feasible_contains(self, x, y):
        if not self.state_contains(y):
            return False
        return float(np.abs(self.emissions(y) - self.emissions(x)).max()) <= self.rho

    def sample_feasible(self, x, rng, count):
        xv = x.as_array()
        out: list[StatePoint] = []
        half = self.x_max
        rejects = 0
        while len(out) < count:
            lo = np.maximum(xv - half, 0.0)
            hi = np.minimum(xv + half, self.x_max)
            batch = rng.uniform(lo, hi, size=(_BATCH, self.dimension))
            ok = np.abs((batch - xv) @ self.Q.T).max(axis=1) <= self.rho
            for row in batch[ok]:
                out.append(StatePoint(tuple(row)))
                if len(out) == count:
                    break
            rejects += int((~ok).sum())
            if rejects >= _REJECT_CAP:
                half = max(half / 2.0, self.rho / max(self._row_sums.max(), 1e-30))
                rejects = 0
        return out

    def sample_states(self, rng, count):
        draws = rng.uniform(0.0, self.x_max, size=(count, self.dimension))
        return [StatePoint(tuple(row)) for row in draws]

    def metric(self, x, y):
        return float(np.linalg.norm(x.as_array() - y.as_array()))

    def state_contains(self, x):
        if x.dimension != self.dimension:
            return False
        v = x.as_array()
        return bool(np.all(v >= 0.0) and np.all(v <= self.x_max))


def make_waste_model(emission_matrix=None, revenue=None, curvature=None,
                     price_base=None, price_slope=None, kappa: float = 0.5,
                     rho: float | None = None, x_max: float = 1.0,
                     **extra) -> WasteModel:
    """Desk-scale default: three technologies, two pollutants."""
    if extra:
        raise ValidationError(f"unknown waste parameters {sorted(extra)}")
    if emission_matrix is None:
        emission_matrix = [[1.0, 0.5, 0.2], [0.3, 0.8, 0.6]]
    n = len(emission_matrix[0])
    m = len(emission_matrix)
    if revenue is None:
        revenue = [2.0, 1.5, 1.0][:n]
    if curvature is None:
        curvature = [1.0] * n
    if price_base is None:
        price_base = [0.5] * m
    if price_slope is None:
        price_slope = [0.4, 0.3][:m] if m <= 2 else [0.3] * m
    return WasteModel(emission_matrix, revenue, curvature, price_base,
                      price_slope, kappa, rho, x_max)
