"""Link-capacity allocation for a network operator with fixed-path demands.

A state x assigns capacity x_j to each of n links, subject to per-link
ceilings alpha_j and a shared budget sum_j beta_j x_j <= C.  Demand i ships
along a fixed set of links ``paths[i]`` and yields mu_i(z_i) when granted
rate z_i, with mu_i either w_i * z or w_i * ln(1 + z).  The utility of a
capacity state is the optimal value of the inner allocation program

    u(x) = max  sum_i mu_i(z_i)
           s.t. sum_{i through j} z_i <= x_j   for every link j,
                0 <= z_i <= d_i,

which is evaluated exactly for any candidate, so the estimate phi(x, y) =
u(y) carries no over-estimate (b == 0).  Reconfiguration is what costs:
c(x, y) = sum_j gamma_j |y_j - x_j|, and a move may change no link by more
than the neighborhood radii r1 (engineering) and r2 (contractual).

The inner program is a small LP (linear mu) or smooth concave program
(log mu); it is solved with scipy and the result is re-projected so the
returned allocation is exactly feasible.  ``inner_brute_force_oracle``
cross-checks the value by dense grid enumeration for up to three demands.
"""

from __future__ import annotations

import numpy as np
from scipy import optimize

from ..core import ModelFaultError, RelativeProblem, StatePoint, ValidationError

_KINDS = ("linear", "log")


class TelecomModel(RelativeProblem):
    def __init__(self, paths, alpha, beta, capacity: float, gamma,
                 demand_caps, weights, kind: str = "linear",
                 r1: float | None = None, r2: float | None = None,
                 inner_tol: float = 1e-6):
        alpha = np.asarray(alpha, dtype=float)
        if alpha.ndim != 1 or alpha.size == 0:
            raise ValidationError("alpha must be a non-empty vector")
        n = alpha.size
        if np.any(alpha <= 0.0):
            raise ValidationError("alpha entries must be positive")
        self.alpha = alpha
        self.beta = self._vector(beta, n, "beta", positive=True)
        self.gamma = self._vector(gamma, n, "gamma", positive=True)
        if not capacity > 0.0:
            raise ValidationError("capacity must be positive")
        self.capacity = float(capacity)
        if not paths:
            raise ValidationError("at least one demand path is required")
        m = len(paths)
        self.paths = []
        for i, path in enumerate(paths):
            links = sorted(set(int(j) for j in path))
            if not links:
                raise ValidationError(f"path {i} must use at least one link")
            if links[0] < 0 or links[-1] >= n:
                raise ValidationError(f"path {i} names a link outside 0..{n - 1}")
            self.paths.append(links)
        self.demand_caps = self._vector(demand_caps, m, "demand_caps", positive=True)
        self.weights = self._vector(weights, m, "weights", positive=True)
        if kind not in _KINDS:
            raise ValidationError(f"kind must be one of {_KINDS}")
        self.kind = kind
        default_r = 0.1 * float(alpha.max())
        self.r1 = float(default_r if r1 is None else r1)
        self.r2 = float(default_r if r2 is None else r2)
        if self.r1 <= 0.0 or self.r2 <= 0.0:
            raise ValidationError("move radii r1 and r2 must be positive")
        self.inner_tol = float(inner_tol)
        # link-demand incidence: row j marks the demands crossing link j
        self.incidence = np.zeros((n, m))
        for i, links in enumerate(self.paths):
            for j in links:
                self.incidence[j, i] = 1.0
        self._value_cache: dict[tuple[float, ...], float] = {}

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

    @property
    def dimension(self) -> int:
        return self.alpha.size

    @property
    def move_radius(self) -> float:
        return min(self.r1, self.r2)

    def rate_objective(self, z: np.ndarray):
        if self.kind == "linear":
            return np.asarray(z) @ self.weights
        return (self.weights * np.log1p(np.asarray(z))).sum(axis=-1)

    def _value(self, x: StatePoint) -> float:
        key = x.coords
        if key not in self._value_cache:
            _, value = inner_solve(self, x, self.inner_tol)
            self._value_cache[key] = value
        return self._value_cache[key]

    def utility_estimate(self, x, y, move_index=None):
        return self._value(y)

    def move_cost(self, x, y):
        return float(self.gamma @ np.abs(y.as_array() - x.as_array()))

    def feasible_contains(self, x, y):
        if not self.state_contains(y):
            return False
        return float(np.abs(y.as_array() - x.as_array()).max()) <= self.move_radius

    def sample_feasible(self, x, rng, count):
        xv = x.as_array()
        r = self.move_radius
        lo = np.maximum(xv - r, 0.0)
        hi = np.minimum(xv + r, self.alpha)
        out: list[StatePoint] = []
        while len(out) < count:
            batch = rng.uniform(lo, hi, size=(64, self.dimension))
            ok = batch @ self.beta <= self.capacity
            for row in batch[ok]:
                out.append(StatePoint(tuple(row)))
                if len(out) == count:
                    break
        return out

    def sample_states(self, rng, count):
        out: list[StatePoint] = []
        while len(out) < count:
            batch = rng.uniform(0.0, self.alpha, size=(64, self.dimension))
            ok = batch @ self.beta <= self.capacity
            for row in batch[ok]:
                out.append(StatePoint(tuple(row)))
                if len(out) == count:
                    break
        return out

    def metric(self, x, y):
        return float(np.linalg.norm(x.as_array() - y.as_array()))

    def state_contains(self, x):
        if x.dimension != self.dimension:
            return False
        v = x.as_array()
        if np.any(v < 0.0) or np.any(v > self.alpha):
            return False
        return float(self.beta @ v) <= self.capacity + 1e-12


def _project_rates(model: TelecomModel, x: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Force exact feasibility: box clip, then scale down overloaded links."""
    z = np.clip(z, 0.0, model.demand_caps)
    for j in range(model.dimension):
        row = model.incidence[j]
        load = float(row @ z)
        if load > x[j] and load > 0.0:
            z = np.where(row > 0.0, z * (x[j] / load), z)
    return z


def inner_solve(model: TelecomModel, x: StatePoint,
                tol: float = 1e-6) -> tuple[np.ndarray, float]:
    """Optimal rate allocation and value of the inner program at capacities x.

    Returns (z, value) with z exactly feasible.  The value is accurate to
    roughly ``tol`` or better.
    """
    xv = np.minimum(x.as_array(), model.alpha)
    xv = np.maximum(xv, 0.0)
    m = len(model.paths)
    if model.kind == "linear":
        res = optimize.linprog(
            c=-model.weights, A_ub=model.incidence, b_ub=xv,
            bounds=[(0.0, float(d)) for d in model.demand_caps],
            method="highs")
        if res.status != 0 or res.x is None:
            raise ModelFaultError(f"inner allocation LP failed: {res.message}")
        z = np.asarray(res.x, dtype=float)
    else:
        w = model.weights

        def negated(z):
            return -float(w @ np.log1p(z))

        def negated_grad(z):
            return -w / (1.0 + z)

        constraints = [{
            "type": "ineq",
            "fun": (lambda z, j=j: float(xv[j] - model.incidence[j] @ z)),
            "jac": (lambda z, j=j: -model.incidence[j]),
        } for j in range(model.dimension)]
        res = optimize.minimize(
            negated, x0=np.zeros(m), jac=negated_grad, method="SLSQP",
            bounds=[(0.0, float(d)) for d in model.demand_caps],
            constraints=constraints,
            options={"ftol": min(tol * 1e-3, 1e-10), "maxiter": 500})
        if res.x is None or not np.all(np.isfinite(res.x)):
            raise ModelFaultError(f"inner allocation solve failed: {res.message}")
        z = np.asarray(res.x, dtype=float)
    z = _project_rates(model, xv, z)
    return z, float(model.rate_objective(z))


def _demand_grid(model: TelecomModel, i: int, grid_step: float) -> np.ndarray:
    d = float(model.demand_caps[i])
    return np.linspace(0.0, d, max(1, round(d / grid_step)) + 1)


def oracle_error_bound(model: TelecomModel, grid_step: float) -> float:
    """How far below the true optimum the grid enumeration can land."""
    bound = 0.0
    for i in range(len(model.paths)):
        grid = _demand_grid(model, i, grid_step)
        bound += float(model.weights[i]) * float(grid[1] - grid[0]) if grid.size > 1 else 0.0
    return bound


def inner_brute_force_oracle(model: TelecomModel, x: StatePoint,
                             grid_step: float) -> float:
    """Dense-grid value of the inner program; independent check for inner_solve.

    Enumerates every feasible combination of per-demand rates on grids of
    pitch ~grid_step, so it is limited to three demands.
    """
    m = len(model.paths)
    if m > 3:
        raise ValidationError("the grid oracle handles at most 3 demands")
    xv = np.minimum(np.maximum(x.as_array(), 0.0), model.alpha)
    grids = [_demand_grid(model, i, grid_step) for i in range(m)]
    best = -np.inf
    if m == 1:
        block = grids[0][:, None]
        best = _best_on_block(model, xv, block)
    else:
        tail = np.stack([g.ravel() for g in np.meshgrid(*grids[1:], indexing="ij")],
                        axis=-1)
        for z0 in grids[0]:
            block = np.concatenate(
                [np.full((tail.shape[0], 1), z0), tail], axis=1)
            best = max(best, _best_on_block(model, xv, block))
    return float(best)


def _best_on_block(model: TelecomModel, xv: np.ndarray,
                   block: np.ndarray) -> float:
    loads = block @ model.incidence.T
    ok = np.all(loads <= xv + 1e-12, axis=1)
    if not ok.any():
        return -np.inf
    return float(model.rate_objective(block[ok]).max())


def make_telecom_model(paths=None, alpha=None, beta=None, capacity=None,
                       gamma=None, demand_caps=None, weights=None,
                       kind: str = "linear", r1=None, r2=None,
                       inner_tol: float = 1e-6, **extra) -> TelecomModel:
    """Desk-scale default: three links carrying three overlapping demands."""
    if extra:
        raise ValidationError(f"unknown telecom parameters {sorted(extra)}")
    if paths is None:
        paths = [[0], [0, 1], [1, 2]]
    if alpha is None:
        alpha = [1.0] * (1 + max(max(p) for p in paths if p))
    n = len(alpha)
    if beta is None:
        beta = [1.0] * n
    if capacity is None:
        capacity = 0.85 * float(np.asarray(beta) @ np.asarray(alpha))
    if gamma is None:
        gamma = [0.1] * n
    if demand_caps is None:
        demand_caps = [0.8, 0.9, 0.7][:len(paths)]
    if weights is None:
        weights = [2.0, 1.0, 1.5][:len(paths)]
    return TelecomModel(paths, alpha, beta, capacity, gamma, demand_caps,
                        weights, kind, r1, r2, inner_tol)
