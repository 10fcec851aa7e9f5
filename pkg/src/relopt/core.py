"""Problem abstraction and per-move bookkeeping for relative optimization.

A model describes a system that can move from its current state x to nearby
states y inside a feasible neighborhood D(x).  Utility information is local:
from x the system sees only the estimate phi(x, y) for y in D(x), not the
exact utility of other states.  Moves are charged a cost c(x, y) >= 0.
Everything downstream works with four derived per-move values:

    u(x)     exact utility of the occupied state, phi(x, x)
    f(x, y)  estimated net expense of a move, u(x) + c(x, y) - phi(x, y)
    e(x, y)  actual net expense, u(x) + c(x, y) - u(y)
    b(x, y)  utility over-estimate of y seen from x, max(phi(x, y) - u(y), 0)

The identity e = f + (phi(x, y) - u(y)) ties the four together, and
e <= f + b follows.  Solvers accept moves with sufficiently negative f and
log them as MoveRecord entries on a Trajectory; diagnostics re-derive run
properties from the records alone.
"""

from __future__ import annotations

import abc
import enum
import math
from dataclasses import dataclass, field

import numpy as np


class RelOptError(Exception):
    """Base class for errors raised by this package."""


class DomainError(RelOptError):
    """A state lies outside the model's state space X."""


class FeasibilityError(RelOptError):
    """A candidate lies outside the feasible neighborhood D(x)."""


class ModelFaultError(RelOptError):
    """A model produced a non-finite value or a negative cost."""


class ValidationError(RelOptError):
    """Model parameters violate a documented constraint."""


@dataclass(frozen=True)
class StatePoint:
    """Immutable state: a coordinate tuple plus an optional discrete index."""

    coords: tuple[float, ...]
    discrete_id: int | None = None

    def __post_init__(self):
        coords = tuple(float(v) for v in self.coords)
        if not coords:
            raise ValueError("a state needs at least one coordinate")
        if not all(math.isfinite(v) for v in coords):
            raise ValueError("state coordinates must be finite")
        object.__setattr__(self, "coords", coords)

    @property
    def dimension(self) -> int:
        return len(self.coords)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=float)

    @classmethod
    def of(cls, *coords: float, discrete_id: int | None = None) -> "StatePoint":
        return cls(tuple(coords), discrete_id)


class RelativeProblem(abc.ABC):
    """Behavioral interface every model implements.

    ``utility_estimate`` is the only window onto utilities.  It must satisfy
    phi(x, x) = u(x) exactly, and is only meaningful for y in D(x); the
    wrapper operations below enforce that.  ``move_cost`` must be
    non-negative with c(x, x) = 0.  All methods are deterministic functions
    of their arguments (randomness enters only through the ``rng`` handles).

    ``move_index`` lets a model expose a run-position-dependent estimate
    (decaying learning error, for instance).  ``None`` means the stationary
    estimate; models without that feature ignore the argument.
    """

    @property
    @abc.abstractmethod
    def dimension(self) -> int:
        """Number of coordinates in a state."""

    @abc.abstractmethod
    def utility_estimate(self, x: StatePoint, y: StatePoint,
                         move_index: int | None = None) -> float:
        """phi(x, y): utility of y as estimated from x."""

    @abc.abstractmethod
    def move_cost(self, x: StatePoint, y: StatePoint) -> float:
        """c(x, y) >= 0, zero on the diagonal."""

    @abc.abstractmethod
    def feasible_contains(self, x: StatePoint, y: StatePoint) -> bool:
        """Whether y lies in D(x)."""

    @abc.abstractmethod
    def sample_feasible(self, x: StatePoint, rng: np.random.Generator,
                        count: int) -> list[StatePoint]:
        """Draw ``count`` candidates from D(x)."""

    @abc.abstractmethod
    def sample_states(self, rng: np.random.Generator,
                      count: int) -> list[StatePoint]:
        """Draw ``count`` states from X (used by diagnostics and tests)."""

    @abc.abstractmethod
    def metric(self, x: StatePoint, y: StatePoint) -> float:
        """Distance d(x, y) on X."""

    @abc.abstractmethod
    def state_contains(self, x: StatePoint) -> bool:
        """Whether x lies in X."""

    def enumerate_feasible(self, x: StatePoint) -> list[StatePoint] | None:
        """Full listing of D(x) for discrete models, else None."""
        return None

    def feasible_interval(self, x: StatePoint) -> tuple[float, float] | None:
        """(lo, hi) bounds of D(x) for one-dimensional models, else None."""
        return None


def _checked(value: float, what: str) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ModelFaultError(f"model produced a non-finite {what}: {value!r}")
    return value


def _checked_cost(problem: RelativeProblem, x: StatePoint, y: StatePoint) -> float:
    c = _checked(problem.move_cost(x, y), "move cost")
    if c < 0.0:
        raise ModelFaultError(f"negative move cost {c!r}")
    return c


def true_utility(problem: RelativeProblem, x: StatePoint) -> float:
    """u(x) = phi(x, x).  Raises DomainError for x outside X."""
    if not problem.state_contains(x):
        raise DomainError(f"state {x.coords} is not in the state space")
    return _checked(problem.utility_estimate(x, x), "utility estimate")


def pure_expense_estimate(problem: RelativeProblem, x: StatePoint, y: StatePoint,
                          move_index: int | None = None) -> float:
    """f(x, y) = u(x) + c(x, y) - phi(x, y), for y in D(x).

    f(x, x) == 0.0 exactly; negative values mark moves the estimate
    considers profitable.  Raises FeasibilityError for y outside D(x).
    """
    if not problem.feasible_contains(x, y):
        raise FeasibilityError(
            f"candidate {y.coords} is not feasible from {x.coords}")
    u_x = _checked(problem.utility_estimate(x, x, move_index), "utility estimate")
    c = _checked_cost(problem, x, y)
    phi = _checked(problem.utility_estimate(x, y, move_index), "utility estimate")
    return u_x + c - phi


def true_pure_expense(problem: RelativeProblem, x: StatePoint, y: StatePoint) -> float:
    """e(x, y) = u(x) + c(x, y) - u(y).  Diagnostic-only: uses exact utilities."""
    if not problem.state_contains(x) or not problem.state_contains(y):
        raise DomainError("both endpoints must lie in the state space")
    u_x = _checked(problem.utility_estimate(x, x), "utility estimate")
    u_y = _checked(problem.utility_estimate(y, y), "utility estimate")
    return u_x + _checked_cost(problem, x, y) - u_y


def over_estimate(problem: RelativeProblem, x: StatePoint, y: StatePoint,
                  move_index: int | None = None) -> float:
    """b(x, y) = max(phi(x, y) - u(y), 0), for y in D(x)."""
    if not problem.feasible_contains(x, y):
        raise FeasibilityError(
            f"candidate {y.coords} is not feasible from {x.coords}")
    phi = _checked(problem.utility_estimate(x, y, move_index), "utility estimate")
    u_y = _checked(problem.utility_estimate(y, y), "utility estimate")
    return max(phi - u_y, 0.0)


class Termination(enum.Enum):
    """Why a run stopped."""

    THRESHOLD_EXHAUSTED = "ThresholdExhausted"
    BUDGET_EXHAUSTED = "BudgetExhausted"
    DISCRETE_STOP = "DiscreteStop"


@dataclass(frozen=True)
class MoveRecord:
    """One accepted move with every audited quantity frozen at acceptance."""

    step_index: int
    from_point: StatePoint
    to_point: StatePoint
    f_value: float
    e_value: float
    b_value: float
    c_value: float
    u_from: float
    u_to: float
    threshold_at_move: float


@dataclass(frozen=True)
class StationaryPoint:
    """State recorded when a threshold level failed to produce a move."""

    level: int
    point: StatePoint
    threshold: float


@dataclass
class Trajectory:
    """Ordered move log of a single run."""

    initial: StatePoint
    moves: list[MoveRecord] = field(default_factory=list)
    stationary_points: list[StationaryPoint] = field(default_factory=list)
    termination: Termination | None = None

    @property
    def final_point(self) -> StatePoint:
        return self.moves[-1].to_point if self.moves else self.initial

    @property
    def cumulative_expense_estimate(self) -> float:
        return sum(m.f_value for m in self.moves)
