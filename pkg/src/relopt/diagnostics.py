"""Run audits: stationarity residuals, assumption tracking, invariant checks.

Everything here is read-only with respect to models and re-derives its
verdicts either from fresh model evaluations (residuals, sampled scans) or
from recorded MoveRecord fields alone (descent invariants), so a saved
trajectory can be audited without re-running the solver.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .core import (DomainError, MoveRecord, RelOptError, RelativeProblem,
                   StatePoint, Trajectory, over_estimate,
                   pure_expense_estimate)

_TOL = 1e-9
_FLOAT_SLACK = 1e-12


class ChainError(RelOptError):
    """Moves fed to a report do not chain (from != previous to)."""


@dataclass
class AssumptionReport:
    """Streaming per-trajectory statistics for the convergence conditions.

    ``sum_b_minus_c_pos`` and ``tail_max_b_minus_c`` watch whether excess
    over-estimates [b - c]+ stay summable and die out; ``sum_b`` watches
    the raw over-estimate mass; ``a4pp_violations`` counts moves where the
    over-estimate exceeded the move cost; ``b1_min_offdiag_cost`` tracks
    the smallest strictly-positive-move cost seen.  The tail statistic
    covers the last ``window`` moves.
    """

    window: int = 20
    sum_b_minus_c_pos: float = 0.0
    tail_max_b_minus_c: float = 0.0
    sum_b: float = 0.0
    a4pp_violations: int = 0
    b1_min_offdiag_cost: float = math.inf
    triangle_violations: int = 0
    moves_seen: int = 0
    _tail: deque = field(default=None, repr=False)
    _last_to: StatePoint | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.window < 1:
            raise ValueError("window must be a positive integer")
        if self._tail is None:
            self._tail = deque(maxlen=self.window)

    def to_dict(self) -> dict:
        return {
            "window": self.window,
            "moves_seen": self.moves_seen,
            "sum_b_minus_c_pos": self.sum_b_minus_c_pos,
            "tail_max_b_minus_c": self.tail_max_b_minus_c,
            "sum_b": self.sum_b,
            "a4pp_violations": self.a4pp_violations,
            "b1_min_offdiag_cost": (None if math.isinf(self.b1_min_offdiag_cost)
                                    else self.b1_min_offdiag_cost),
            "triangle_violations": self.triangle_violations,
        }


def update_assumption_report(report: AssumptionReport,
                             move: MoveRecord) -> AssumptionReport:
    """Fold one accepted move into the report (mutates and returns it)."""
    if report._last_to is not None and move.from_point != report._last_to:
        raise ChainError(
            f"move {move.step_index} starts at {move.from_point.coords}, "
            f"expected {report._last_to.coords}")
    excess = max(move.b_value - move.c_value, 0.0)
    report.sum_b_minus_c_pos += excess
    report.sum_b += move.b_value
    report._tail.append(excess)
    report.tail_max_b_minus_c = max(report._tail)
    if move.b_value > move.c_value + _TOL:
        report.a4pp_violations += 1
    if move.from_point != move.to_point:
        report.b1_min_offdiag_cost = min(report.b1_min_offdiag_cost,
                                         move.c_value)
    report.moves_seen += 1
    report._last_to = move.to_point
    return report


def stationarity_residual(problem: RelativeProblem, x: StatePoint,
                          n_samples: int = 1024,
                          rng: np.random.Generator | None = None,
                          grid_points: int = 2048) -> float:
    """max(0, sup over probed y in D(x) of -f(x, y)).

    Zero means no probed candidate looked profitable.  Discrete models are
    enumerated exhaustively; one-dimensional models get a deterministic
    ``grid_points``-point grid on top of the random draws; everything else
    relies on sampling alone (a lower bound on the true residual).
    """
    if not problem.state_contains(x):
        raise DomainError(f"state {x.coords} is not in the state space")
    if rng is None:
        rng = np.random.default_rng(0)
    candidates: list[StatePoint]
    listing = problem.enumerate_feasible(x)
    if listing is not None:
        candidates = list(listing)
    else:
        candidates = []
        interval = problem.feasible_interval(x)
        if interval is not None:
            lo, hi = interval
            candidates.extend(StatePoint((v,))
                              for v in np.linspace(lo, hi, grid_points))
        if n_samples > 0:
            candidates.extend(problem.sample_feasible(x, rng, n_samples))
    worst = 0.0
    for y in candidates:
        if not problem.feasible_contains(x, y):
            continue
        worst = max(worst, -pure_expense_estimate(problem, x, y))
    return worst


def check_b1_conditions(problem: RelativeProblem, pairs: int = 1000,
                        rng: np.random.Generator | None = None,
                        delta: float | None = None) -> tuple[float, bool]:
    """Sampled check of the off-diagonal cost floor c(x, y) >= delta.

    Returns (min_cost, holds).  ``delta`` defaults to the model's declared
    ``b1_delta`` when present.  With no distinct pair sampled the condition
    is vacuous and holds; with no declared floor it cannot hold.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    if delta is None:
        delta = getattr(problem, "b1_delta", None)
    min_cost = math.inf
    distinct = False
    for _ in range(pairs):
        x, y = problem.sample_states(rng, 2)
        if x == y:
            continue
        distinct = True
        min_cost = min(min_cost, problem.move_cost(x, y))
    if not distinct:
        return min_cost, True
    holds = delta is not None and delta > 0.0 and min_cost >= delta - _FLOAT_SLACK
    return min_cost, bool(holds)


def check_triangle_inequality(problem: RelativeProblem, triples: int = 1000,
                              rng: np.random.Generator | None = None,
                              tol: float = _TOL) -> int:
    """Count sampled triples with c(x, z) + c(z, y) < c(x, y) - tol."""
    if rng is None:
        rng = np.random.default_rng(0)
    violations = 0
    for _ in range(triples):
        x, z, y = problem.sample_states(rng, 3)
        if problem.move_cost(x, z) + problem.move_cost(z, y) \
                < problem.move_cost(x, y) - tol:
            violations += 1
    return violations


def scan_overestimate_vs_cost(problem: RelativeProblem, pairs: int = 1000,
                              rng: np.random.Generator | None = None,
                              tol: float = _TOL) -> tuple[int, float]:
    """Sampled check of b(x, y) <= c(x, y) on feasible moves.

    Returns (violations, max_excess) over ``pairs`` draws of x in X and
    y in D(x).
    """
    if rng is None:
        rng = np.random.default_rng(0)
    violations = 0
    max_excess = -math.inf
    for _ in range(pairs):
        x, = problem.sample_states(rng, 1)
        y, = problem.sample_feasible(x, rng, 1)
        excess = over_estimate(problem, x, y) - problem.move_cost(x, y)
        max_excess = max(max_excess, excess)
        if excess > tol:
            violations += 1
    return violations, max_excess


@dataclass(frozen=True)
class InvariantViolation:
    move_index: int | None
    rule: str
    detail: str


def verify_descent_invariants(trajectory: Trajectory,
                              schedule=None) -> list[InvariantViolation]:
    """Audit a recorded run from its MoveRecord fields alone.

    Checks, per move: the chain (from == previous to), strict threshold
    clearance f < -delta, the utility-gain relation
    u(to) - u(from) > delta - [b - c]+, and the expense bound e <= f + b;
    and along the run: non-increasing thresholds and a non-positive running
    sum of f.  With ``schedule`` given, each recorded threshold must also
    be one of its levels.  Empty list means the run conforms.
    """
    out: list[InvariantViolation] = []
    prev_to = trajectory.initial
    prev_delta = math.inf
    running_f = 0.0
    schedule_values: list[float] = []
    if schedule is not None:
        level, value = 1, schedule.value(1)
        while value > 1e-18 and level <= 400:
            schedule_values.append(value)
            level += 1
            value = schedule.value(level)
    for move in trajectory.moves:
        k = move.step_index
        if move.from_point != prev_to:
            out.append(InvariantViolation(k, "chain",
                       f"move starts at {move.from_point.coords}, expected "
                       f"{prev_to.coords}"))
        if not move.f_value < -move.threshold_at_move:
            out.append(InvariantViolation(k, "threshold-clearance",
                       f"f={move.f_value!r} does not clear "
                       f"-{move.threshold_at_move!r}"))
        gain = move.u_to - move.u_from
        floor = move.threshold_at_move - max(move.b_value - move.c_value, 0.0)
        if not gain > floor - _FLOAT_SLACK:
            out.append(InvariantViolation(k, "utility-gain",
                       f"u gain {gain!r} not above {floor!r}"))
        if move.e_value > move.f_value + move.b_value + _FLOAT_SLACK:
            out.append(InvariantViolation(k, "expense-bound",
                       f"e={move.e_value!r} exceeds f+b"))
        if move.threshold_at_move > prev_delta:
            out.append(InvariantViolation(k, "threshold-monotone",
                       f"threshold rose to {move.threshold_at_move!r}"))
        if schedule_values and move.threshold_at_move != 0.0 and not any(
                abs(move.threshold_at_move - v) <= 1e-9 * max(v, 1.0)
                for v in schedule_values):
            out.append(InvariantViolation(k, "threshold-schedule",
                       f"{move.threshold_at_move!r} is not a schedule level"))
        running_f += move.f_value
        if running_f > _FLOAT_SLACK:
            out.append(InvariantViolation(k, "cumulative-expense",
                       f"running sum of f reached {running_f!r}"))
        prev_to = move.to_point
        prev_delta = move.threshold_at_move
    return out


def boundedness_monitor(trajectory: Trajectory) -> tuple[float, tuple[float, float]]:
    """(max coordinate norm over visited states, (min u, max u) along the run).

    The u range is (nan, nan) for a run with no moves, since utilities live
    on the records.
    """
    points = [trajectory.initial] + [m.to_point for m in trajectory.moves]
    max_norm = max(max(abs(c) for c in p.coords) for p in points)
    if not trajectory.moves:
        return max_norm, (math.nan, math.nan)
    u_values = [m.u_from for m in trajectory.moves] + \
               [m.u_to for m in trajectory.moves]
    return max_norm, (min(u_values), max(u_values))
