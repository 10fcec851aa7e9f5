"""Descent solvers over relative problems.

Threshold descent (``tdm_solve``) accepts only candidates whose estimated
expense clears a strictly negative threshold, f(x, y) < -delta_l.  When a
level's search comes up empty the current state is recorded as that level's
stationary point and the threshold shrinks geometrically; the run stops
once the threshold falls below its floor and still nothing clears it.

Simple descent (``sdm_solve``) accepts any candidate with f(x, y) < 0 and
terminates only because a model's per-move cost floor caps how many
improving moves exist (or because candidates run out).  On models that
enumerate their neighborhoods a failed exhaustive search certifies the
final state; sampled stalls certify nothing.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .core import (DomainError, MoveRecord, RelativeProblem, StatePoint,
                   StationaryPoint, Termination, Trajectory, ValidationError,
                   over_estimate, pure_expense_estimate, true_pure_expense,
                   true_utility)
from .diagnostics import (AssumptionReport, stationarity_residual,
                          update_assumption_report)


class SearchMode(enum.Enum):
    FIRST_IMPROVING = "FirstImproving"
    BEST_OF_BATCH = "BestOfBatch"


@dataclass
class SearchPolicy:
    """Sampled candidate search: M draws per round, up to R rounds.

    FirstImproving returns the first candidate that clears the threshold;
    BestOfBatch finishes the round and returns the best clearer.  Fresh
    draws every call; nothing is reused across levels.
    """

    mode: SearchMode = SearchMode.FIRST_IMPROVING
    samples_per_round: int = 64
    rounds_before_stall: int = 4

    def __post_init__(self):
        if self.samples_per_round < 1 or self.rounds_before_stall < 1:
            raise ValidationError("samples_per_round and rounds_before_stall "
                                  "must be positive")


class ScriptedPolicy:
    """Candidate source that replays a fixed sequence instead of sampling.

    Points are consumed in order across searches; entries outside D(x) are
    skipped and counted in ``skipped_infeasible``.  An exhausted script
    behaves as a failed search.
    """

    def __init__(self, points):
        self._queue = deque(points)
        self.skipped_infeasible = 0

    def __len__(self) -> int:
        return len(self._queue)


def scripted_candidates(points) -> ScriptedPolicy:
    return ScriptedPolicy(points)


@dataclass(frozen=True)
class ThresholdSchedule:
    """Geometric threshold ladder delta_l = delta0 * gamma**(l-1)."""

    delta0: float = 0.1
    gamma: float = 0.5
    delta_min: float = 1e-6

    def __post_init__(self):
        if not self.delta0 > 0.0:
            raise ValidationError("delta0 must be positive")
        if not 0.0 < self.gamma < 1.0:
            raise ValidationError("gamma must lie strictly between 0 and 1")
        if not 0.0 <= self.delta_min < self.delta0:
            raise ValidationError("delta_min must satisfy 0 <= delta_min < delta0")

    def value(self, level: int) -> float:
        if level < 1:
            raise ValueError("levels are 1-based")
        return self.delta0 * self.gamma ** (level - 1)


@dataclass
class Budget:
    max_moves: int = 100_000
    max_evaluations: int = 10_000_000


@dataclass
class SolveReport:
    trajectory: Trajectory
    final_state: StatePoint
    final_threshold: float
    residual_estimate: float
    assumption_report: AssumptionReport
    rng_seed: int
    evaluations_used: int


class _BudgetExceeded(Exception):
    pass


@dataclass
class _RunStats:
    evaluations: int = 0


def _eval_estimate(problem, x, y, move_index, stats, max_evaluations):
    if stats is not None:
        if max_evaluations is not None and stats.evaluations >= max_evaluations:
            raise _BudgetExceeded
        stats.evaluations += 1
    return pure_expense_estimate(problem, x, y, move_index)


def _search(problem, x, delta, policy, rng, move_index, stats, max_evaluations):
    """Returns (candidate_or_None, search_was_exhaustive)."""
    if isinstance(policy, ScriptedPolicy):
        while policy._queue:
            y = policy._queue.popleft()
            if not (problem.state_contains(y) and problem.feasible_contains(x, y)):
                policy.skipped_infeasible += 1
                continue
            f = _eval_estimate(problem, x, y, move_index, stats, max_evaluations)
            if f < -delta:
                return y, False
        return None, False

    listing = problem.enumerate_feasible(x)
    if listing is not None:
        best, best_f = None, None
        for y in listing:
            f = _eval_estimate(problem, x, y, move_index, stats, max_evaluations)
            if f < -delta:
                if policy.mode is SearchMode.FIRST_IMPROVING:
                    return y, True
                if best is None or f < best_f:
                    best, best_f = y, f
        return best, True

    for _ in range(policy.rounds_before_stall):
        best, best_f = None, None
        for y in problem.sample_feasible(x, rng, policy.samples_per_round):
            f = _eval_estimate(problem, x, y, move_index, stats, max_evaluations)
            if f < -delta:
                if policy.mode is SearchMode.FIRST_IMPROVING:
                    return y, False
                if best is None or f < best_f:
                    best, best_f = y, f
        if best is not None:
            return best, False
    return None, False


def find_improving(problem: RelativeProblem, x: StatePoint, delta: float,
                   policy, rng: np.random.Generator,
                   move_index: int | None = None) -> StatePoint | None:
    """One candidate with f(x, y) < -delta, or None if the search failed.

    A None from an enumerating model is definitive; a None from a sampled
    search only means M*R draws failed.  Never returns x itself, since
    f(x, x) == 0 cannot clear a non-negative threshold.
    """
    candidate, _ = _search(problem, x, delta, policy, rng, move_index,
                           stats=None, max_evaluations=None)
    return candidate


def _record_move(problem, x, y, step_index, delta):
    f = pure_expense_estimate(problem, x, y, step_index)
    move = MoveRecord(
        step_index=step_index,
        from_point=x,
        to_point=y,
        f_value=f,
        e_value=true_pure_expense(problem, x, y),
        b_value=over_estimate(problem, x, y, step_index),
        c_value=problem.move_cost(x, y),
        u_from=true_utility(problem, x),
        u_to=true_utility(problem, y),
        threshold_at_move=delta,
    )
    assert move.f_value < -delta
    return move


def _finish(problem, trajectory, z, delta, report, rng, seed, stats):
    residual = stationarity_residual(problem, z, n_samples=1024, rng=rng)
    return SolveReport(
        trajectory=trajectory,
        final_state=z,
        final_threshold=delta,
        residual_estimate=residual,
        assumption_report=report,
        rng_seed=seed,
        evaluations_used=stats.evaluations,
    )


def tdm_solve(problem: RelativeProblem, x0: StatePoint,
              schedule: ThresholdSchedule | None = None, policy=None,
              budget: Budget | None = None, seed: int = 0) -> SolveReport:
    """Threshold descent from x0.

    Runs levels l = 1, 2, ... with thresholds from ``schedule``; every
    accepted move strictly clears the current threshold, every failed level
    records a stationary point, and the run ends when the threshold is
    below ``delta_min`` and still fails, or when the budget runs out.
    Identical arguments reproduce the trajectory bit for bit.
    """
    schedule = schedule if schedule is not None else ThresholdSchedule()
    policy = policy if policy is not None else SearchPolicy()
    budget = budget if budget is not None else Budget()
    if not problem.state_contains(x0):
        raise DomainError(f"starting state {x0.coords} is not in the state space")
    rng = np.random.default_rng(seed)
    stats = _RunStats()
    trajectory = Trajectory(initial=x0)
    report = AssumptionReport()
    z = x0
    level = 1
    delta = schedule.value(level)
    while True:
        if len(trajectory.moves) >= budget.max_moves:
            trajectory.termination = Termination.BUDGET_EXHAUSTED
            break
        try:
            y, _ = _search(problem, z, delta, policy, rng,
                           len(trajectory.moves), stats, budget.max_evaluations)
        except _BudgetExceeded:
            trajectory.termination = Termination.BUDGET_EXHAUSTED
            break
        if y is None:
            trajectory.stationary_points.append(StationaryPoint(level, z, delta))
            if delta < schedule.delta_min:
                trajectory.termination = Termination.THRESHOLD_EXHAUSTED
                break
            level += 1
            delta = schedule.value(level)
            continue
        move = _record_move(problem, z, y, len(trajectory.moves), delta)
        trajectory.moves.append(move)
        update_assumption_report(report, move)
        z = y
    return _finish(problem, trajectory, z, delta, report, rng, seed, stats)


def sdm_solve(problem: RelativeProblem, x0: StatePoint, policy=None,
              budget: Budget | None = None, seed: int = 0) -> SolveReport:
    """Simple descent from x0: accept anything with f < 0 until nothing is.

    Terminates DiscreteStop when a failed search enumerated D(x)
    exhaustively (certifying the final state), ThresholdExhausted when a
    sampled or scripted search merely stalled.
    """
    policy = policy if policy is not None else SearchPolicy()
    budget = budget if budget is not None else Budget()
    if not problem.state_contains(x0):
        raise DomainError(f"starting state {x0.coords} is not in the state space")
    rng = np.random.default_rng(seed)
    stats = _RunStats()
    trajectory = Trajectory(initial=x0)
    report = AssumptionReport()
    z = x0
    while True:
        if len(trajectory.moves) >= budget.max_moves:
            trajectory.termination = Termination.BUDGET_EXHAUSTED
            break
        try:
            y, exhaustive = _search(problem, z, 0.0, policy, rng,
                                    len(trajectory.moves), stats,
                                    budget.max_evaluations)
        except _BudgetExceeded:
            trajectory.termination = Termination.BUDGET_EXHAUSTED
            break
        if y is None:
            trajectory.termination = (Termination.DISCRETE_STOP if exhaustive
                                      else Termination.THRESHOLD_EXHAUSTED)
            break
        move = _record_move(problem, z, y, len(trajectory.moves), 0.0)
        trajectory.moves.append(move)
        update_assumption_report(report, move)
        z = y
    return _finish(problem, trajectory, z, 0.0, report, rng, seed, stats)
