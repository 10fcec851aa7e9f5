"""Descent solvers for relative optimization problems.

Models expose state-dependent utility estimates, move costs and feasible
neighborhoods; solvers walk them by accepting moves whose estimated net
expense is sufficiently negative; diagnostics audit the recorded runs.
"""

from .core import (DomainError, FeasibilityError, ModelFaultError, MoveRecord,
                   RelOptError, RelativeProblem, StatePoint, StationaryPoint,
                   Termination, Trajectory, ValidationError, over_estimate,
                   pure_expense_estimate, true_pure_expense, true_utility)
from .diagnostics import (AssumptionReport, ChainError, InvariantViolation,
                          boundedness_monitor, check_b1_conditions,
                          check_triangle_inequality, scan_overestimate_vs_cost,
                          stationarity_residual, update_assumption_report,
                          verify_descent_invariants)
from .models import make_model
from .solvers import (Budget, ScriptedPolicy, SearchMode, SearchPolicy,
                      SolveReport, ThresholdSchedule, find_improving,
                      scripted_candidates, sdm_solve, tdm_solve)

__version__ = "0.1.0"

__all__ = [
    "DomainError", "FeasibilityError", "ModelFaultError", "MoveRecord",
    "RelOptError", "RelativeProblem", "StatePoint", "StationaryPoint",
    "Termination", "Trajectory", "ValidationError", "over_estimate",
    "pure_expense_estimate", "true_pure_expense", "true_utility",
    "AssumptionReport", "ChainError", "InvariantViolation",
    "boundedness_monitor", "check_b1_conditions", "check_triangle_inequality",
    "scan_overestimate_vs_cost", "stationarity_residual",
    "update_assumption_report", "verify_descent_invariants", "make_model",
    "Budget", "ScriptedPolicy", "SearchMode", "SearchPolicy", "SolveReport",
    "ThresholdSchedule", "find_improving", "scripted_candidates", "sdm_solve",
    "tdm_solve", "__version__",
]
