import dataclasses
import math

import numpy as np
import pytest

from relopt import (AssumptionReport, Budget, ChainError, DomainError,
                    MoveRecord, StatePoint, Termination, ThresholdSchedule,
                    Trajectory, boundedness_monitor, check_b1_conditions,
                    check_triangle_inequality, make_model, over_estimate,
                    pure_expense_estimate, scan_overestimate_vs_cost,
                    stationarity_residual, tdm_solve, true_pure_expense,
                    true_utility, update_assumption_report,
                    verify_descent_invariants)
from relopt.models import SquaredCostLine, make_discrete_grid

WINDOW = 20


# ------------------------------------------------------------------ residual

def test_residual_values_example31():
    m = make_model("example31")
    assert stationarity_residual(m, StatePoint((0.0,))) == pytest.approx(
        0.005, abs=1e-12)
    assert stationarity_residual(m, StatePoint((1.0 / 12.0,))) <= 1e-9


def test_residual_values_example32():
    m = make_model("example32")
    assert stationarity_residual(m, StatePoint((0.25,))) == 0.0
    assert stationarity_residual(m, StatePoint((0.5,))) == 0.0
    for v in (0.75, 1.0):
        assert stationarity_residual(m, StatePoint((v,))) <= 1e-9


def test_residual_values_example41():
    m = make_model("example41")
    assert stationarity_residual(m, StatePoint((0.5,))) == 0.5
    assert stationarity_residual(m, StatePoint((1.0,))) == 0.0


def test_residual_rejects_outside_states():
    with pytest.raises(DomainError):
        stationarity_residual(make_model("example31"), StatePoint((1.2,)))


# ---------------------------------------------------------- condition checks

class _OnePointModel:
    """Degenerate single-state model; everything is the same point."""

    dimension = 1

    def sample_states(self, rng, count):
        return [StatePoint((0.5,))] * count

    def move_cost(self, x, y):
        return 0.0


def test_b1_check_on_grid_and_costless_models():
    g = make_discrete_grid()
    min_cost, holds = check_b1_conditions(g, pairs=400)
    assert holds
    assert min_cost == g.delta_cost
    min_cost, holds = check_b1_conditions(make_model("example41"), pairs=200,
                                          delta=0.01)
    assert (min_cost, holds) == (0.0, False)
    # no declared floor at all
    _, holds = check_b1_conditions(make_model("example41"), pairs=50)
    assert not holds


def test_b1_check_is_vacuous_without_distinct_pairs():
    min_cost, holds = check_b1_conditions(_OnePointModel(), pairs=50)
    assert holds
    assert math.isinf(min_cost)


def test_triangle_check():
    assert check_triangle_inequality(make_model("telecom"), triples=300) == 0
    assert check_triangle_inequality(make_model("example31"), triples=300) == 0
    assert check_triangle_inequality(SquaredCostLine(), triples=300) > 0


def test_overestimate_scan():
    violations, excess = scan_overestimate_vs_cost(make_model("waste"),
                                                   pairs=300)
    assert violations == 0
    violations, excess = scan_overestimate_vs_cost(make_model("example31"),
                                                   pairs=300)
    assert violations > 0
    assert excess > 0.0


# --------------------------------------------------------- streaming report

def _move(k, a, b, f, e, bv, c, ua, ub, delta=0.0):
    return MoveRecord(k, StatePoint((a,)), StatePoint((b,)), f, e, bv, c,
                      ua, ub, delta)


def test_assumption_report_accumulates():
    rep = AssumptionReport(window=2)
    update_assumption_report(rep, _move(0, 0.0, 0.1, -0.1, -0.1, 0.3, 0.1,
                                        0.0, 0.1))
    update_assumption_report(rep, _move(1, 0.1, 0.2, -0.1, -0.1, 0.05, 0.1,
                                        0.1, 0.2))
    assert rep.moves_seen == 2
    assert rep.sum_b == pytest.approx(0.35)
    assert rep.sum_b_minus_c_pos == pytest.approx(0.2)
    assert rep.tail_max_b_minus_c == pytest.approx(0.2)
    assert rep.a4pp_violations == 1
    assert rep.b1_min_offdiag_cost == 0.1
    update_assumption_report(rep, _move(2, 0.2, 0.3, -0.1, -0.1, 0.0, 0.1,
                                        0.2, 0.3))
    # window of 2: the early excess has rolled out
    assert rep.tail_max_b_minus_c == 0.0
    d = rep.to_dict()
    assert d["moves_seen"] == 3 and d["b1_min_offdiag_cost"] == 0.1


def test_assumption_report_requires_chained_moves():
    rep = AssumptionReport()
    update_assumption_report(rep, _move(0, 0.0, 0.1, -0.1, -0.1, 0.0, 0.0,
                                        0.0, 0.1))
    with pytest.raises(ChainError):
        update_assumption_report(rep, _move(1, 0.5, 0.6, -0.1, -0.1, 0.0, 0.0,
                                            0.5, 0.6))


def test_fresh_report_serializes_missing_floor_as_none():
    assert AssumptionReport().to_dict()["b1_min_offdiag_cost"] is None


# --------------------------------------------------------------- invariants

def _clean_two_move_trajectory():
    moves = [
        _move(0, 0.0, 0.3, -0.3, -0.3, 0.0, 0.0, 0.0, 0.3, delta=0.1),
        _move(1, 0.3, 0.6, -0.3, -0.3, 0.0, 0.0, 0.3, 0.6, delta=0.05),
    ]
    return Trajectory(initial=StatePoint((0.0,)), moves=moves,
                      stationary_points=[],
                      termination=Termination.THRESHOLD_EXHAUSTED)


def test_invariants_pass_on_a_clean_run():
    t = _clean_two_move_trajectory()
    assert verify_descent_invariants(t) == []
    assert verify_descent_invariants(t, ThresholdSchedule(0.1, 0.5, 1e-6)) == []


def test_invariants_flag_tampered_records():
    t = _clean_two_move_trajectory()
    t.moves[1] = dataclasses.replace(t.moves[1], f_value=0.1)
    rules = {v.rule for v in verify_descent_invariants(t)}
    assert "threshold-clearance" in rules

    t = _clean_two_move_trajectory()
    t.moves[1] = dataclasses.replace(t.moves[1], from_point=StatePoint((0.9,)))
    rules = {v.rule for v in verify_descent_invariants(t)}
    assert "chain" in rules

    t = _clean_two_move_trajectory()
    t.moves[1] = dataclasses.replace(t.moves[1], threshold_at_move=0.2)
    rules = {v.rule for v in verify_descent_invariants(t)}
    assert "threshold-monotone" in rules

    t = _clean_two_move_trajectory()
    t.moves[1] = dataclasses.replace(t.moves[1], u_to=0.3)
    rules = {v.rule for v in verify_descent_invariants(t)}
    assert "utility-gain" in rules

    t = _clean_two_move_trajectory()
    t.moves[1] = dataclasses.replace(t.moves[1], e_value=0.5)
    rules = {v.rule for v in verify_descent_invariants(t)}
    assert "expense-bound" in rules

    t = _clean_two_move_trajectory()
    t.moves[1] = dataclasses.replace(t.moves[1], threshold_at_move=0.07)
    rules = {v.rule for v in
             verify_descent_invariants(t, ThresholdSchedule(0.1, 0.5, 1e-6))}
    assert "threshold-schedule" in rules


def test_invariants_pass_on_solver_output():
    r = tdm_solve(make_model("example32"), StatePoint((0.0,)), seed=1,
                  budget=Budget(max_moves=120))
    assert verify_descent_invariants(r.trajectory, ThresholdSchedule()) == []


def test_boundedness_monitor():
    r = tdm_solve(make_model("example32"), StatePoint((0.0,)), seed=1,
                  budget=Budget(max_moves=60))
    max_norm, (u_lo, u_hi) = boundedness_monitor(r.trajectory)
    assert max_norm <= 1.0
    assert 0.75 <= u_lo <= u_hi <= 1.0
    empty = Trajectory(initial=StatePoint((0.3,)))
    norm, (lo, hi) = boundedness_monitor(empty)
    assert norm == 0.3
    assert math.isnan(lo) and math.isnan(hi)


# ------------------------------------------------------------- tail decay

def _walk_records(model, zs):
    out = []
    for k, (a, b) in enumerate(zip(zs, zs[1:])):
        x, y = StatePoint((a,)), StatePoint((b,))
        out.append(MoveRecord(k, x, y,
                              pure_expense_estimate(model, x, y),
                              true_pure_expense(model, x, y),
                              over_estimate(model, x, y),
                              model.move_cost(x, y),
                              true_utility(model, x), true_utility(model, y),
                              0.0))
    return out


def _tail_series(moves, window=WINDOW):
    rep = AssumptionReport(window=window)
    series = []
    for mv in moves:
        update_assumption_report(rep, mv)
        series.append(rep.tail_max_b_minus_c)
    return series


def test_tail_overestimate_dies_out_on_convergent_walks():
    m = make_model("example31")
    z, zs = 0.0, [0.0]
    for _ in range(150):
        _, hi = m.feasible_interval(StatePoint((z,)))
        z = 0.5 * (z + hi)
        zs.append(z)
    series = _tail_series(_walk_records(m, zs))
    assert all(b <= a + 1e-15 for a, b in zip(series[WINDOW:], series[WINDOW + 1:]))
    assert series[-1] <= 1e-4

    m = make_model("example32")
    z, zs = 0.0, [0.0]
    for _ in range(60):
        z = z + 0.5 * (0.25 - z)
        zs.append(z)
    series = _tail_series(_walk_records(m, zs))
    assert all(b <= a + 1e-15 for a, b in zip(series[WINDOW:], series[WINDOW + 1:]))
    assert series[-1] <= 1e-12


def test_tail_overestimate_on_recorded_descent_runs():
    # short run: the per-move over-estimates themselves shrink
    r = tdm_solve(make_model("example31"), StatePoint((0.0,)), seed=3)
    bs = [mv.b_value for mv in r.trajectory.moves]
    assert len(bs) >= 2
    assert all(b < a for a, b in zip(bs, bs[1:]))

    # long oscillating run: spikes recur, but the tail ends well below the
    # peak and the report agrees with a recount over the last window
    r = tdm_solve(make_model("example32"), StatePoint((0.0,)), seed=1,
                  budget=Budget(max_moves=400))
    excesses = [max(mv.b_value - mv.c_value, 0.0) for mv in r.trajectory.moves]
    tail = [max(excesses[k - WINDOW:k])
            for k in range(WINDOW, len(excesses) + 1)]
    assert max(tail) == tail[0]
    assert tail[-1] <= 0.5 * max(tail)
    assert r.assumption_report.tail_max_b_minus_c == tail[-1]
