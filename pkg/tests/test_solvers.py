import numpy as np
import pytest

from relopt import (Budget, DomainError, SearchMode, SearchPolicy, StatePoint,
                    Termination, ThresholdSchedule, ValidationError,
                    find_improving, make_model, scripted_candidates, sdm_solve,
                    tdm_solve)
from relopt.models import make_discrete_grid


def test_find_improving_clears_threshold():
    m = make_model("example41")
    y = find_improving(m, StatePoint((0.0,)), 0.1, SearchPolicy(),
                       np.random.default_rng(0))
    assert y is not None
    # f(0, y) = -y, so clearing 0.1 forces y beyond it
    assert y.coords[0] > 0.1


def test_find_improving_none_inside_stationary_band():
    m = make_model("example31")
    y = find_improving(m, StatePoint((0.3,)), 0.0, SearchPolicy(),
                       np.random.default_rng(0))
    assert y is None


def test_find_improving_degenerate_neighborhood():
    m = make_model("example31")
    y = find_improving(m, StatePoint((1.0,)), 0.0, SearchPolicy(),
                       np.random.default_rng(0))
    assert y is None


def _toy_grid(utility):
    n = len(utility) - 1
    return make_discrete_grid(n=n, delta_cost=0.01, window=n,
                              utility=np.asarray(utility, dtype=float),
                              offsets=np.zeros(n + 1))


def test_enumerated_search_first_versus_best():
    g = _toy_grid([0.0, 0.3, 0.1, 0.5, 0.2, 0.4, 0.05])
    rng = np.random.default_rng(0)
    first = find_improving(g, g.point(0), 0.05,
                           SearchPolicy(mode=SearchMode.FIRST_IMPROVING), rng)
    assert first.discrete_id == 1
    best = find_improving(g, g.point(0), 0.05,
                          SearchPolicy(mode=SearchMode.BEST_OF_BATCH), rng)
    assert best.discrete_id == 3


def test_search_never_returns_current_state():
    g = _toy_grid([1.0, 0.0, 0.0, 0.0])
    y = find_improving(g, g.point(0), 0.0, SearchPolicy(),
                       np.random.default_rng(0))
    assert y is None


def test_scripted_policy_skips_and_counts():
    m = make_model("example41")
    policy = scripted_candidates([StatePoint((1.5,)), StatePoint((0.3,))])
    y = find_improving(m, StatePoint((0.0,)), 0.0, policy,
                       np.random.default_rng(0))
    assert y == StatePoint((0.3,))
    assert policy.skipped_infeasible == 1
    assert find_improving(m, StatePoint((0.0,)), 0.0, policy,
                          np.random.default_rng(0)) is None


def test_threshold_schedule_values_and_validation():
    s = ThresholdSchedule(0.1, 0.5, 1e-6)
    assert [s.value(k) for k in (1, 2, 3)] == [0.1, 0.05, 0.025]
    with pytest.raises(ValueError):
        s.value(0)
    with pytest.raises(ValidationError):
        ThresholdSchedule(delta0=0.0)
    with pytest.raises(ValidationError):
        ThresholdSchedule(gamma=1.0)
    with pytest.raises(ValidationError):
        ThresholdSchedule(delta0=0.1, delta_min=0.2)
    with pytest.raises(ValidationError):
        SearchPolicy(samples_per_round=0)


def test_tdm_rejects_infeasible_start():
    with pytest.raises(DomainError):
        tdm_solve(make_model("example31"), StatePoint((1.5,)))


def test_tdm_moves_clear_their_thresholds():
    r = tdm_solve(make_model("example32"), StatePoint((0.0,)), seed=1,
                  budget=Budget(max_moves=50))
    assert len(r.trajectory.moves) == 50
    for mv in r.trajectory.moves:
        assert mv.f_value < -mv.threshold_at_move
    deltas = [mv.threshold_at_move for mv in r.trajectory.moves]
    assert all(b <= a for a, b in zip(deltas, deltas[1:]))


def test_tdm_stationary_points_follow_the_ladder():
    sched = ThresholdSchedule(0.25, 0.5, 1e-4)
    r = tdm_solve(make_model("example41"), StatePoint((0.0,)), schedule=sched,
                  seed=7)
    assert r.trajectory.termination is Termination.THRESHOLD_EXHAUSTED
    sps = r.trajectory.stationary_points
    assert sps, "at least the closing level must have failed"
    for sp in sps:
        assert sp.threshold == sched.value(sp.level)
    levels = [sp.level for sp in sps]
    assert levels == sorted(levels)
    assert r.final_threshold < sched.delta_min
    assert r.final_state.coords[0] >= 0.999


def test_tdm_enumerated_stop_certifies_residual():
    g = make_discrete_grid()
    r = tdm_solve(g, g.point(3), seed=5)
    assert r.trajectory.termination is Termination.THRESHOLD_EXHAUSTED
    assert r.residual_estimate <= r.final_threshold


def test_tdm_budget_caps():
    m = make_model("example32")
    r = tdm_solve(m, StatePoint((0.0,)), budget=Budget(max_moves=10))
    assert r.trajectory.termination is Termination.BUDGET_EXHAUSTED
    assert len(r.trajectory.moves) == 10
    r = tdm_solve(m, StatePoint((0.0,)), budget=Budget(max_evaluations=5))
    assert r.trajectory.termination is Termination.BUDGET_EXHAUSTED
    assert r.evaluations_used <= 5


def test_tdm_is_deterministic():
    m = make_model("example32")
    a = tdm_solve(m, StatePoint((0.0,)), seed=11, budget=Budget(max_moves=60))
    b = tdm_solve(m, StatePoint((0.0,)), seed=11, budget=Budget(max_moves=60))
    assert a.trajectory.moves == b.trajectory.moves
    assert a.residual_estimate == b.residual_estimate
    assert a.evaluations_used == b.evaluations_used
    c = tdm_solve(m, StatePoint((0.0,)), seed=12, budget=Budget(max_moves=60))
    assert c.trajectory.moves != a.trajectory.moves


def test_sdm_walks_uphill_until_stall():
    r = sdm_solve(make_model("example41"), StatePoint((0.0,)), seed=0)
    assert r.trajectory.termination is Termination.THRESHOLD_EXHAUSTED
    assert r.final_state.coords[0] > 0.9
    assert len(r.trajectory.moves) < 100
    for mv in r.trajectory.moves:
        assert mv.f_value < 0.0


def test_sdm_scripted_walk_accepts_everything():
    pts = [StatePoint((0.5 * (1.0 - 2.0 ** -(k + 1)),)) for k in range(40)]
    policy = scripted_candidates(pts)
    r = sdm_solve(make_model("example41"), StatePoint((0.0,)), policy=policy)
    assert len(r.trajectory.moves) == 40
    assert policy.skipped_infeasible == 0
    assert r.evaluations_used == 40
    assert abs(r.final_state.coords[0] - 0.5 * (1.0 - 2.0 ** -40)) == 0.0
    assert r.trajectory.termination is Termination.THRESHOLD_EXHAUSTED


def test_sdm_on_grid_stops_discretely():
    g = make_discrete_grid()
    r = sdm_solve(g, g.point(42), seed=2)
    assert r.trajectory.termination is Termination.DISCRETE_STOP
    assert r.residual_estimate == 0.0
    assert len(r.trajectory.moves) <= 2 * g.n
