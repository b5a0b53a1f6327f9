import numpy as np
import pytest

from octopt import power_model as pm
from octopt.current_field import CurrentField, SynthesisSpec, synthesize
from octopt.errors import CoverageError, InfeasibleError
from octopt.params import DesignVector, PlannerConfig, TurbineParameters
from octopt.path_planner import (DepthGrid, evaluate_design, plan_mission,
                                 solve_horizon, solve_horizon_detail,
                                 _node_fill_ok, _speed_table, _stage_tables)
from octopt.power_model import FillState

from oracles import brute_force_horizon, random_instance


def constant_field(speed=0.6, hours=60.0):
    depths = np.arange(0.0, 401.0, 50.0)
    times = np.arange(0.0, hours + 1.0)
    return CurrentField(depths, times, np.full((times.size, depths.size), speed))


def test_grid_default_levels(params):
    grid = DepthGrid.from_config(params, PlannerConfig())
    assert grid.levels.size == 17
    assert grid.levels[0] == 50.0 and grid.levels[-1] == 150.0
    assert np.all(np.diff(grid.levels) == 6.25)
    assert np.all((grid.levels >= params.depth_min)
                  & (grid.levels <= params.depth_max))


def test_grid_index_of(params):
    grid = DepthGrid.from_config(params, PlannerConfig())
    assert grid.index_of(50.0) == 0
    assert grid.index_of(56.25) == 1
    with pytest.raises(ValueError):
        grid.index_of(51.0)


def test_two_level_single_step_matches_brute_force(params, base_design):
    # Deeper level is slower; descending is free, so the solver must weigh
    # extra generation against the hold cost exactly like enumeration does.
    p = TurbineParameters(depth_min=50.0, depth_max=60.0)
    cfg = PlannerConfig(horizon_steps=1, depth_levels=2, initial_depth=50.0)
    depths = np.array([40.0, 50.0, 60.0, 70.0])
    times = np.array([0.0, 1.0, 2.0])
    speeds = np.array([[0.9, 0.8, 0.5, 0.4]] * 3)
    field = CurrentField(depths, times, speeds)
    fill0 = FillState(0.4677, 0.4677)

    move, value = solve_horizon(0.0, 50.0, fill0, field, base_design, p, cfg)
    oracle = brute_force_horizon(0.0, 50.0, fill0, field, base_design, p, cfg)
    assert (move,) == oracle.path_depths
    assert value == -oracle.total_cost / cfg.horizon_steps


@pytest.mark.parametrize("seed", range(40))
def test_dp_matches_enumeration_randomized(seed):
    field, design, params, config, z0, fill0 = random_instance(seed)
    oracle = brute_force_horizon(0.0, z0, fill0, field, design, params, config)
    if oracle.path_indices is None:
        with pytest.raises(InfeasibleError):
            solve_horizon_detail(0.0, z0, fill0, field, design, params, config)
        return
    sol = solve_horizon_detail(0.0, z0, fill0, field, design, params, config)
    assert sol.total_net == -oracle.total_cost
    assert sol.path_indices == oracle.path_indices


@pytest.mark.parametrize("seed", range(0, 40, 5))
def test_fill_reduction_matches_augmented_search(seed):
    # The sequential fill walk in the oracle is the (time, depth, fill)
    # search; the planner's node/edge masks are the closed-form reduction.
    field, design, params, config, z0, fill0 = random_instance(seed)
    grid = DepthGrid.from_config(params, config)
    levels = grid.levels
    T = config.horizon_steps
    speeds = _speed_table(field, levels, 0.0, T + 1, config.time_step)
    _, slew_ok = _stage_tables(speeds, levels, design, params, config.time_step)
    node_ok = _node_fill_ok(speeds, levels, speeds[0, grid.index_of(z0)],
                            z0, fill0, design, params)

    oracle = brute_force_horizon(0.0, z0, fill0, field, design, params, config)
    import itertools
    z0_idx = grid.index_of(z0)
    for path in itertools.product(range(levels.size), repeat=T):
        idx = (z0_idx,) + path
        mask_feasible = bool(node_ok[0, z0_idx]) and all(
            node_ok[j + 1, idx[j + 1]] and slew_ok[j, idx[j], idx[j + 1]]
            for j in range(T))
        assert mask_feasible == (path in oracle.feasible), (seed, path)


def test_constant_field_holds_depth(params, base_design):
    cfg = PlannerConfig(mission_hours=10)
    plan = plan_mission(constant_field(), base_design, params, cfg)
    assert np.all(plan.depths == 50.0)
    assert all(p.change_depth_cost == 0.0 for p in plan.power)
    assert all(p.hold_depth_cost == 0.0 for p in plan.power)


def test_time_invariant_field_settles_at_argmax(params, base_design):
    # Speed peaks at 100 m, so the plan should jump there and stay.
    depths = np.arange(0.0, 401.0, 25.0)
    times = np.arange(0.0, 30.0)
    profile = 1.0 - np.abs(depths - 100.0) / 400.0
    field = CurrentField(depths, times,
                         np.tile(profile, (times.size, 1)))
    cfg = PlannerConfig(mission_hours=8)
    plan = plan_mission(field, base_design, params, cfg)

    grid = DepthGrid.from_config(params, cfg)
    v_levels = field.sample(grid.levels, 0.0)
    best_level = grid.levels[int(np.argmax(v_levels))]
    assert np.all(plan.depths[1:] == best_level)


def test_low_speed_field_no_spurious_oscillation(params, base_design):
    f = synthesize(5, SynthesisSpec(amplitude=0.0, noise_std=0.0,
                                    duration_hours=60.0))
    cfg = PlannerConfig(mission_hours=40)
    plan = plan_mission(f, base_design, params, cfg)
    assert all(p.net >= 0.0 for p in plan.power)
    assert all(p.change_depth_cost == 0.0 for p in plan.power[1:])


def test_single_step_mission_equals_horizon_first_step(params, base_design,
                                                       default_field):
    cfg = PlannerConfig(mission_hours=1)
    plan = plan_mission(default_field, base_design, params, cfg)
    assert len(plan.power) == 1

    detail = solve_horizon_detail(float(default_field.time_stamps[0]),
                                  cfg.initial_depth,
                                  FillState(cfg.initial_fill, cfg.initial_fill),
                                  default_field, base_design, params, cfg)
    assert plan.depths[1] == detail.first_depth
    grid = DepthGrid.from_config(params, cfg)
    v0 = float(default_field.sample(grid.levels, 0.0)[grid.index_of(50.0)])
    v1 = float(default_field.sample(grid.levels, 1.0)[detail.first_index])
    expected = pm.net_power(v0, v1, detail.first_depth - 50.0, 1.0,
                            base_design, params)
    assert plan.mission_average_net == expected.net


def test_monotone_resource_response(params, base_design):
    slow = synthesize(1, SynthesisSpec(mean=0.5, amplitude=0.0, noise_std=0.0,
                                       duration_hours=80.0))
    fast = synthesize(1, SynthesisSpec(mean=0.65, amplitude=0.0, noise_std=0.0,
                                       duration_hours=80.0))
    cfg = PlannerConfig(mission_hours=48)
    plan_slow = plan_mission(slow, base_design, params, cfg)
    plan_fast = plan_mission(fast, base_design, params, cfg)
    assert np.array_equal(plan_slow.depths, plan_fast.depths)
    assert plan_fast.mission_average_net >= plan_slow.mission_average_net


def test_zero_speed_field_nonpositive_average(params, base_design):
    f = CurrentField(np.arange(0.0, 401.0, 50.0), np.arange(0.0, 20.0),
                     np.zeros((20, 9)))
    cfg = PlannerConfig(mission_hours=10)
    assert evaluate_design(f, base_design, params, cfg) <= 0.0


def test_mission_truncation_warns(params, base_design):
    f = synthesize(2, SynthesisSpec(duration_hours=24.0))
    cfg = PlannerConfig(mission_hours=100)
    with pytest.warns(UserWarning, match="truncated"):
        plan = plan_mission(f, base_design, params, cfg)
    assert len(plan.power) == 23  # 24 h of coverage minus the 2-step horizon, plus 1


def test_field_too_short_raises(params, base_design):
    f = CurrentField(np.arange(0.0, 401.0, 50.0), np.array([0.0, 1.0]),
                     np.full((2, 9), 0.5))
    with pytest.raises(CoverageError):
        plan_mission(f, base_design, params, PlannerConfig(mission_hours=5))


def test_initial_fill_infeasible_names_start(params, default_field):
    tiny_tank = DesignVector(700.0, 20.0, 3.2)   # usable fill tops out at ~0.1
    cfg = PlannerConfig(mission_hours=5)
    with pytest.raises(InfeasibleError, match="start node"):
        plan_mission(default_field, tiny_tank, params, cfg)


def test_no_feasible_transition_names_stage(params, base_design):
    # A uniform jump in speed pushes every level's fill above the bound
    # between t=0 and t=1.
    depths = np.arange(0.0, 401.0, 50.0)
    times = np.arange(0.0, 6.0)
    speeds = np.full((times.size, depths.size), 2.5)
    speeds[0, :] = 0.1
    field = CurrentField(depths, times, speeds)
    cfg = PlannerConfig(mission_hours=3, initial_fill=0.9)
    with pytest.raises(InfeasibleError, match="stage 1"):
        plan_mission(field, base_design, params, cfg)


def test_committed_transitions_satisfy_constraints(params, base_design,
                                                   default_field):
    cfg = PlannerConfig(mission_hours=30)
    plan = plan_mission(default_field, base_design, params, cfg)
    lo, hi = pm.fill_bounds(base_design, params)
    cap = params.fill_slew_max * cfg.time_step * 3600.0
    for i, p in enumerate(plan.power):
        f = plan.fills[i + 1]
        assert lo <= f.forward_fill <= hi and lo <= f.aft_fill <= hi
        db = f.forward_fill - plan.fills[i].forward_fill
        assert abs(db) <= cap
        assert params.depth_min <= plan.depths[i + 1] <= params.depth_max
        assert p.net == p.generated - p.hold_depth_cost - p.change_depth_cost


def test_mission_average_is_mean_of_steps(params, base_design, default_field,
                                          short_config):
    plan = plan_mission(default_field, base_design, params, short_config)
    assert plan.mission_average_net == pytest.approx(
        np.mean([p.net for p in plan.power]), rel=1e-14)
    assert plan.depths[0] == short_config.initial_depth


def test_evaluate_design_sane_on_default_field(params, base_design,
                                               default_field, short_config):
    value = evaluate_design(default_field, base_design, params, short_config)
    assert 0.0 < value < 700.0
