"""Receding-horizon depth planning on a discrete depth-time grid.

Each re-plan solves the horizon exactly by dynamic programming over
(time, depth-level) nodes. Tank fill state needs no extra DP dimension:
fill changes telescope along any path, so the fill at a node is a closed
form of the node's (depth, flow speed) and the start anchor, and fill
feasibility reduces to per-node and per-edge checks.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .current_field import CurrentField
from .errors import CoverageError, InfeasibleError
from .params import DesignVector, PlannerConfig, TurbineParameters
from .power_model import (FillState, PowerBreakdown, change_depth_power,
                          fill_bounds, fill_delta, generated_power,
                          hold_depth_power, net_power, step_fill)


@dataclass(frozen=True)
class DepthGrid:
    """Ordered operating depths the planner may occupy."""

    levels: np.ndarray  # [m] strictly ascending

    def __post_init__(self):
        levels = np.asarray(self.levels, dtype=float)
        if levels.ndim != 1 or levels.size < 2:
            raise ValueError("grid needs at least two depth levels")
        if not np.all(np.diff(levels) > 0):
            raise ValueError("grid levels must be strictly ascending")
        levels.flags.writeable = False
        object.__setattr__(self, "levels", levels)

    @classmethod
    def from_config(cls, params: TurbineParameters,
                    config: PlannerConfig) -> "DepthGrid":
        return cls(np.linspace(params.depth_min, params.depth_max,
                               config.depth_levels))

    def index_of(self, z: float) -> int:
        hits = np.flatnonzero(np.isclose(self.levels, z, rtol=0.0, atol=1e-9))
        if hits.size != 1:
            raise ValueError(f"depth {z} m is not a grid level of {self.levels}")
        return int(hits[0])


@dataclass(frozen=True)
class HorizonSolution:
    first_depth: float        # [m] committed next depth
    first_index: int
    value: float              # [kW] horizon-average net power of the optimal path
    total_net: float          # [kW] summed net power over the horizon
    path_indices: tuple[int, ...]
    path_depths: tuple[float, ...]
    bound_exclusions: int     # candidate nodes dropped by fill bounds


@dataclass
class DepthPlan:
    """A committed mission: node states plus per-step power accounting."""

    times: np.ndarray               # [h] node times, length n_steps + 1
    depths: np.ndarray              # [m] node depths, depths[0] = initial depth
    speeds: np.ndarray              # [m/s] flow at each occupied node
    fills: list[FillState]          # per node
    power: list[PowerBreakdown]     # per step
    mission_average_net: float      # [kW]
    bound_exclusions: int           # summed over all horizon solves


# --------------------------------------------------------------------------
# Table construction shared by the standalone solve and the mission rollout.

def _speed_table(field: CurrentField, levels: np.ndarray, t0: float,
                 n_times: int, dt: float) -> np.ndarray:
    t_end = t0 + (n_times - 1) * dt
    if not field.covers(levels[0], levels[-1], t0, t_end):
        raise CoverageError(
            f"planner window (depths [{levels[0]}, {levels[-1]}] m, "
            f"times [{t0}, {t_end}] h) not covered by the field")
    return field.sample_many(levels, t0 + dt * np.arange(n_times))


def _stage_tables(speeds: np.ndarray, levels: np.ndarray, design: DesignVector,
                  params: TurbineParameters, dt: float):
    """Per-stage edge costs and slew feasibility.

    speeds has one row per node time; stage j covers the transition from
    row j to row j+1. cost[j, i, k] is -net for moving level i -> level k.
    """
    dz = levels[None, :] - levels[:, None]            # [i, k] = z_k - z_i
    cd = change_depth_power(dz, dt, params)
    gen = generated_power(speeds, design, params)
    dv = speeds[1:, None, :] - speeds[:-1, :, None]   # [j, i, k]
    hd = hold_depth_power(dv, dt, params)
    net = gen[1:, None, :] - hd - cd[None, :, :]
    slew_cap = params.fill_slew_max * dt * 3600.0
    slew_ok = np.abs(fill_delta(dv, dz[None, :, :], params)) <= slew_cap
    return -net, slew_ok


def _node_fill_ok(speeds: np.ndarray, levels: np.ndarray, anchor_speed: float,
                  anchor_depth: float, fill0: FillState, design: DesignVector,
                  params: TurbineParameters) -> np.ndarray:
    """Fill feasibility of every (time, level) node, fills recovered in
    closed form from the anchor node."""
    db = fill_delta(speeds - anchor_speed, levels[None, :] - anchor_depth, params)
    lo, hi = fill_bounds(design, params)
    ok = np.ones(speeds.shape, dtype=bool)
    for fill in (fill0.forward_fill, fill0.aft_fill):
        b = fill + db
        ok &= (b >= lo) & (b <= hi)
    return ok


def _raise_first_infeasible_stage(slew_ok: np.ndarray, node_ok: np.ndarray,
                                  z0_idx: int, t0: float, dt: float):
    """Forward reachability scan, run only to name where feasibility dies."""
    reach = node_ok[0].copy()
    reach[:z0_idx] = False
    reach[z0_idx + 1:] = False
    for j in range(slew_ok.shape[0]):
        reach = (reach[:, None] & slew_ok[j]).any(axis=0) & node_ok[j + 1]
        if not reach.any():
            raise InfeasibleError(
                f"no feasible transition at stage {j + 1} "
                f"(t={t0 + (j + 1) * dt} h): fill bounds or slew limit "
                f"exclude every depth level")
    raise InfeasibleError(
        f"no feasible path over the horizon starting at t={t0} h")


def _solve_stages(cost: np.ndarray, slew_ok: np.ndarray, node_ok: np.ndarray,
                  z0_idx: int, levels: np.ndarray, t0: float,
                  dt: float) -> HorizonSolution:
    """Exact minimum-cost path of len(cost) stages from level z0_idx.

    Ties are broken stagewise: smaller |depth change| from the current
    level first, then the shallower level.
    """
    n_stages = cost.shape[0]
    if not node_ok[0, z0_idx]:
        raise InfeasibleError(
            f"initial fill state infeasible at the start node (t={t0} h)")

    # Backward cost-to-go. cost_to_go[k] is indexed by the stage-k node.
    cost_to_go: list[np.ndarray] = [None] * (n_stages + 1)  # type: ignore[list-item]
    cost_to_go[n_stages] = np.where(node_ok[n_stages], 0.0, np.inf)
    for j in range(n_stages - 1, 0, -1):
        eff = cost[j] + cost_to_go[j + 1][None, :]
        eff[~slew_ok[j]] = np.inf
        tail = eff.min(axis=1)
        tail[~node_ok[j]] = np.inf
        cost_to_go[j] = tail

    # Stagewise reconstruction with the documented tie-break.
    path: list[int] = []
    cur = z0_idx
    total = np.inf
    for j in range(n_stages):
        scores = cost[j, cur] + cost_to_go[j + 1]
        scores = np.where(slew_ok[j, cur], scores, np.inf)
        best = scores.min()
        if not np.isfinite(best):
            _raise_first_infeasible_stage(slew_ok, node_ok, z0_idx, t0, dt)
        ties = np.flatnonzero(scores == best)
        cur = int(min(ties, key=lambda k: (abs(levels[k] - levels[cur]), levels[k])))
        if j == 0:
            total = best
        path.append(cur)

    total_net = -total
    return HorizonSolution(
        first_depth=float(levels[path[0]]),
        first_index=path[0],
        value=total_net / n_stages,
        total_net=total_net,
        path_indices=tuple(path),
        path_depths=tuple(float(levels[k]) for k in path),
        bound_exclusions=int((~node_ok[1:]).sum()),
    )


def solve_horizon(t0: float, z0: float, fill0: FillState, field: CurrentField,
                  design: DesignVector, params: TurbineParameters,
                  config: PlannerConfig) -> tuple[float, float]:
    """Optimal first move and horizon-average net power [kW] from (t0, z0)."""
    sol = solve_horizon_detail(t0, z0, fill0, field, design, params, config)
    return sol.first_depth, sol.value


def solve_horizon_detail(t0: float, z0: float, fill0: FillState,
                         field: CurrentField, design: DesignVector,
                         params: TurbineParameters,
                         config: PlannerConfig) -> HorizonSolution:
    """As solve_horizon, but returns the full optimal path and diagnostics."""
    grid = DepthGrid.from_config(params, config)
    z0_idx = grid.index_of(z0)
    dt = config.time_step
    T = config.horizon_steps
    speeds = _speed_table(field, grid.levels, t0, T + 1, dt)
    cost, slew_ok = _stage_tables(speeds, grid.levels, design, params, dt)
    node_ok = _node_fill_ok(speeds, grid.levels, speeds[0, z0_idx],
                            grid.levels[z0_idx], fill0, design, params)
    return _solve_stages(cost, slew_ok, node_ok, z0_idx, grid.levels, t0, dt)


def plan_mission(field: CurrentField, design: DesignVector,
                 params: TurbineParameters, config: PlannerConfig) -> DepthPlan:
    """Receding-horizon rollout: re-solve the horizon each step, commit the
    first move, advance the fill state, and account the step's power."""
    grid = DepthGrid.from_config(params, config)
    levels = grid.levels
    z0_idx = grid.index_of(config.initial_depth)
    dt = config.time_step
    T = config.horizon_steps

    t0 = float(field.time_stamps[0])
    span = float(field.time_stamps[-1]) - t0
    max_steps = int(np.floor(span / dt + 1e-9)) - T + 1
    if max_steps < 1:
        raise CoverageError(
            f"field spans {span} h; too short for even one step with a "
            f"{T}-step horizon at dt={dt} h")
    requested = max(1, int(round(config.mission_hours / dt)))
    n_steps = min(requested, max_steps)
    if n_steps < requested:
        warnings.warn(
            f"mission truncated from {requested} to {n_steps} steps "
            f"to keep the {T}-step horizon inside the field", stacklevel=2)

    # One pass of sampling and edge-cost construction for the whole mission.
    speeds = _speed_table(field, levels, t0, n_steps + T, dt)
    cost, slew_ok = _stage_tables(speeds, levels, design, params, dt)

    fills = [FillState(config.initial_fill, config.initial_fill)]
    depth_idx = [z0_idx]
    power: list[PowerBreakdown] = []
    exclusions = 0

    cur = z0_idx
    for k in range(n_steps):
        node_ok = _node_fill_ok(speeds[k:k + T + 1], levels, speeds[k, cur],
                                levels[cur], fills[-1], design, params)
        try:
            sol = _solve_stages(cost[k:k + T], slew_ok[k:k + T], node_ok,
                                cur, levels, t0 + k * dt, dt)
        except InfeasibleError as exc:
            raise InfeasibleError(f"mission step {k}: {exc}") from None
        exclusions += sol.bound_exclusions
        nxt = sol.first_index
        dv = float(speeds[k + 1, nxt] - speeds[k, cur])
        dz = float(levels[nxt] - levels[cur])
        power.append(net_power(float(speeds[k, cur]), float(speeds[k + 1, nxt]),
                               dz, dt, design, params))
        fills.append(step_fill(fills[-1], dv, dz, design, params, dt))
        depth_idx.append(nxt)
        cur = nxt

    idx = np.asarray(depth_idx)
    return DepthPlan(
        times=t0 + dt * np.arange(n_steps + 1),
        depths=levels[idx],
        speeds=speeds[np.arange(n_steps + 1), idx],
        fills=fills,
        power=power,
        mission_average_net=float(np.mean([p.net for p in power])),
        bound_exclusions=exclusions,
    )


def evaluate_design(field: CurrentField, design: DesignVector,
                    params: TurbineParameters, config: PlannerConfig) -> float:
    """Mission-average net power [kW]: the inner-loop value of a design."""
    return plan_mission(field, design, params, config).mission_average_net
