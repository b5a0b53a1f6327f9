"""Net harvested power for one depth transition, and the buoyancy-tank fill
dynamics that constrain it.

All power terms are kW with time steps in hours; the pump-energy
coefficient zeta is kWh, so zeta/dt is already kW. Functions accept scalars
or numpy arrays so the planner can evaluate whole transition grids at once.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleError
from .params import DesignVector, TurbineParameters


@dataclass(frozen=True)
class FillState:
    """Air fill fractions of the forward and aft buoyancy tanks."""

    forward_fill: float
    aft_fill: float


@dataclass(frozen=True)
class PowerBreakdown:
    generated: float          # [kW]
    hold_depth_cost: float    # [kW]
    change_depth_cost: float  # [kW]
    net: float                # [kW] generated - hold - change, exactly


def generated_power(v, design: DesignVector, params: TurbineParameters):
    """Electrical power [kW] at flow speed v [m/s], clamped at the rating."""
    swept = np.pi * (design.rotor_diameter / 2.0) ** 2
    kinetic_kw = (0.5 * params.water_density * swept * np.asarray(v, dtype=float) ** 3
                  * params.power_coefficient) / 1000.0
    return np.minimum(kinetic_kw, design.generator_rating)


def hold_depth_power(delta_v, dt_hours: float, params: TurbineParameters):
    """Pumping power [kW] to hold depth against a flow-speed change.

    Free when the flow slows (delta_v <= 0): holding then means venting air.
    """
    if dt_hours <= 0:
        raise ValueError(f"dt_hours must be > 0, got {dt_hours}")
    delta_v = np.asarray(delta_v, dtype=float)
    cost = params.zeta * (params.kappa1 * delta_v) / dt_hours
    return np.maximum(np.where(delta_v > 0, cost, 0.0), 0.0)


def change_depth_power(delta_z, dt_hours: float, params: TurbineParameters):
    """Pumping power [kW] to change depth; ascending (delta_z < 0) costs,
    descending or holding is free."""
    if dt_hours <= 0:
        raise ValueError(f"dt_hours must be > 0, got {dt_hours}")
    delta_z = np.asarray(delta_z, dtype=float)
    cost = params.zeta * (params.kappa2 * delta_z) / dt_hours
    return np.maximum(np.where(delta_z < 0, cost, 0.0), 0.0)


def fill_bounds(design: DesignVector, params: TurbineParameters) -> tuple[float, float]:
    """Allowed fill range, shrunk in proportion to tank volume vs base."""
    scale = design.tank_volume / params.base_tank_volume
    return scale * params.fill_min, scale * params.fill_max


def fill_delta(delta_v, delta_z, params: TurbineParameters):
    """Fill-fraction change for a transition: kappa1*dv + kappa2*dz."""
    return params.kappa1 * np.asarray(delta_v, dtype=float) + \
        params.kappa2 * np.asarray(delta_z, dtype=float)


def step_fill(state: FillState, delta_v: float, delta_z: float,
              design: DesignVector, params: TurbineParameters,
              dt_hours: float = 1.0) -> FillState:
    """Advance both tank fills through one transition, enforcing the scaled
    fill bounds and the slew-rate limit.

    Both tanks receive the same fill change; differential (pitch-trim)
    filling is outside this model.
    """
    db = float(fill_delta(delta_v, delta_z, params))
    slew_cap = params.fill_slew_max * dt_hours * 3600.0
    if abs(db) > slew_cap:
        raise InfeasibleError(
            f"fill change {db:.4g} exceeds slew limit {slew_cap:.4g} "
            f"over {dt_hours} h")
    lo, hi = fill_bounds(design, params)
    new = FillState(forward_fill=state.forward_fill + db,
                    aft_fill=state.aft_fill + db)
    for name, b in (("forward", new.forward_fill), ("aft", new.aft_fill)):
        if not lo <= b <= hi:
            raise InfeasibleError(
                f"{name} fill {b:.4g} outside [{lo:.4g}, {hi:.4g}] "
                f"for tank volume {design.tank_volume} m^3")
    return new


def net_power(v_prev: float, v_next: float, delta_z: float, dt_hours: float,
              design: DesignVector, params: TurbineParameters) -> PowerBreakdown:
    """Net power for a transition: generation at the arrival flow speed minus
    the two pumping costs."""
    if v_prev < 0 or v_next < 0:
        raise ValueError("flow speeds must be >= 0")
    gen = float(generated_power(v_next, design, params))
    hd = float(hold_depth_power(v_next - v_prev, dt_hours, params))
    cd = float(change_depth_power(delta_z, dt_hours, params))
    return PowerBreakdown(generated=gen, hold_depth_cost=hd,
                          change_depth_cost=cd, net=gen - hd - cd)
