"""Component masses and total system mass as functions of the design vector.

Rotor and generator follow power laws in diameter and rating; the tank is
linear in volume. The total is the base system mass plus the deviation of
each sized component from its base mass. Note the rotor power law does not
reproduce the catalogued base rotor mass exactly (61191 vs 61573 kg at the
base diameter); the deviation form absorbs that offset by construction.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import InfeasibleError
from .params import DesignVector, TurbineParameters


@dataclass(frozen=True)
class MassBreakdown:
    rotor_mass: float       # [kg]
    generator_mass: float   # [kg]
    tank_mass: float        # [kg]
    total_mass: float       # [kg]


def rotor_mass(diameter: float, params: TurbineParameters) -> float:
    """Rotor mass [kg] from the radius power law."""
    if diameter <= 0:
        raise ValueError(f"rotor diameter must be > 0, got {diameter}")
    return params.alpha1 * (diameter / 2.0) ** params.alpha2


def generator_mass(rated_power: float, params: TurbineParameters) -> float:
    """Generator mass [kg] from the rating power law."""
    if rated_power <= 0:
        raise ValueError(f"generator rating must be > 0, got {rated_power}")
    return params.beta1 * rated_power ** params.beta2


def tank_mass(volume: float, params: TurbineParameters) -> float:
    """Buoyancy tank mass [kg], linear in volume about the base tank."""
    if volume <= 0:
        raise ValueError(f"tank volume must be > 0, got {volume}")
    mass = params.base_tank_mass + params.gamma1 * (volume - params.base_tank_volume)
    if mass <= 0:
        raise InfeasibleError(
            f"tank volume {volume} m^3 gives non-physical tank mass {mass} kg")
    return mass


def total_mass(design: DesignVector, params: TurbineParameters) -> MassBreakdown:
    """Full breakdown; total = base total + per-component deviations from base."""
    m_r = rotor_mass(design.rotor_diameter, params)
    m_g = generator_mass(design.generator_rating, params)
    m_b = tank_mass(design.tank_volume, params)
    total = (params.base_total_mass
             + (m_r - params.base_rotor_mass)
             + (m_g - params.base_generator_mass)
             + (m_b - params.base_tank_mass))
    return MassBreakdown(rotor_mass=m_r, generator_mass=m_g,
                         tank_mass=m_b, total_mass=total)
