"""Turbine constants, design vector, and experiment configuration.

Every other module reads its numbers from here. Values are plain SI as
listed in the field comments; there is no unit-conversion layer.
"""
from __future__ import annotations

from dataclasses import dataclass, fields, replace
from pathlib import Path

from .errors import ConfigError


@dataclass(frozen=True)
class TurbineParameters:
    """Physical constants of the base turbine and its scaling laws."""

    base_rotor_diameter: float = 20.0        # [m]
    base_generator_rating: float = 700.0     # [kW]
    base_tank_volume: float = 31.215         # [m^3] each of the two buoyancy tanks
    depth_min: float = 50.0                  # [m] shallowest allowed operating depth
    depth_max: float = 150.0                 # [m] deepest allowed operating depth
    fill_min: float = 0.0                    # [-] tank fully water-filled
    fill_max: float = 1.0                    # [-] tank fully air-filled
    fill_slew_max: float = 7.45e-4           # [1/s] max fill-fraction rate
    base_total_mass: float = 497800.0        # [kg]
    base_rotor_mass: float = 61573.0         # [kg]
    base_generator_mass: float = 2246.9      # [kg]
    base_tank_mass: float = 20427.0          # [kg]
    zeta: float = 14.02                      # [kWh] pump energy coefficient
    kappa1: float = 0.65                     # [s/m] fill change per flow-speed change
    kappa2: float = -0.0026                  # [1/m] fill change per depth change (negative: deeper needs less air)
    alpha1: float = 74.2832                  # [kg/m^alpha2] rotor mass law coefficient
    alpha2: float = 2.9158                   # [-] rotor mass law exponent
    beta1: float = 5.34                      # [kg/kW^beta2] generator mass law coefficient
    beta2: float = 0.9223                    # [-] generator mass law exponent
    gamma1: float = 650.0721                 # [kg/m^3] tank mass per unit volume
    water_density: float = 1025.0            # [kg/m^3] seawater
    power_coefficient: float = 0.45          # [-] rotor power coefficient c_p

    def __post_init__(self):
        positive = (
            "base_rotor_diameter", "base_generator_rating", "base_tank_volume",
            "base_total_mass", "base_rotor_mass", "base_generator_mass",
            "base_tank_mass", "zeta", "kappa1", "alpha1", "alpha2", "beta1",
            "beta2", "gamma1", "water_density", "power_coefficient",
            "fill_slew_max",
        )
        for name in positive:
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be > 0, got {getattr(self, name)}")
        if not self.depth_min < self.depth_max:
            raise ConfigError(
                f"depth_min < depth_max violated: {self.depth_min} >= {self.depth_max}")
        if not self.fill_min < self.fill_max:
            raise ConfigError(
                f"fill_min < fill_max violated: {self.fill_min} >= {self.fill_max}")
        if self.kappa2 >= 0:
            raise ConfigError(f"kappa2 must be < 0, got {self.kappa2}")


@dataclass(frozen=True)
class DesignVector:
    """The three outer-loop decision variables."""

    generator_rating: float   # [kW]
    rotor_diameter: float     # [m]
    tank_volume: float        # [m^3]

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.generator_rating, self.rotor_diameter, self.tank_volume)


@dataclass(frozen=True)
class DesignBounds:
    """Componentwise box for the design vector."""

    lower: DesignVector
    upper: DesignVector

    def __post_init__(self):
        for name in ("generator_rating", "rotor_diameter", "tank_volume"):
            lo, hi = getattr(self.lower, name), getattr(self.upper, name)
            if lo <= 0:
                raise ConfigError(f"lower {name} must be > 0, got {lo}")
            if not lo < hi:
                raise ConfigError(f"lower < upper violated for {name}: {lo} >= {hi}")

    def contains(self, design: DesignVector) -> bool:
        return all(
            getattr(self.lower, n) <= getattr(design, n) <= getattr(self.upper, n)
            for n in ("generator_rating", "rotor_diameter", "tank_volume")
        )


@dataclass(frozen=True)
class PlannerConfig:
    """Depth-time grid and mission settings for the inner planning loop."""

    time_step: float = 1.0         # [h]
    horizon_steps: int = 2         # lookahead steps per re-plan
    depth_levels: int = 17         # grid levels spanning [depth_min, depth_max]
    mission_hours: int = 336       # rollout length (may be truncated to field coverage)
    initial_depth: float = 50.0    # [m] must be a grid level
    initial_fill: float = 0.4677   # [-] both tanks at mission start

    def __post_init__(self):
        if self.horizon_steps < 1:
            raise ConfigError(f"horizon_steps must be >= 1, got {self.horizon_steps}")
        if self.depth_levels < 2:
            raise ConfigError(f"depth_levels must be >= 2, got {self.depth_levels}")
        if self.time_step <= 0:
            raise ConfigError(f"time_step must be > 0, got {self.time_step}")
        if self.mission_hours < 1:
            raise ConfigError(f"mission_hours must be >= 1, got {self.mission_hours}")
        if self.initial_fill < 0:
            raise ConfigError(f"initial_fill must be >= 0, got {self.initial_fill}")


def default_design(params: TurbineParameters) -> DesignVector:
    """The base design: rated power, rotor diameter, and tank volume as built."""
    return DesignVector(
        generator_rating=params.base_generator_rating,
        rotor_diameter=params.base_rotor_diameter,
        tank_volume=params.base_tank_volume,
    )


def default_bounds(params: TurbineParameters,
                   lower_factor: float = 0.1,
                   upper_factor: float = 1.1) -> DesignBounds:
    """Design box scaled from the base values (default 0.1x to 1.1x)."""
    base = default_design(params)
    return DesignBounds(
        lower=DesignVector(*(lower_factor * x for x in base.as_tuple())),
        upper=DesignVector(*(upper_factor * x for x in base.as_tuple())),
    )


# ---------------------------------------------------------------------------
# Config file: flat `key = value` lines, `#` comments, unknown keys rejected.

_PARAM_KEYS = {f.name for f in fields(TurbineParameters)}
_PLANNER_KEYS = {f.name for f in fields(PlannerConfig)}
_PLANNER_INT_KEYS = {"horizon_steps", "depth_levels", "mission_hours"}
_BOUND_KEYS = {
    f"{side}_{gene}"
    for side in ("lower", "upper")
    for gene in ("generator_rating", "rotor_diameter", "tank_volume")
}
_GA_KEYS = {
    "ga_population_size", "ga_generations", "ga_tournament_size",
    "ga_crossover_rate", "ga_mutation_stddev", "ga_elite_count",
}
_GA_INT_KEYS = {"ga_population_size", "ga_generations", "ga_tournament_size",
                "ga_elite_count"}
_INT_KEYS = _PLANNER_INT_KEYS | _GA_INT_KEYS
KNOWN_KEYS = _PARAM_KEYS | _PLANNER_KEYS | _BOUND_KEYS | _GA_KEYS


def parse_flat_file(path, known_keys: set[str],
                    int_keys: set[str] = frozenset()) -> dict[str, float | int]:
    """Parse a flat `key = value` file into typed values.

    Unknown keys are a hard error (catches typos); all errors carry the
    offending line number.
    """
    text = Path(path).read_text(encoding="utf-8")
    values: dict[str, float | int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in known_keys:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        try:
            values[key] = int(value) if key in int_keys else float(value)
        except ValueError:
            raise ConfigError(
                f"{path}:{lineno}: could not parse value {value!r} for {key!r}") from None
    return values


def read_config_values(path) -> dict[str, float | int]:
    """Parse the main config file (turbine, bounds, planner, and GA keys)."""
    return parse_flat_file(path, KNOWN_KEYS, _INT_KEYS)


def load_config(path) -> tuple[TurbineParameters, DesignBounds, PlannerConfig]:
    """Load (parameters, design bounds, planner config); absent keys use defaults."""
    values = read_config_values(path)
    params = TurbineParameters(**{k: v for k, v in values.items() if k in _PARAM_KEYS})
    planner = PlannerConfig(**{k: v for k, v in values.items() if k in _PLANNER_KEYS})

    bounds = default_bounds(params)
    overrides = {k: v for k, v in values.items() if k in _BOUND_KEYS}
    if overrides:
        lower = {g: overrides.get(f"lower_{g}", getattr(bounds.lower, g))
                 for g in ("generator_rating", "rotor_diameter", "tank_volume")}
        upper = {g: overrides.get(f"upper_{g}", getattr(bounds.upper, g))
                 for g in ("generator_rating", "rotor_diameter", "tank_volume")}
        bounds = DesignBounds(lower=DesignVector(**lower), upper=DesignVector(**upper))
    return params, bounds, planner


def save_config(path, params: TurbineParameters, bounds: DesignBounds,
                planner: PlannerConfig) -> None:
    """Write a config file that load_config reads back to equal objects."""
    lines = []
    for f in fields(TurbineParameters):
        lines.append(f"{f.name} = {getattr(params, f.name)!r}")
    for gene in ("generator_rating", "rotor_diameter", "tank_volume"):
        lines.append(f"lower_{gene} = {getattr(bounds.lower, gene)!r}")
        lines.append(f"upper_{gene} = {getattr(bounds.upper, gene)!r}")
    for f in fields(PlannerConfig):
        lines.append(f"{f.name} = {getattr(planner, f.name)!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def with_overrides(params: TurbineParameters, **kwargs) -> TurbineParameters:
    """Copy of params with the given fields replaced (re-validates invariants)."""
    return replace(params, **kwargs)
