"""Co-design toolkit for a buoyancy-controlled ocean current turbine.

An exact dynamic-programming depth planner (inner loop, maximizing net
harvested power on a depth-time grid under tank fill constraints) nested
inside a genetic-algorithm design search (outer loop, maximizing
power-to-weight over generator rating, rotor diameter, and tank volume),
plus a 7-DOF rigid-body dynamics module with numerical linearization.
"""

__version__ = "0.1.0"

from .codesign import (CodesignResult, GaConfig, fitness, optimize_single,
                       power_to_weight, run_ga, sensitivity_sweep)
from .current_field import (CurrentField, SynthesisSpec, load_csv, save_csv,
                            speed_at, synthesize)
from .errors import ConfigError, CoverageError, InfeasibleError, NumericalError
from .mass_model import (MassBreakdown, generator_mass, rotor_mass, tank_mass,
                         total_mass)
from .params import (DesignBounds, DesignVector, PlannerConfig,
                     TurbineParameters, default_bounds, default_design,
                     load_config, save_config)
from .path_planner import (DepthGrid, DepthPlan, evaluate_design, plan_mission,
                           solve_horizon, solve_horizon_detail)
from .power_model import (FillState, PowerBreakdown, change_depth_power,
                          generated_power, hold_depth_power, net_power,
                          step_fill)

__all__ = [
    "CodesignResult", "GaConfig", "fitness", "optimize_single",
    "power_to_weight", "run_ga", "sensitivity_sweep",
    "CurrentField", "SynthesisSpec", "load_csv", "save_csv", "speed_at",
    "synthesize",
    "ConfigError", "CoverageError", "InfeasibleError", "NumericalError",
    "MassBreakdown", "generator_mass", "rotor_mass", "tank_mass", "total_mass",
    "DesignBounds", "DesignVector", "PlannerConfig", "TurbineParameters",
    "default_bounds", "default_design", "load_config", "save_config",
    "DepthGrid", "DepthPlan", "evaluate_design", "plan_mission",
    "solve_horizon", "solve_horizon_detail",
    "FillState", "PowerBreakdown", "change_depth_power", "generated_power",
    "hold_depth_power", "net_power", "step_fill",
    "__version__",
]
