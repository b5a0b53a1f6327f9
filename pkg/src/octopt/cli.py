"""Command-line entry point wiring the library into reproducible experiments.

Every command accepts --config, writes its outputs deterministically (the
same command, config, seed, and inputs give byte-identical files), and
drops a `<output>.manifest.json` next to each primary output recording how
to rerun it. Exit codes: 0 success, 2 usage, 3 input/parse, 4 infeasible,
5 numerical failure.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from . import __version__, codesign, current_field, dynamics, path_planner
from .errors import ConfigError, CoverageError, InfeasibleError, NumericalError
from .params import (DesignVector, PlannerConfig, TurbineParameters,
                     default_bounds, default_design, load_config,
                     parse_flat_file, read_config_values)

EXIT_OK = 0
EXIT_INPUT = 3
EXIT_INFEASIBLE = 4
EXIT_NUMERICAL = 5


@dataclass
class RunManifest:
    """Everything needed to rerun a command and get the same bytes."""

    command: str
    tool_version: str
    seed: int | None
    config_snapshot: dict
    input_digests: dict[str, str]
    outputs: list[str]
    duration_s: float

    def write(self, out_path: Path) -> None:
        path = out_path.with_name(out_path.name + ".manifest.json")
        path.write_text(json.dumps(asdict(self), indent=2, sort_keys=True) + "\n",
                        encoding="utf-8")


def _sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _load_configs(args) -> tuple[TurbineParameters, object, PlannerConfig, dict]:
    if getattr(args, "config", None):
        params, bounds, planner = load_config(args.config)
        snapshot = {k: v for k, v in read_config_values(args.config).items()}
    else:
        params = TurbineParameters()
        bounds = default_bounds(params)
        planner = PlannerConfig()
        snapshot = {}
    return params, bounds, planner, snapshot


def _input_digests(args, *attr_names: str) -> dict[str, str]:
    digests = {}
    for name in attr_names:
        value = getattr(args, name, None)
        if value:
            digests[str(value)] = _sha256(value)
    return digests


def _finish(args, command: str, seed, snapshot, digests, outputs, t_start) -> int:
    manifest = RunManifest(
        command=command, tool_version=__version__, seed=seed,
        config_snapshot=snapshot, input_digests=digests,
        outputs=[str(o) for o in outputs],
        duration_s=round(time.perf_counter() - t_start, 6),
    )
    for out in outputs:
        manifest.write(Path(out))
    return EXIT_OK


def _design_from_args(args, params: TurbineParameters) -> DesignVector:
    base = default_design(params)
    return DesignVector(
        generator_rating=args.rating if args.rating is not None
        else base.generator_rating,
        rotor_diameter=args.diameter if args.diameter is not None
        else base.rotor_diameter,
        tank_volume=args.tank if args.tank is not None else base.tank_volume,
    )


# --------------------------------------------------------------------- commands

def cmd_gen_current(args) -> int:
    t_start = time.perf_counter()
    _, _, _, snapshot = _load_configs(args)
    spec = current_field.SynthesisSpec(
        mean=args.mean, amplitude=args.amp, period_hours=args.period,
        noise_std=args.noise, decay_length=args.decay,
        surface_depth=args.surface_depth, depth_stop=args.depth_max,
        depth_step=args.depth_step, duration_hours=args.hours,
    )
    field = current_field.synthesize(args.seed, spec)
    current_field.save_csv(field, args.out)
    digests = _input_digests(args, "config")
    return _finish(args, "gen-current", args.seed, snapshot, digests,
                   [args.out], t_start)


def cmd_plan(args) -> int:
    t_start = time.perf_counter()
    params, _, planner, snapshot = _load_configs(args)
    field = current_field.load_csv(args.field)
    design = _design_from_args(args, params)
    plan = path_planner.plan_mission(field, design, params, planner)

    header = "t_h,depth_m,v_mps,B_f,B_a,P_gen_kW,P_HD_kW,P_CD_kW,P_net_kW"
    lines = [header]
    for i, p in enumerate(plan.power, start=1):
        f = plan.fills[i]
        cells = (plan.times[i], plan.depths[i], plan.speeds[i],
                 f.forward_fill, f.aft_fill,
                 p.generated, p.hold_depth_cost, p.change_depth_cost, p.net)
        lines.append(",".join(repr(float(c)) for c in cells))
    lines.append(f"# mission_average_net_kW = {plan.mission_average_net!r}")
    lines.append(f"# fill_bound_exclusions = {plan.bound_exclusions}")
    Path(args.out).write_text("\n".join(lines) + "\n", encoding="utf-8")

    digests = _input_digests(args, "config", "field")
    return _finish(args, "plan", None, snapshot, digests, [args.out], t_start)


def _result_to_dict(result: codesign.CodesignResult) -> dict:
    return {
        "best_design": asdict(result.best_design),
        "best_fitness_kw_per_kg": result.best_fitness,
        "best_power_kw": result.best_power,
        "best_mass_kg": asdict(result.best_mass),
        "history_best_mean": [[b, m] for b, m in result.history],
    }


def cmd_codesign(args) -> int:
    t_start = time.perf_counter()
    params, bounds, planner, snapshot = _load_configs(args)
    ga = (codesign.load_ga_config(args.config) if args.config
          else codesign.GaConfig())
    ga = codesign.GaConfig(**{**{f.name: getattr(ga, f.name)
                                 for f in fields(codesign.GaConfig)},
                              "rng_seed": args.seed})
    field = current_field.load_csv(args.field)
    if args.single:
        result = codesign.optimize_single(args.single, field, params, bounds,
                                          ga, planner)
    else:
        result = codesign.run_ga(field, params, bounds, ga, planner)

    payload = _result_to_dict(result)
    payload["seed"] = args.seed
    payload["single_parameter"] = args.single
    Path(args.out).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                              encoding="utf-8")
    digests = _input_digests(args, "config", "field")
    return _finish(args, "codesign", args.seed, snapshot, digests,
                   [args.out], t_start)


def cmd_sensitivity(args) -> int:
    t_start = time.perf_counter()
    params, _, planner, snapshot = _load_configs(args)
    field = current_field.load_csv(args.field)
    table = codesign.sensitivity_sweep(field, params, planner)

    lines = ["parameter,minus_10pct,base,plus_10pct"]
    for i, name in enumerate(table.parameters):
        row = ",".join(repr(float(v)) for v in table.fitness[i])
        lines.append(f"{name},{row}")
    Path(args.out).write_text("\n".join(lines) + "\n", encoding="utf-8")
    digests = _input_digests(args, "config", "field")
    return _finish(args, "sensitivity", None, snapshot, digests,
                   [args.out], t_start)


_INERTIA_KEYS = {f.name for f in fields(dynamics.InertiaSet)}


def load_inertia(path) -> dynamics.InertiaSet:
    """Inertia set from a flat `key = value` file; absent keys use defaults."""
    values = parse_flat_file(path, _INERTIA_KEYS)
    defaults = asdict(dynamics.default_inertia())
    defaults.update(values)
    try:
        return dynamics.InertiaSet(**defaults)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def _surrogate_env(params: TurbineParameters, flow_speed: float
                   ) -> dynamics.SurrogateEnvironment:
    return dynamics.SurrogateEnvironment(
        flow_speed=flow_speed,
        water_density=params.water_density,
        dry_mass=params.base_total_mass,
        tank_volume=params.base_tank_volume,
    )


def cmd_simulate_dynamics(args) -> int:
    t_start = time.perf_counter()
    params, _, _, snapshot = _load_configs(args)
    inertia = load_inertia(args.inertia) if args.inertia else dynamics.default_inertia()
    env = _surrogate_env(params, args.flow)
    state0 = dynamics.RigidBodyState(
        position=env.anchor_position, velocity=(0.0, 0.0, 0.0),
        euler=(0.0, 0.0, 0.0), rates=(0.0, 0.0, 0.0),
        rotor_rate=0.0, rotor_angle=0.0)
    controls = (env.neutral_fill, env.neutral_fill, args.tau_em)
    traj = dynamics.integrate(state0, dynamics.make_surrogate(env), inertia,
                              args.dt, args.steps, controls)

    lines = ["t_s," + ",".join(dynamics.FULL_STATE_LABELS)]
    for t, row in zip(traj.times, traj.states):
        lines.append(repr(float(t)) + "," + ",".join(repr(float(x)) for x in row))
    Path(args.out).write_text("\n".join(lines) + "\n", encoding="utf-8")
    digests = _input_digests(args, "config", "inertia")
    return _finish(args, "simulate-dynamics", None, snapshot, digests,
                   [args.out], t_start)


def cmd_linearize(args) -> int:
    t_start = time.perf_counter()
    params, _, _, snapshot = _load_configs(args)
    inertia = load_inertia(args.inertia) if args.inertia else dynamics.default_inertia()
    if args.nominal:
        env = _surrogate_env(params, args.flow)
        x_eq, u_eq = dynamics.NOMINAL_STATE, dynamics.NOMINAL_CONTROLS
    else:
        env = _surrogate_env(params, 0.0)
        x_eq, u_eq = dynamics.surrogate_equilibrium(env)
    model = dynamics.linearize(dynamics.make_surrogate(env), x_eq, u_eq, inertia,
                               fd_step=args.fd_step)

    payload = {
        "A": model.A.tolist(),
        "B": model.B.tolist(),
        "x_eq": model.x_eq.tolist(),
        "u_eq": model.u_eq.tolist(),
        "state_labels": list(dynamics.STATE_LABELS),
        "input_labels": list(dynamics.INPUT_LABELS),
    }
    Path(args.out).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                              encoding="utf-8")
    digests = _input_digests(args, "config", "inertia")
    return _finish(args, "linearize", None, snapshot, digests, [args.out], t_start)


# ---------------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="octopt",
        description="Depth planning, design search, and dynamics for a "
                    "buoyancy-controlled ocean current turbine.")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config(p):
        p.add_argument("--config", help="flat key=value config file")

    p = sub.add_parser("gen-current",
                       help="synthesize a current field and write it as CSV")
    add_config(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--mean", type=float, default=0.67, help="m/s")
    p.add_argument("--amp", type=float, default=0.25, help="m/s")
    p.add_argument("--period", type=float, default=48.0, help="hours")
    p.add_argument("--noise", type=float, default=0.05, help="m/s std dev")
    p.add_argument("--decay", type=float, default=120.0, help="m e-folding depth")
    p.add_argument("--surface-depth", type=float, default=50.0, help="m")
    p.add_argument("--depth-max", type=float, default=400.0, help="m")
    p.add_argument("--depth-step", type=float, default=5.0, help="m")
    p.add_argument("--hours", type=float, default=360.0)
    p.set_defaults(func=cmd_gen_current)

    p = sub.add_parser("plan", help="plan a mission for one design")
    add_config(p)
    p.add_argument("--field", required=True, help="current-field CSV")
    p.add_argument("--out", required=True)
    p.add_argument("--rating", type=float, help="kW (default: base)")
    p.add_argument("--diameter", type=float, help="m (default: base)")
    p.add_argument("--tank", type=float, help="m^3 (default: base)")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("codesign", help="run the design search")
    add_config(p)
    p.add_argument("--field", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--single", choices=("rotor", "generator", "tank"),
                   help="optimize one parameter, others frozen at base")
    p.set_defaults(func=cmd_codesign)

    p = sub.add_parser("sensitivity",
                       help="fitness at +/-10%% of each design parameter")
    add_config(p)
    p.add_argument("--field", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sensitivity)

    p = sub.add_parser("simulate-dynamics",
                       help="integrate the 7-DOF model under surrogate forcing")
    add_config(p)
    p.add_argument("--inertia", help="flat key=value inertia file")
    p.add_argument("--dt", type=float, default=0.001, help="seconds")
    p.add_argument("--steps", type=int, default=1000)
    p.add_argument("--out", required=True)
    p.add_argument("--flow", type=float, default=1.6, help="m/s")
    p.add_argument("--tau-em", type=float, default=0.0, help="N m")
    p.set_defaults(func=cmd_simulate_dynamics)

    p = sub.add_parser("linearize",
                       help="finite-difference linear model about an "
                            "operating point")
    add_config(p)
    p.add_argument("--inertia")
    p.add_argument("--out", required=True)
    p.add_argument("--nominal", action="store_true",
                   help="linearize about the published operating point "
                        "instead of the surrogate's still-water equilibrium")
    p.add_argument("--flow", type=float, default=1.6,
                   help="m/s (with --nominal)")
    p.add_argument("--fd-step", type=float, default=1e-6)
    p.set_defaults(func=cmd_linearize)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, CoverageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (NumericalError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
