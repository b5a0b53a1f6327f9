"""Outer design loop: a real-valued genetic algorithm maximizing the
power-to-weight ratio, with the depth planner as its fitness oracle, plus
the +/-10% single-parameter sensitivity sweep.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from . import path_planner
from .current_field import CurrentField
from .errors import ConfigError, InfeasibleError
from .mass_model import MassBreakdown, total_mass
from .params import (DesignBounds, DesignVector, PlannerConfig,
                     TurbineParameters, default_design, read_config_values)

GENES = ("generator_rating", "rotor_diameter", "tank_volume")

# Fitness assigned to designs whose mission is infeasible; low enough that
# any feasible design outranks it, and never selected as the elite when a
# feasible individual exists.
INFEASIBLE_FITNESS = -1e12


@dataclass(frozen=True)
class GaConfig:
    population_size: int = 20
    generations: int = 30
    tournament_size: int = 2
    crossover_rate: float = 0.9
    mutation_stddev: float = 0.05   # fraction of each gene's bound range
    elite_count: int = 2
    rng_seed: int = 0

    def __post_init__(self):
        if self.population_size < 4:
            raise ConfigError(
                f"population_size must be >= 4, got {self.population_size}")
        if not 0 < self.elite_count < self.population_size:
            raise ConfigError("elite_count must be in (0, population_size)")
        if not 0.0 <= self.crossover_rate <= 1.0:
            raise ConfigError("crossover_rate must be in [0, 1]")
        if not 0.0 <= self.mutation_stddev <= 1.0:
            raise ConfigError("mutation_stddev must be in [0, 1]")
        if self.tournament_size < 1:
            raise ConfigError("tournament_size must be >= 1")
        if self.generations < 1:
            raise ConfigError("generations must be >= 1")


@dataclass
class CodesignResult:
    best_design: DesignVector
    best_fitness: float           # [kW/kg]
    best_power: float             # [kW] mission-average net power
    best_mass: MassBreakdown
    history: list[tuple[float, float]] = dc_field(default_factory=list)
    # (best, mean) fitness per generation; best is non-decreasing by elitism


def load_ga_config(path) -> GaConfig:
    """GA settings from the same flat config file the rest of the tool uses."""
    values = read_config_values(path)
    mapping = {
        "ga_population_size": "population_size",
        "ga_generations": "generations",
        "ga_tournament_size": "tournament_size",
        "ga_crossover_rate": "crossover_rate",
        "ga_mutation_stddev": "mutation_stddev",
        "ga_elite_count": "elite_count",
    }
    kwargs = {dst: values[src] for src, dst in mapping.items() if src in values}
    return GaConfig(**kwargs)


def power_to_weight(power_kw: float, design: DesignVector,
                    params: TurbineParameters) -> float:
    """Power-to-weight ratio [kW/kg] for a given mission-average power."""
    return power_kw / total_mass(design, params).total_mass


def fitness(design: DesignVector, field: CurrentField,
            params: TurbineParameters, config: PlannerConfig) -> float:
    """Mission-average net power per unit total mass [kW/kg]."""
    power, fit = _evaluate(design, field, params, config)
    return fit


def _evaluate(design: DesignVector, field: CurrentField,
              params: TurbineParameters,
              config: PlannerConfig) -> tuple[float, float]:
    try:
        power = path_planner.evaluate_design(field, design, params, config)
    except InfeasibleError:
        return float("nan"), INFEASIBLE_FITNESS
    return power, power_to_weight(power, design, params)


def _as_array(design: DesignVector) -> np.ndarray:
    return np.asarray(design.as_tuple(), dtype=float)


def _bounds_arrays(bounds: DesignBounds) -> tuple[np.ndarray, np.ndarray]:
    return _as_array(bounds.lower), _as_array(bounds.upper)


def run_ga(field: CurrentField, params: TurbineParameters, bounds: DesignBounds,
           ga_config: GaConfig, planner_config: PlannerConfig,
           free_genes: tuple[str, ...] = GENES) -> CodesignResult:
    """Seeded, deterministic GA over the design box.

    Uniform random initialization, tournament selection, per-gene blend
    crossover, Gaussian mutation clipped to the bounds, and elitism. Genes
    not in free_genes stay frozen at the base design.
    """
    unknown = set(free_genes) - set(GENES)
    if unknown:
        raise ConfigError(f"unknown design genes: {sorted(unknown)}")
    rng = np.random.default_rng(ga_config.rng_seed)
    lo, hi = _bounds_arrays(bounds)
    base = _as_array(default_design(params))
    free = np.asarray([g in free_genes for g in GENES])
    span = hi - lo

    def make_design(vec: np.ndarray) -> DesignVector:
        return DesignVector(*vec)

    n = ga_config.population_size
    pop = np.where(free[None, :],
                   lo[None, :] + rng.random((n, 3)) * span[None, :],
                   base[None, :])

    def evaluate_all(population: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        powers = np.empty(len(population))
        fits = np.empty(len(population))
        for i, vec in enumerate(population):
            powers[i], fits[i] = _evaluate(make_design(vec), field, params,
                                           planner_config)
        return powers, fits

    powers, fits = evaluate_all(pop)
    best_i = int(np.argmax(fits))
    best_vec, best_fit, best_power = pop[best_i].copy(), fits[best_i], powers[best_i]
    history = [(float(fits.max()), float(fits.mean()))]

    for _ in range(ga_config.generations):
        order = np.argsort(-fits, kind="stable")
        elites = pop[order[:ga_config.elite_count]].copy()

        children = []
        while len(children) < n - ga_config.elite_count:
            parents = []
            for _ in range(2):
                contenders = rng.integers(0, n, size=ga_config.tournament_size)
                parents.append(pop[contenders[np.argmax(fits[contenders])]])
            p1, p2 = parents
            if rng.random() < ga_config.crossover_rate:
                w = rng.random(3)
                child = w * p1 + (1.0 - w) * p2
            else:
                child = p1.copy()
            child = child + rng.normal(0.0, ga_config.mutation_stddev * span, 3)
            child = np.clip(child, lo, hi)
            children.append(np.where(free, child, base))

        pop = np.vstack([elites, np.asarray(children)])
        powers, fits = evaluate_all(pop)
        gen_best = int(np.argmax(fits))
        if fits[gen_best] > best_fit:
            best_vec = pop[gen_best].copy()
            best_fit, best_power = fits[gen_best], powers[gen_best]
        history.append((float(fits.max()), float(fits.mean())))

    best_design = make_design(best_vec)
    return CodesignResult(
        best_design=best_design,
        best_fitness=float(best_fit),
        best_power=float(best_power),
        best_mass=total_mass(best_design, params),
        history=history,
    )


def optimize_single(parameter: str, field: CurrentField,
                    params: TurbineParameters, bounds: DesignBounds,
                    ga_config: GaConfig,
                    planner_config: PlannerConfig) -> CodesignResult:
    """Co-design over one parameter ('rotor', 'generator', or 'tank'),
    freezing the other two genes at their base values."""
    gene_by_name = {"rotor": "rotor_diameter", "generator": "generator_rating",
                    "tank": "tank_volume"}
    if parameter not in gene_by_name:
        raise ConfigError(
            f"parameter must be one of {sorted(gene_by_name)}, got {parameter!r}")
    return run_ga(field, params, bounds, ga_config, planner_config,
                  free_genes=(gene_by_name[parameter],))


@dataclass(frozen=True)
class SensitivityTable:
    """Fitness at -10%/base/+10% of each design parameter, others at base."""

    parameters: tuple[str, ...]   # row labels
    factors: tuple[float, ...]    # column scale factors
    fitness: np.ndarray           # [kW/kg] shape (len(parameters), len(factors))

    def spread(self, parameter: str) -> float:
        row = self.fitness[self.parameters.index(parameter)]
        return float(row.max() - row.min())


def sensitivity_sweep(field: CurrentField, params: TurbineParameters,
                      planner_config: PlannerConfig,
                      rel_change: float = 0.10) -> SensitivityTable:
    """Perturb each design parameter by +/-rel_change about the base design
    and tabulate the resulting power-to-weight ratios."""
    parameters = ("rotor", "generator", "tank")
    gene_by_name = {"rotor": "rotor_diameter", "generator": "generator_rating",
                    "tank": "tank_volume"}
    factors = (1.0 - rel_change, 1.0, 1.0 + rel_change)
    base = default_design(params)
    cache: dict[tuple[float, float, float], float] = {}

    def fit_of(design: DesignVector) -> float:
        key = design.as_tuple()
        if key not in cache:
            cache[key] = fitness(design, field, params, planner_config)
        return cache[key]

    table = np.empty((len(parameters), len(factors)))
    for i, name in enumerate(parameters):
        gene = gene_by_name[name]
        for j, factor in enumerate(factors):
            design = DesignVector(**{
                g: (getattr(base, g) * factor if g == gene else getattr(base, g))
                for g in GENES})
            table[i, j] = fit_of(design)
    return SensitivityTable(parameters=parameters, factors=factors, fitness=table)
