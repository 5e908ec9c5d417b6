# -*- coding: utf-8 -*-
"""
stiffns: a 1D numerical laboratory for compressible Navier-Stokes flow
with a pressure-limited growth source, its stiff-pressure (incompressible)
limit, and the a-priori estimates that control both.
"""

from .compactness import (CompactnessReport, KernelSpec, WeightField,
                          criterion_sweep, evolve_weight, evolve_weights_along,
                          kernel_value, maximal_operator, normalized_kernel_mass,
                          oscillation_functional, weight_mass_check)
from .config import ConfigError, RunConfig, build_initial, parse_config, serialize_config
from .diagnostics import (BoundCheckResult, DiagnosticsRecord, dissipation, energy,
                          eps_terms, excess_norm, complementarity_residual,
                          consistency_residual, gronwall_energy_check,
                          mass_bound_check, pressure_l2, run_checks)
from .limits import (DarcyComparison, HeleShawProfile, SweepPlan, SweepReport,
                     compare_to_darcy, hele_shaw_profile, hele_shaw_residual,
                     run_sweep)
from .model import (FluidState, Grid1D, ModelParams, growth_rate,
                    homeostatic_density, pressure, sound_speed)
from .solver import (NegativeDensityError, NumericsError, SolverConfig,
                     SolverStallError, Trajectory, compute_dt, growth_substep,
                     run, step, transport_substep)

__version__ = "0.1.0"

__all__ = [
    "BoundCheckResult", "CompactnessReport", "ConfigError", "DarcyComparison",
    "DiagnosticsRecord", "FluidState", "Grid1D", "HeleShawProfile", "KernelSpec",
    "ModelParams", "NegativeDensityError", "NumericsError", "RunConfig",
    "SolverConfig", "SolverStallError", "SweepPlan", "SweepReport", "Trajectory",
    "WeightField", "build_initial", "compare_to_darcy", "complementarity_residual",
    "compute_dt", "consistency_residual", "criterion_sweep", "dissipation",
    "energy", "eps_terms", "evolve_weight", "evolve_weights_along", "excess_norm",
    "gronwall_energy_check", "growth_rate", "growth_substep", "hele_shaw_profile",
    "hele_shaw_residual", "homeostatic_density", "kernel_value", "mass_bound_check",
    "maximal_operator", "normalized_kernel_mass", "oscillation_functional",
    "parse_config", "pressure", "pressure_l2", "run", "run_checks", "run_sweep",
    "serialize_config", "sound_speed", "step", "transport_substep",
    "weight_mass_check",
]
