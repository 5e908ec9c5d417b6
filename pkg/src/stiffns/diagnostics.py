# -*- coding: utf-8 -*-
"""
Quantitative estimates evaluated on discrete trajectories.

The two central runtime quantities are the energy and the dissipation,

    E(t) = integral( rho |u|^2 / 2  +  rho^gamma / (gamma - 1) ),
    J(t) = integral( mu |du/dx|^2 + xi (du/dx)^2 )  =  (mu+xi) integral (du/dx)^2,

together with the a-priori bounds they must satisfy:

  * mass bound:    mass(t) <= exp(G0 PM t) mass(0);
  * energy bound:  E(t) + int_0^t J <= (E(0) + C t) exp(G0 PM t) with the
    explicit constant C = gamma/(gamma-1) * G0 * PM^(2-1/gamma)
    * exp(G0 PM T) * mass(0), assembled from the L1 control of rho and the
    pointwise inequality rho^gamma G(p) <= G0 PM^(2-1/gamma) rho that holds
    wherever the growth term is positive.

The stiff-limit observables live here too: the excess norm ||(rho-1)_+||,
the running space-time integrals of p^2 and of the complementarity defect
p (1 - rho), the consistency residual du/dx - G(p) on the nearly
saturated set, and the two eps-weighted gradient accumulators of the
regularized system.

Space integrals use midpoint quadrature on the cell grid; all time
integrals are trapezoids at the output cadence, which is a diagnostic
accuracy limit, not a solver one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .model import FluidState, Grid1D, ModelParams, growth_rate, pressure, _log_power

#: default threshold: cells with rho >= 1 - delta count as saturated
SATURATION_DELTA = 0.05


def energy(state: FluidState, params: ModelParams, grid: Grid1D) -> float:
    """Total energy E; requires gamma > 1 (the potential carries 1/(gamma-1))."""
    if params.gamma <= 1.0:
        raise ValueError("energy requires gamma > 1")
    u_bar = 0.5 * (state.u[:-1] + state.u[1:])
    pot = pressure(state.rho, params.gamma) / (params.gamma - 1.0)
    return float(np.sum(0.5 * state.rho * u_bar**2 + pot) * grid.dx)


def dissipation(state: FluidState, params: ModelParams, grid: Grid1D) -> float:
    """Viscous dissipation J = (mu+xi) integral (du/dx)^2."""
    dudx = (state.u[1:] - state.u[:-1]) / grid.dx
    return float(params.visc * np.sum(dudx**2) * grid.dx)


def lq_norm(state: FluidState, grid: Grid1D, q: float) -> float:
    if q < 1.0:
        raise ValueError("q must be >= 1")
    return float(np.sum(state.rho**q * grid.dx) ** (1.0 / q))


def excess_norm(state: FluidState, grid: Grid1D, q: float = 2.0) -> float:
    """Spatial L^q norm of the density excess (rho - 1)_+."""
    if q < 1.0:
        raise ValueError("q must be >= 1")
    plus = np.maximum(state.rho - 1.0, 0.0)
    return float(np.sum(plus**q * grid.dx) ** (1.0 / q))


class ConsistencyResult(NamedTuple):
    rms: float
    n_cells: int  # 0 flags an empty saturated set


def consistency_residual(state: FluidState, params: ModelParams, grid: Grid1D,
                         delta: float = SATURATION_DELTA) -> ConsistencyResult:
    """RMS of du/dx - G(p) over cells with rho >= 1 - delta.

    In the stiff limit the divergence balances the growth rate on the
    saturated set; this measures how far a finite-gamma state is from that.
    """
    if not (0.0 < delta < 1.0):
        raise ValueError("delta must be in (0, 1)")
    mask = state.rho >= 1.0 - delta
    n = int(np.count_nonzero(mask))
    if n == 0:
        return ConsistencyResult(0.0, 0)
    dudx = (state.u[1:] - state.u[:-1]) / grid.dx
    g = growth_rate(pressure(state.rho[mask], params.gamma), params)
    res = dudx[mask] - g
    return ConsistencyResult(float(np.sqrt(np.mean(res**2))), n)


def _grad_centered(f: np.ndarray, dx: float) -> np.ndarray:
    """Centered interior differences, one-sided at the ends."""
    g = np.empty_like(f)
    g[1:-1] = (f[2:] - f[:-2]) / (2.0 * dx)
    g[0] = (f[1] - f[0]) / dx
    g[-1] = (f[-1] - f[-2]) / dx
    return g


def _eps_integrands(state: FluidState, params: ModelParams, grid: Grid1D) -> tuple[float, float]:
    """Instantaneous eps ||dx rho||^2 and eps gamma int rho^(gamma-2) (dx rho)^2.

    Vacuum cells contribute zero to the weighted integrand (log-domain
    power returns 0 at rho = 0); the regularized construction assumes
    gamma >= 2 so the weight is genuinely singular only below that.
    """
    if params.eps == 0.0:
        return 0.0, 0.0
    g = _grad_centered(state.rho, grid.dx)
    grad_sq = float(np.sum(g**2) * grid.dx)
    w, _ = _log_power(state.rho, params.gamma - 2.0)
    weighted = float(np.sum(w * g**2) * grid.dx)
    return params.eps * grad_sq, params.eps * params.gamma * weighted


@dataclass
class DiagnosticsRecord:
    """One output row: instantaneous norms plus running time integrals.

    Cumulative fields are trapezoids of the matching *_inst integrands at
    the output cadence.  energy is NaN for gamma = 1 runs (the potential
    term is undefined there); every other entry is finite.
    """

    t: float
    energy: float
    dissipation_cum: float
    mass: float
    l1: float
    l2: float
    l4: float
    pressure_l2_cum: float       # running integral of p^2 over time and space
    excess_l2: float
    complementarity_cum: float   # running integral of p (1 - rho), signed
    consistency_rms: float
    eps_grad_cum: float
    eps_pressure_cum: float
    # instantaneous integrands kept for the trapezoid chain and for plots
    dissipation_inst: float = 0.0
    pressure_sq_inst: float = 0.0
    complementarity_inst: float = 0.0
    eps_grad_inst: float = 0.0
    eps_pressure_inst: float = 0.0
    consistency_cells: int = 0


def make_record(state: FluidState, params: ModelParams, grid: Grid1D,
                prev: DiagnosticsRecord | None) -> DiagnosticsRecord:
    """Evaluate all diagnostics at one output time, chaining cumulatives."""
    p = pressure(state.rho, params.gamma)
    j = dissipation(state, params, grid)
    p_sq = float(np.sum(p**2) * grid.dx)
    compl = float(np.sum(p * (1.0 - state.rho)) * grid.dx)
    eg, ep = _eps_integrands(state, params, grid)
    cons = consistency_residual(state, params, grid)
    e = energy(state, params, grid) if params.gamma > 1.0 else math.nan

    if prev is None:
        j_cum = psq_cum = compl_cum = eg_cum = ep_cum = 0.0
    else:
        half = 0.5 * (state.t - prev.t)
        j_cum = prev.dissipation_cum + half * (prev.dissipation_inst + j)
        psq_cum = prev.pressure_l2_cum + half * (prev.pressure_sq_inst + p_sq)
        compl_cum = prev.complementarity_cum + half * (prev.complementarity_inst + compl)
        eg_cum = prev.eps_grad_cum + half * (prev.eps_grad_inst + eg)
        ep_cum = prev.eps_pressure_cum + half * (prev.eps_pressure_inst + ep)

    return DiagnosticsRecord(
        t=state.t,
        energy=e,
        dissipation_cum=j_cum,
        mass=float(np.sum(state.rho) * grid.dx),
        l1=lq_norm(state, grid, 1.0),
        l2=lq_norm(state, grid, 2.0),
        l4=lq_norm(state, grid, 4.0),
        pressure_l2_cum=psq_cum,
        excess_l2=excess_norm(state, grid, 2.0),
        complementarity_cum=compl_cum,
        consistency_rms=cons.rms,
        eps_grad_cum=eg_cum,
        eps_pressure_cum=ep_cum,
        dissipation_inst=j,
        pressure_sq_inst=p_sq,
        complementarity_inst=compl,
        eps_grad_inst=eg,
        eps_pressure_inst=ep,
        consistency_cells=cons.n_cells,
    )


@dataclass(frozen=True)
class BoundCheckResult:
    """Outcome of one a-priori bound check.

    worst_margin is relative: min over outputs of (bound - observed) /
    max(|bound|, tiny).  pass iff worst_margin >= -tolerance.
    """

    name: str
    passed: bool
    worst_margin: float
    worst_time: float
    tolerance: float


def _margin_check(name, times, observed, bounds, tol) -> BoundCheckResult:
    scale = np.maximum(np.abs(bounds), 1e-300)
    margins = (bounds - observed) / scale
    k = int(np.argmin(margins))
    worst = float(margins[k])
    return BoundCheckResult(name, worst >= -tol, worst, float(times[k]), tol)


def mass_bound_check(traj, params: ModelParams, tol: float = 1e-8) -> BoundCheckResult:
    """mass(t) <= exp(G0 PM t) mass(0) at every output."""
    times = np.array([r.t for r in traj.records])
    mass = np.array([r.mass for r in traj.records])
    bound = mass[0] * np.exp(params.g0 * params.pm * times)
    return _margin_check("mass_bound", times, mass, bound, tol)


def gronwall_constant(params: ModelParams, t_end: float, mass0: float) -> float:
    """Explicit constant C of the energy envelope (see module docstring)."""
    if params.gamma <= 1.0:
        raise ValueError("gronwall constant requires gamma > 1")
    g = params.gamma
    pm_pow = math.exp((2.0 - 1.0 / g) * math.log(params.pm))
    return (g / (g - 1.0)) * params.g0 * pm_pow * math.exp(params.g0 * params.pm * t_end) * mass0


def gronwall_energy_check(traj, params: ModelParams, tol: float = 1e-6) -> BoundCheckResult:
    """E(t) + int_0^t J <= (E(0) + C t) exp(G0 PM t) with the explicit C."""
    times = np.array([r.t for r in traj.records])
    e = np.array([r.energy for r in traj.records])
    j_cum = np.array([r.dissipation_cum for r in traj.records])
    c = gronwall_constant(params, float(times[-1]), traj.records[0].mass)
    bound = (e[0] + c * times) * np.exp(params.g0 * params.pm * times)
    return _margin_check("gronwall_energy", times, e + j_cum, bound, tol)


def pressure_l2(traj) -> float:
    """Space-time L2 norm of the pressure over the whole run."""
    return float(math.sqrt(max(traj.records[-1].pressure_l2_cum, 0.0)))


def complementarity_residual(traj) -> float:
    """Running integral of p (1 - rho) over the whole run (signed)."""
    return float(traj.records[-1].complementarity_cum)


def eps_terms(traj) -> tuple[float, float]:
    """Final values of the two eps-weighted gradient accumulators."""
    last = traj.records[-1]
    return last.eps_grad_cum, last.eps_pressure_cum


def run_checks(traj, params: ModelParams,
               mass_tol: float = 1e-8, energy_tol: float = 1e-6) -> list[BoundCheckResult]:
    """The standard bound battery evaluated on one trajectory."""
    checks = [mass_bound_check(traj, params, mass_tol)]
    if params.gamma > 1.0:
        checks.append(gronwall_energy_check(traj, params, energy_tol))
        e = np.array([r.energy for r in traj.records])
        k = int(np.argmin(e))
        checks.append(BoundCheckResult("energy_nonnegative", bool(e[k] >= 0.0),
                                       float(e[k]), traj.records[k].t, 0.0))
    j_cum = np.array([r.dissipation_cum for r in traj.records])
    dj = np.diff(j_cum) if len(j_cum) > 1 else np.zeros(1)
    k = int(np.argmin(dj))
    checks.append(BoundCheckResult("dissipation_monotone", bool(dj[k] >= -1e-15),
                                   float(dj[k]), traj.records[min(k + 1, len(traj.records) - 1)].t,
                                   1e-15))
    floors = traj.step_stats.floor_activations
    checks.append(BoundCheckResult("no_floor_activations", floors == 0,
                                   -float(floors), traj.records[-1].t, 0.0))
    n = traj.grid.n_cells
    drift_tol = 10.0 * np.finfo(np.float64).eps * n
    drift = traj.step_stats.max_mass_drift
    checks.append(BoundCheckResult("transport_mass_conservation", drift <= drift_tol,
                                   drift_tol - drift, traj.records[-1].t, drift_tol))
    return checks
