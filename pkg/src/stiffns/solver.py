# -*- coding: utf-8 -*-
"""
Time integration of the regularized system on a staggered 1D grid.

One step is a Strang composition

    growth(dt/2) o transport(dt) o growth(dt/2)

where the growth substep solves d/dt rho = G0 rho (PM - rho^gamma) in
closed form (a logistic in y = rho^gamma, evaluated in the log domain so
vacuum tails keep growing at the correct exponential rate), and the
transport substep advances mass and momentum:

  * mass:     first-order upwind fluxes rho*u at faces, plus explicit
              eps-diffusion of rho in flux form with zero-Neumann walls;
              both telescopes, so mass is conserved to roundoff;
  * momentum: nonconservative velocity form on faces -- upwind advection,
              pressure gradient and the eps-correction -eps drho dx u,
              divided by the floored face density; the viscous term
              (mu+xi) d2u/dx2 / rho_f is integrated implicitly (backward
              Euler, tridiagonal solve), which is unconditionally stable
              and in particular survives the near-vacuum faces where the
              effective diffusivity (mu+xi)/rho_f blows up;
  * walls:    u = 0 (Dirichlet), rho zero-Neumann.

The growth source has stiffness ~ gamma*G0 near rho ~ 1; the closed form
removes it entirely, so dt is limited only by advection (|u| + sound
speed) and, when eps > 0, by the explicit density diffusion.  u is left
untouched by the growth substep: the nonconservative momentum form has no
growth term, the momentum rho*u rescales with rho automatically.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .diagnostics import make_record
from .model import FluidState, Grid1D, ModelParams, pressure, sound_speed

_TINY_SPEED = 1e-30  # avoids 0/0 in the advective CFL; never affects real wave speeds


class SolverStallError(RuntimeError):
    """dt fell below dt_min -- usually a blow-up in disguise."""


class NumericsError(RuntimeError):
    """Non-finite field detected during time stepping."""


class NegativeDensityError(RuntimeError):
    """Strict mode: transport produced a negative density."""


@dataclass
class SolverConfig:
    cfl: float = 0.5
    dt_max: float = 1e-2
    dt_min: float = 1e-13
    rho_floor: float = 1e-12
    t_end: float = 1.0
    output_every: float = 0.02
    strict: bool = False

    def __post_init__(self):
        if not (0.0 < self.cfl <= 1.0):
            raise ValueError(f"cfl must be in (0, 1], got {self.cfl}")
        if not (0.0 < self.dt_min < self.dt_max):
            raise ValueError("need 0 < dt_min < dt_max")
        if self.rho_floor <= 0.0:
            raise ValueError("rho_floor must be > 0")
        if self.t_end < 0.0:
            raise ValueError("t_end must be >= 0")
        if self.output_every <= 0.0:
            raise ValueError("output_every must be > 0")


@dataclass
class StepStats:
    """Per-run bookkeeping: dt history and robustness counters."""

    dt_history: list = field(default_factory=list)
    floor_activations: int = 0
    overflow_count: int = 0
    max_mass_drift: float = 0.0  # per-substep |d mass| / max(1, mass)
    n_steps: int = 0


@dataclass
class Trajectory:
    """Time-ordered snapshots plus per-output diagnostics records."""

    grid: Grid1D
    params: ModelParams
    snapshots: list
    records: list
    step_stats: StepStats

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.snapshots])

    def density_matrix(self) -> np.ndarray:
        """Snapshots stacked as a (n_times, n_cells) array."""
        return np.stack([s.rho for s in self.snapshots])


def compute_dt(state: FluidState, params: ModelParams, grid: Grid1D,
               config: SolverConfig) -> float:
    """Stable step size: advective CFL plus the explicit eps-diffusion limit.

    The viscous term is implicit and contributes no constraint.  Raises
    SolverStallError when the result falls below dt_min.
    """
    c = sound_speed(state.rho, params.gamma)
    u_cell = np.maximum(np.abs(state.u[:-1]), np.abs(state.u[1:]))
    dt = min(config.dt_max, config.cfl * grid.dx / float(np.max(u_cell + c + _TINY_SPEED)))
    if params.eps > 0.0:
        dt = min(dt, config.cfl * grid.dx**2 / (2.0 * params.eps))
    if dt < config.dt_min:
        raise SolverStallError(
            f"dt = {dt:.3e} < dt_min = {config.dt_min:.3e} at t = {state.t:.6g}"
        )
    return dt


def growth_substep(state: FluidState, params: ModelParams, dt: float) -> FluidState:
    """Exact growth update: logistic in y = rho^gamma, log-domain.

    y(dt) = PM y0 / (y0 + (PM - y0) exp(-gamma G0 PM dt)), then
    rho = y^(1/gamma).  Fixes vacuum and the homeostatic density exactly,
    and preserves rho <= rho0 * exp(G0 PM dt) cellwise.  u is unchanged.
    """
    if dt == 0.0:
        return state
    g, pm = params.g0, params.pm
    s = params.gamma * g * pm * dt
    with np.errstate(divide="ignore"):
        ln_rho = np.log(state.rho)  # -inf at vacuum, handled by logaddexp
    ln_y0 = params.gamma * ln_rho
    # log of y0 + (PM - y0) e^{-s}, written as logaddexp(log PM - s, log y0 + log(1-e^{-s}))
    ln_den = np.logaddexp(np.log(pm) - s, ln_y0 + np.log1p(-np.exp(-s)))
    rho_new = np.exp(ln_rho + (np.log(pm) - ln_den) / params.gamma)
    return FluidState(rho=rho_new, u=state.u, t=state.t)


def _solve_tridiagonal(lower, diag, upper, rhs):
    """Thomas algorithm; coefficient arrays are consumed."""
    n = diag.shape[0]
    for i in range(1, n):
        w = lower[i] / diag[i - 1]
        diag[i] -= w * upper[i - 1]
        rhs[i] -= w * rhs[i - 1]
    x = np.empty_like(rhs)
    x[-1] = rhs[-1] / diag[-1]
    for i in range(n - 2, -1, -1):
        x[i] = (rhs[i] - upper[i] * x[i + 1]) / diag[i]
    return x


def transport_substep(state: FluidState, params: ModelParams, grid: Grid1D,
                      dt: float, rho_floor: float = 1e-12, strict: bool = False,
                      stats: StepStats | None = None) -> FluidState:
    """One transport update of mass and face momentum (see module docstring).

    All fluxes and gradients are evaluated at time n.  In lenient mode a
    negative post-update density is floored to rho_floor and counted; in
    strict mode it raises NegativeDensityError.
    """
    rho, u = state.rho, state.u
    dx = grid.dx
    n = rho.shape[0]

    # mass: upwind flux rho*u at interior faces, eps-diffusion in flux form
    flux = np.zeros(n + 1)
    uf = u[1:-1]
    flux[1:-1] = uf * np.where(uf > 0.0, rho[:-1], rho[1:])
    if params.eps > 0.0:
        flux[1:-1] -= params.eps * (rho[1:] - rho[:-1]) / dx
    rho_new = rho - (dt / dx) * (flux[1:] - flux[:-1])

    if stats is not None:
        mass_before = float(np.sum(rho)) * dx
        drift = abs(float(np.sum(rho_new)) * dx - mass_before)
        stats.max_mass_drift = max(stats.max_mass_drift,
                                   drift / max(1.0, abs(mass_before)))

    neg = rho_new < 0.0
    if np.any(neg):
        if strict:
            raise NegativeDensityError(
                f"{int(np.count_nonzero(neg))} negative cells at t = {state.t:.6g}"
            )
        rho_new = np.where(neg, rho_floor, rho_new)
        if stats is not None:
            stats.floor_activations += int(np.count_nonzero(neg))

    # face momentum, nonconservative form, time-n values throughout
    p, novf = pressure(rho, params.gamma, return_overflow=True)
    if stats is not None:
        stats.overflow_count += novf
    rho_f = np.maximum(0.5 * (rho[:-1] + rho[1:]), rho_floor)
    grad_p = (p[1:] - p[:-1]) / dx
    dudx_back = (u[1:-1] - u[:-2]) / dx
    dudx_fwd = (u[2:] - u[1:-1]) / dx
    adv = uf * np.where(uf > 0.0, dudx_back, dudx_fwd)
    rhs = uf + dt * (-adv - grad_p / rho_f)
    if params.eps > 0.0:
        drho_f = (rho[1:] - rho[:-1]) / dx
        du_f = (u[2:] - u[:-2]) / (2.0 * dx)
        rhs -= dt * params.eps * drho_f * du_f / rho_f

    # implicit viscosity: (I - dt (mu+xi)/rho_f d2/dx2) u = rhs, u = 0 walls
    beta = dt * params.visc / (rho_f * dx**2)
    u_new = np.zeros(n + 1)
    u_new[1:-1] = _solve_tridiagonal(-beta.copy(), 1.0 + 2.0 * beta,
                                     -beta.copy(), rhs.copy())

    return FluidState(rho=rho_new, u=u_new, t=state.t + dt)


def step(state: FluidState, params: ModelParams, grid: Grid1D,
         config: SolverConfig, dt: float | None = None,
         stats: StepStats | None = None) -> tuple[FluidState, float]:
    """One Strang step; returns the new state and the dt actually used."""
    if dt is None:
        dt = compute_dt(state, params, grid, config)
    s = growth_substep(state, params, 0.5 * dt)
    s = transport_substep(s, params, grid, dt, rho_floor=config.rho_floor,
                          strict=config.strict, stats=stats)
    s = growth_substep(s, params, 0.5 * dt)
    return s, dt


def run(initial: FluidState, params: ModelParams, grid: Grid1D,
        config: SolverConfig) -> Trajectory:
    """Advance to t_end, recording snapshots and diagnostics every output_every.

    Steps are clamped to land exactly on output times.  Raises
    SolverStallError, NegativeDensityError (strict mode) or NumericsError
    (non-finite fields) as typed failures.
    """
    if initial.rho.shape[0] != grid.n_cells:
        raise ValueError("initial state does not match the grid")
    initial.validate_walls()
    if np.any(initial.rho > 1.0 + 1e-12):
        warnings.warn("initial density exceeds 1; stiff-limit bounds assume rho0 <= 1",
                      stacklevel=2)

    stats = StepStats()
    state = FluidState(rho=initial.rho, u=initial.u, t=0.0)
    snapshots = [state]
    records = [make_record(state, params, grid, prev=None)]
    if config.t_end == 0.0:
        return Trajectory(grid, params, snapshots, records, stats)

    n_out = 1
    next_out = min(n_out * config.output_every, config.t_end)
    t = 0.0
    while t < config.t_end:
        dt = compute_dt(state, params, grid, config)
        hit_output = False
        if t + dt >= next_out - 1e-14 * max(1.0, next_out):
            dt = next_out - t
            hit_output = True
        try:
            state, dt_used = step(state, params, grid, config, dt=dt, stats=stats)
        except ValueError as exc:
            raise NumericsError(f"non-finite field near t = {t:.6g}: {exc}") from exc
        stats.dt_history.append(dt_used)
        stats.n_steps += 1
        t = next_out if hit_output else t + dt_used
        state = FluidState(rho=state.rho, u=state.u, t=t)
        if hit_output:
            snapshots.append(state)
            records.append(make_record(state, params, grid, prev=records[-1]))
            if next_out >= config.t_end:
                break
            n_out += 1
            next_out = min(n_out * config.output_every, config.t_end)
    return Trajectory(grid, params, snapshots, records, stats)
