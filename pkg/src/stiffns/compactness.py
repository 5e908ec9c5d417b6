# -*- coding: utf-8 -*-
"""
Oscillation functionals, transported weights, and the compactness
diagnostic for families of density fields.

The kernel family on the line is

    K_h(x) = zeta(|x|) / sqrt(x^2 + h^2),      h in (0, 1],

with a smooth cutoff zeta equal to 1 on [0, 1] and 0 from 2 on.  The
normalized kernels K_h / ||K_h||_L1 all have unit mass, so the scale
aggregate over h in (h0, 1] has L1 mass exactly |log h0|.

For a density field the (normalized) oscillation functional

    osc(h) = (1 / ||K_h||_L1) sum_ij dx^2 K_h(x_i - x_j) (rho_i - rho_j)^2 W_ij

measures mean-square oscillation at scale h; W_ij is 1 (plain form) or
(w_i + w_j)/2 with a damping weight w.  A family of fields is
oscillation-compact when the sup over members decays as h -> 0; fields
oscillating at grid scale keep the functional from decaying, which is the
negative control.

The damping weights are transported by the flow and eaten away where the
velocity gradient is large:

    dw/dt + u dw/dx = -lambda * B * w,      B = M |du/dx|,

with M the windowed maximal average.  The discrete update (upwind
advection, implicit decay w / (1 + lambda B dt), explicit diffusion when
eps > 0) preserves 0 <= w <= 1 structurally, without clamping.

Outside the unit ball the kernel keeps its 1/sqrt(x^2+h^2) profile under
the cutoff; its h-dependence there is O(h^2) relative, immaterial to the
small-h behaviour the diagnostics care about.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .model import Grid1D, ModelParams

_LOG_CAP = 700.0  # cap on |log w| contributions where w underflows to 0


def smooth_cutoff(r):
    """C-infinity bridge: 1 on [0, 1], 0 on [2, inf), monotone between."""
    r = np.asarray(r, dtype=np.float64)
    s_up = np.clip(2.0 - r, 0.0, None)    # positive where r < 2
    s_dn = np.clip(r - 1.0, 0.0, None)    # positive where r > 1
    with np.errstate(divide="ignore", over="ignore"):
        f_up = np.where(s_up > 0.0, np.exp(-1.0 / np.where(s_up > 0.0, s_up, 1.0)), 0.0)
        f_dn = np.where(s_dn > 0.0, np.exp(-1.0 / np.where(s_dn > 0.0, s_dn, 1.0)), 0.0)
    out = f_up / np.where(f_up + f_dn > 0.0, f_up + f_dn, 1.0)
    out = np.where(r >= 2.0, 0.0, np.where(r <= 1.0, 1.0, out))
    return float(out) if out.ndim == 0 else out


def kernel_value(x, h: float):
    """K_h(x) = zeta(|x|) (x^2 + h^2)^(-1/2); 0 outside |x| < 2."""
    if not (0.0 < h <= 1.0):
        raise ValueError(f"h must be in (0, 1], got {h}")
    x = np.asarray(x, dtype=np.float64)
    val = smooth_cutoff(np.abs(x)) / np.sqrt(x**2 + h**2)
    return float(val) if val.ndim == 0 else val


def kernel_l1_norm(h: float, n_quad: int = 4001) -> float:
    """||K_h||_L1 on the line: 2 asinh(1/h) plus the cutoff tail on [1, 2].

    The [0, 1] part is exact; the tail uses composite Simpson with n_quad
    nodes (deterministic, accurate to ~1e-12 for the smooth integrand).
    """
    if not (0.0 < h <= 1.0):
        raise ValueError(f"h must be in (0, 1], got {h}")
    if n_quad % 2 == 0:
        n_quad += 1
    r = np.linspace(1.0, 2.0, n_quad)
    tail = smooth_cutoff(r) / np.sqrt(r**2 + h**2)
    w = np.ones(n_quad)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    simpson = float(np.sum(w * tail)) * (r[1] - r[0]) / 3.0
    return 2.0 * (math.asinh(1.0 / h) + simpson)


def normalized_kernel_mass(h0: float) -> float:
    """L1 mass of the scale aggregate of unit-mass kernels: exactly -log h0."""
    if not (0.0 < h0 <= 1.0):
        raise ValueError(f"h0 must be in (0, 1], got {h0}")
    return -math.log(h0)


@dataclass(frozen=True)
class KernelSpec:
    """Decreasing grid of scales plus quadrature resolution for kernel norms."""

    h_list: tuple
    n_quad: int = 4001

    def __post_init__(self):
        hs = tuple(float(h) for h in self.h_list)
        object.__setattr__(self, "h_list", hs)
        if len(hs) < 1 or any(not (0.0 < h <= 1.0) for h in hs):
            raise ValueError("all scales must lie in (0, 1]")
        if any(a <= b for a, b in zip(hs, hs[1:])):
            raise ValueError("h_list must be strictly decreasing")

    @property
    def h0(self) -> float:
        return self.h_list[-1]


def kernel_matrix(centers: np.ndarray, h: float) -> np.ndarray:
    """Pairwise K_h(x_i - x_j); reusable across fields on the same grid."""
    return kernel_value(centers[:, None] - centers[None, :], h)


def oscillation_functional(values: np.ndarray, grid: Grid1D, h: float,
                           weights: np.ndarray | None = None,
                           kmat: np.ndarray | None = None,
                           k_norm: float | None = None) -> float:
    """Normalized kernel-weighted mean-square oscillation of one field.

    With weights w the pair factor is (w_i + w_j)/2, which by symmetry of
    K_h equals summing K_ij w_i (rho_i - rho_j)^2; with w = 1 the two
    forms coincide.  The double sum is O(N^2) but reduces to matrix-vector
    products.
    """
    rho = np.asarray(values, dtype=np.float64)
    if rho.shape != (grid.n_cells,):
        raise ValueError("field does not match the grid")
    if kmat is None:
        kmat = kernel_matrix(grid.centers, h)
    if k_norm is None:
        k_norm = kernel_l1_norm(h)
    rho_sq = rho**2
    if weights is None:
        row = kmat.sum(axis=1)
        total = 2.0 * (float(row @ rho_sq) - float(rho @ (kmat @ rho)))
    else:
        w = np.asarray(weights, dtype=np.float64)
        if w.shape != rho.shape:
            raise ValueError("weights do not match the field")
        row = kmat.sum(axis=1)
        total = (float(w @ (rho_sq * row)) - 2.0 * float(w @ (rho * (kmat @ rho)))
                 + float(w @ (kmat @ rho_sq)))
    return grid.dx**2 * total / k_norm


@dataclass
class CompactnessReport:
    """Per-scale sup values over a family plus the decay verdict."""

    h_list: tuple
    sup_values: np.ndarray           # one per h
    member_values: np.ndarray        # (n_members, n_h)
    slope: float                     # log-log fit of sup vs h
    decay_factor: float              # sup(h_max) / sup(h_min)
    required_factor: float
    passed: bool


def criterion_sweep(fields: list[np.ndarray], grid: Grid1D, spec: KernelSpec,
                    times: np.ndarray | None = None,
                    required_factor: float = 3.0) -> CompactnessReport:
    """Evaluate the compactness diagnostic over a family of density fields.

    Each member is an (n_times, n_cells) array on the common grid (a
    single snapshot may be passed as a 1-row array).  Member values per
    scale are time averages (trapezoid when times are supplied, plain mean
    otherwise); the verdict compares the sup over members at the largest
    and smallest scale.
    """
    if len(fields) < 1:
        raise ValueError("need at least one field")
    mats = [np.atleast_2d(np.asarray(f, dtype=np.float64)) for f in fields]
    shape = mats[0].shape
    if shape[1] != grid.n_cells or any(m.shape != shape for m in mats):
        raise ValueError("family members must share the grid and sample times")
    if times is not None and len(times) != shape[0]:
        raise ValueError("times do not match the sample count")

    member_values = np.zeros((len(mats), len(spec.h_list)))
    for kh, h in enumerate(spec.h_list):
        kmat = kernel_matrix(grid.centers, h)
        k_norm = kernel_l1_norm(h, spec.n_quad)
        for km, m in enumerate(mats):
            vals = np.array([
                oscillation_functional(m[i], grid, h, kmat=kmat, k_norm=k_norm)
                for i in range(shape[0])
            ])
            if times is not None and shape[0] > 1:
                member_values[km, kh] = float(np.trapezoid(vals, times) / (times[-1] - times[0]))
            else:
                member_values[km, kh] = float(np.mean(vals))

    sup_values = member_values.max(axis=0)
    hs = np.array(spec.h_list)
    if len(hs) > 1 and np.all(sup_values > 0.0):
        slope = float(np.polyfit(np.log(hs), np.log(sup_values), 1)[0])
    else:
        slope = 0.0
    decay = float(sup_values[0] / sup_values[-1]) if sup_values[-1] > 0.0 else math.inf
    return CompactnessReport(spec.h_list, sup_values, member_values, slope,
                             decay, required_factor, decay >= required_factor)


def maximal_operator(f: np.ndarray, grid: Grid1D) -> np.ndarray:
    """Windowed maximal average: max over radii dx..L/2 of local means.

    Always at least f itself (the zero-radius window).  Windows are
    intersected with the domain.
    """
    f = np.asarray(f, dtype=np.float64)
    if np.any(f < 0.0):
        raise ValueError("maximal operator expects a nonnegative field")
    n = f.shape[0]
    csum = np.concatenate([[0.0], np.cumsum(f)])
    out = f.copy()
    idx = np.arange(n)
    for k in range(1, n // 2 + 1):
        lo = np.maximum(idx - k, 0)
        hi = np.minimum(idx + k, n - 1)
        means = (csum[hi + 1] - csum[lo]) / (hi - lo + 1)
        np.maximum(out, means, out=out)
    return out


@dataclass
class WeightField:
    """Transported damping weight w in [0, 1] with its decay rate field B."""

    w: np.ndarray
    lam: float
    B: np.ndarray

    def __post_init__(self):
        self.w = np.asarray(self.w, dtype=np.float64)
        self.B = np.asarray(self.B, dtype=np.float64)
        if self.lam < 0.0:
            raise ValueError("lambda must be >= 0")
        if np.any(self.w < 0.0) or np.any(self.w > 1.0):
            raise ValueError("weights must lie in [0, 1]")
        if np.any(self.B < 0.0):
            raise ValueError("decay field B must be nonnegative")


def velocity_gradient_bound(state_u: np.ndarray, grid: Grid1D) -> np.ndarray:
    """B = M |du/dx| from face velocities, per cell."""
    dudx = np.abs((state_u[1:] - state_u[:-1]) / grid.dx)
    return maximal_operator(dudx, grid)


def evolve_weight(weight: WeightField, u: np.ndarray, params: ModelParams,
                  grid: Grid1D, dt: float) -> WeightField:
    """One weight update: upwind advection, implicit decay, explicit diffusion.

    Each stage maps [0, 1] into itself (convex combinations and division
    by 1 + lambda B dt >= 1), so no clamping is ever applied; dt must
    satisfy the advective CFL and, when eps > 0, the diffusive one.
    """
    dx = grid.dx
    u_bar = 0.5 * (u[:-1] + u[1:])
    if dt * float(np.max(np.abs(u_bar))) > dx:
        raise ValueError("dt violates the weight advection CFL")
    w = weight.w
    up = np.maximum(u_bar, 0.0)
    dn = np.minimum(u_bar, 0.0)
    wl = np.concatenate([[w[0]], w[:-1]])   # zero-gradient ghosts
    wr = np.concatenate([w[1:], [w[-1]]])
    w = w - (dt / dx) * (up * (w - wl) + dn * (wr - w))
    w = w / (1.0 + weight.lam * weight.B * dt)
    if params.eps > 0.0:
        r = params.eps * dt / dx**2
        if r > 0.5:
            raise ValueError("dt violates the weight diffusion limit")
        wl = np.concatenate([[w[0]], w[:-1]])
        wr = np.concatenate([w[1:], [w[-1]]])
        w = w + r * (wl - 2.0 * w + wr)
    return WeightField(w=w, lam=weight.lam, B=weight.B)


class WeightMassResult(NamedTuple):
    value: float
    capped: bool  # True when some w underflowed and |log w| was capped


def weight_mass_check(rho: np.ndarray, weight: WeightField, grid: Grid1D) -> WeightMassResult:
    """integral rho |log w|, with |log w| capped at 700 where w = 0."""
    w = weight.w
    with np.errstate(divide="ignore"):
        neg_log = np.where(w > 0.0, -np.log(w), _LOG_CAP)
    capped = bool(np.any(w <= 0.0) or np.any(neg_log > _LOG_CAP))
    neg_log = np.minimum(neg_log, _LOG_CAP)
    return WeightMassResult(float(np.sum(rho * neg_log) * grid.dx), capped)


def evolve_weights_along(traj, params: ModelParams, lam: float,
                         substep_cfl: float = 0.5):
    """Transport weights through a trajectory, refreshing B at each output.

    Velocities are frozen per output interval and substepped to honour the
    weight CFL; returns the final WeightField and the (t, integral
    rho|log w|) history at output times.
    """
    grid = traj.grid
    w = WeightField(w=np.ones(grid.n_cells), lam=lam,
                    B=velocity_gradient_bound(traj.snapshots[0].u, grid))
    history = [(traj.snapshots[0].t,
                weight_mass_check(traj.snapshots[0].rho, w, grid).value)]
    for prev, cur in zip(traj.snapshots[:-1], traj.snapshots[1:]):
        dt_out = cur.t - prev.t
        w = WeightField(w=w.w, lam=lam, B=velocity_gradient_bound(prev.u, grid))
        u_bar_max = float(np.max(np.abs(0.5 * (prev.u[:-1] + prev.u[1:]))))
        n_sub = max(1, int(math.ceil(dt_out * u_bar_max / (substep_cfl * grid.dx))))
        if params.eps > 0.0:
            n_sub = max(n_sub, int(math.ceil(dt_out * params.eps / (0.25 * grid.dx**2))))
        for _ in range(n_sub):
            w = evolve_weight(w, prev.u, params, grid, dt_out / n_sub)
        history.append((cur.t, weight_mass_check(cur.rho, w, grid).value))
    return w, history
