# -*- coding: utf-8 -*-
"""
Constitutive laws, parameters, grid, and state for the growth-driven
compressible Navier-Stokes system

    d/dt rho + d/dx(rho u) = rho G(p) + eps d2/dx2 rho
    rho (d/dt u + u d/dx u) - (mu + xi) d2/dx2 u + d/dx p = 0

with the barotropic pressure law p = rho^gamma and the pressure-limited
growth rate G(p) = G0 (PM - p).  PM is the homeostatic pressure: growth
stops exactly when the local pressure reaches it, and the spatially
uniform equilibrium density is PM^(1/gamma).

The exponent gamma may be large (several hundred), so every power of rho
is evaluated in the log domain: rho^gamma = exp(gamma * log(rho)).  Direct
powers would overflow for rho > 1 and underflow to zero information loss
for rho < 1 long before gamma ~ 300.

Everything here is a pure value-level function over plain numpy arrays;
FluidState is an immutable snapshot.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ModelParams:
    """Physical and asymptotic constants of the model.

    gamma : adiabatic exponent, >= 1 (stiff-pressure regime is gamma >> 1)
    mu    : shear viscosity, > 0
    xi    : bulk-type viscosity; mu + xi > 0 is what the 1D momentum
            equation actually sees
    g0    : growth rate constant (1/time), > 0
    pm    : homeostatic pressure, > 0
    eps   : artificial density diffusion (length^2/time), >= 0
    nu0   : Darcy friction, > 0; used only by the Hele-Shaw reference
    """

    gamma: float
    mu: float = 0.1
    xi: float = 0.1
    g0: float = 3.0
    pm: float = 2.0
    eps: float = 0.0
    nu0: float = 1.0

    def __post_init__(self):
        vals = (self.gamma, self.mu, self.xi, self.g0, self.pm, self.eps, self.nu0)
        if not all(np.isfinite(v) for v in vals):
            raise ValueError("all model parameters must be finite")
        if self.gamma < 1.0:
            raise ValueError(f"gamma must be >= 1, got {self.gamma}")
        if self.mu <= 0.0:
            raise ValueError(f"mu must be > 0, got {self.mu}")
        if self.mu + self.xi <= 0.0:
            raise ValueError(f"mu + xi must be > 0, got {self.mu + self.xi}")
        if self.g0 <= 0.0:
            raise ValueError(f"g0 must be > 0, got {self.g0}")
        if self.pm <= 0.0:
            raise ValueError(f"pm must be > 0, got {self.pm}")
        if self.eps < 0.0:
            raise ValueError(f"eps must be >= 0, got {self.eps}")
        if self.nu0 <= 0.0:
            raise ValueError(f"nu0 must be > 0, got {self.nu0}")

    @property
    def visc(self) -> float:
        """Combined 1D viscosity mu + xi."""
        return self.mu + self.xi


@dataclass(frozen=True)
class Grid1D:
    """Uniform cell-centered grid on [0, length] with n_cells cells.

    Cell centers sit at (i + 1/2) dx, faces at i dx for i = 0..n_cells.
    The continuous problem lives on the whole line with decay at infinity;
    the box truncates it, so initial data is expected to be negligible
    near the walls (checked by the preset builders, not here).
    """

    length: float
    n_cells: int

    def __post_init__(self):
        if not (np.isfinite(self.length) and self.length > 0.0):
            raise ValueError(f"length must be > 0, got {self.length}")
        if self.n_cells < 3:
            raise ValueError(f"n_cells must be >= 3, got {self.n_cells}")

    @property
    def dx(self) -> float:
        return self.length / self.n_cells

    @property
    def centers(self) -> np.ndarray:
        return (np.arange(self.n_cells) + 0.5) * self.dx

    @property
    def faces(self) -> np.ndarray:
        return np.arange(self.n_cells + 1) * self.dx


@dataclass(frozen=True)
class FluidState:
    """Density (cell centers) and velocity (faces) at one instant.

    rho has n_cells entries, u has n_cells + 1; u[0] = u[-1] = 0 is the
    wall condition.  Momentum rho*u is derived where needed, never stored.
    """

    rho: np.ndarray
    u: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "rho", np.asarray(self.rho, dtype=np.float64))
        object.__setattr__(self, "u", np.asarray(self.u, dtype=np.float64))
        if self.u.shape != (self.rho.shape[0] + 1,):
            raise ValueError(
                f"u must have len(rho)+1 entries, got {self.u.shape} for {self.rho.shape}"
            )
        if not np.all(np.isfinite(self.rho)) or not np.all(np.isfinite(self.u)):
            raise ValueError("state fields must be finite")
        if np.any(self.rho < 0.0):
            raise ValueError("density must be nonnegative")

    def validate_walls(self, atol: float = 0.0) -> None:
        if abs(self.u[0]) > atol or abs(self.u[-1]) > atol:
            raise ValueError("wall condition u[0] = u[-1] = 0 violated")


def _log_power(rho: np.ndarray, exponent: float) -> tuple[np.ndarray, int]:
    """rho**exponent via exp(exponent*log(rho)); exact 0 at rho = 0.

    Returns (values, n_overflow) where n_overflow counts entries clamped
    to the largest finite float.
    """
    rho = np.asarray(rho, dtype=np.float64)
    if np.any(rho < 0.0):
        raise ValueError("density must be nonnegative")
    out = np.zeros_like(rho)
    pos = rho > 0.0
    with np.errstate(divide="ignore", over="ignore"):
        vals = np.exp(exponent * np.log(rho[pos]))
    overflowed = np.isinf(vals)
    n_overflow = int(np.count_nonzero(overflowed))
    vals[overflowed] = np.finfo(np.float64).max
    out[pos] = vals
    return out, n_overflow


def pressure(rho, gamma: float, return_overflow: bool = False):
    """Barotropic pressure p = rho^gamma, log-domain, vacuum-safe.

    Clamps to the largest finite float on overflow; pass
    return_overflow=True to also get the count of clamped entries.
    """
    if gamma < 1.0:
        raise ValueError(f"gamma must be >= 1, got {gamma}")
    scalar = np.isscalar(rho)
    p, novf = _log_power(np.atleast_1d(rho), gamma)
    p = float(p[0]) if scalar else p
    return (p, novf) if return_overflow else p


def growth_rate(p, params: ModelParams):
    """Growth rate G(p) = G0 (PM - p); negative above the homeostatic pressure."""
    p = np.asarray(p, dtype=np.float64)
    out = params.g0 * (params.pm - p)
    return float(out) if out.ndim == 0 else out


def sound_speed(rho, gamma: float):
    """Barotropic sound speed sqrt(gamma rho^(gamma-1)); 0 at vacuum."""
    if gamma < 1.0:
        raise ValueError(f"gamma must be >= 1, got {gamma}")
    scalar = np.isscalar(rho)
    pw, _ = _log_power(np.atleast_1d(rho), gamma - 1.0)
    c = np.sqrt(gamma * pw)
    return float(c[0]) if scalar else c


def homeostatic_density(params: ModelParams) -> float:
    """Uniform equilibrium density PM^(1/gamma) where growth vanishes."""
    return float(np.exp(np.log(params.pm) / params.gamma))
