#!/usr/bin/env python3
"""
What the free boundary looks like at finite stiffness: final density,
velocity and pressure profiles at a soft (gamma = 10) and a stiff
(gamma = 80) exponent, plus the descriptive comparison of the congested
pressure against the friction-closure reference profile.

Run:  python demos/03_congestion_profiles.py
"""

import os

import numpy as np

from stiffns import (FluidState, Grid1D, ModelParams, SolverConfig,
                     compare_to_darcy, pressure, run)
from stiffns.reporting import svg_line_chart

OUT = os.path.join(os.path.dirname(__file__), "out")
os.makedirs(OUT, exist_ok=True)

grid = Grid1D(length=2.0, n_cells=400)
x = grid.centers
initial = FluidState(rho=0.9 * np.exp(-((x - 1.0) / 0.15) ** 2), u=np.zeros(401))
config = SolverConfig(cfl=0.5, dt_max=1e-2, dt_min=1e-13,
                      t_end=0.5, output_every=0.05)

rho_series, p_series, u_series = {}, {}, {}
for gamma in (10.0, 80.0):
    params = ModelParams(gamma=gamma)
    traj = run(initial, params, grid, config)
    final = traj.snapshots[-1]
    rho_series[f"gamma={gamma:g}"] = (x, final.rho)
    p_series[f"gamma={gamma:g}"] = (x, pressure(final.rho, gamma))
    u_series[f"gamma={gamma:g}"] = (grid.faces, final.u)

    darcy = compare_to_darcy(final, params, grid, saturated_delta=0.05)
    print(f"gamma={gamma:3g}: plateau max rho = {final.rho.max():.5f}, "
          f"saturated block {darcy.n_cells} cells on "
          f"[{darcy.a:.3f}, {darcy.b:.3f}], friction-profile rms {darcy.rms:.3f}")

svg_line_chart(rho_series, os.path.join(OUT, "profiles_rho.svg"),
               title="final density: congested plateau and front",
               xlabel="x", ylabel="rho")
svg_line_chart(p_series, os.path.join(OUT, "profiles_p.svg"),
               title="final pressure: active only on the congested set",
               xlabel="x", ylabel="p")
svg_line_chart(u_series, os.path.join(OUT, "profiles_u.svg"),
               title="final velocity: growth-driven outflow",
               xlabel="x", ylabel="u")
print(f"\nwrote {OUT}/profiles_rho.svg, profiles_p.svg, profiles_u.svg")
