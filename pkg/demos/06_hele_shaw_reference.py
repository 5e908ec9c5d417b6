#!/usr/bin/env python3
"""
The friction-closure reference in closed form: on a saturated interval
the pressure solves -p'' = nu0 G0 (PM - p) with zero boundary values,

    p(x) = PM (1 - cosh(k (x - xc)) / cosh(k l / 2)),   k = sqrt(nu0 G0),

so wide intervals plateau at PM while narrow ones never build pressure.

Run:  python demos/06_hele_shaw_reference.py
"""

import math
import os

from stiffns import ModelParams, hele_shaw_profile, hele_shaw_residual
from stiffns.reporting import svg_line_chart

OUT = os.path.join(os.path.dirname(__file__), "out")
os.makedirs(OUT, exist_ok=True)

params = ModelParams(gamma=2.0, nu0=1.0, g0=1.0, pm=1.0)
series = {}
print("interval half-width   center pressure   (PM = 1)")
for half in (0.5, 1.0, 2.0, 5.0):
    prof = hele_shaw_profile(-half, half, params, n_samples=801)
    series[f"l/2={half:g}"] = (prof.x, prof.p)
    print(f"{half:18g}   {prof.center_value:.6f}")

prof = hele_shaw_profile(-1.0, 1.0, params, n_samples=10000)
print(f"\nself-check on 1e4 nodes: max ODE residual {hele_shaw_residual(prof, params):.2e}")
print(f"center value 1 - 1/cosh(1) = {1 - 1 / math.cosh(1):.12f}")
svg_line_chart(series, os.path.join(OUT, "hele_shaw.svg"),
               title="friction-closure pressure profiles", xlabel="x", ylabel="p")
print(f"wrote {OUT}/hele_shaw.svg")
