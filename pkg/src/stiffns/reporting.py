# -*- coding: utf-8 -*-
"""
Result serialization: diagnostics and snapshot CSVs, verdict JSON, sweep
and compactness tables, optional SVG line charts, and the output manifest.

Column order and names are frozen; the manifest carries a schema_version
that must be bumped with any change.  Floats are written with repr
(shortest round-trip form), so identical runs serialize to identical
bytes.  Nothing here embeds wall-clock time: reruns of a deterministic
run are byte-identical.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import asdict, dataclass

import numpy as np

from .model import pressure

SCHEMA_VERSION = 1

DIAGNOSTICS_COLUMNS = (
    "t", "energy", "dissipation_cum", "mass", "l1", "l2", "l4",
    "pressure_l2_cum", "excess_l2", "complementarity_cum",
    "consistency_rms", "eps_grad_cum", "eps_pressure_cum",
)

SNAPSHOT_COLUMNS = ("t", "x", "rho", "u", "p")

SWEEP_COLUMNS = (
    "axis", "value", "excess_l2_final", "pressure_l2", "complementarity_cum",
    "consistency_rms", "consistency_cells", "eps_grad_cum", "eps_pressure_cum",
    "mass_final", "energy_final", "failed",
)

COMPACTNESS_COLUMNS = ("h", "sup_oscillation")


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    if math.isnan(v):
        return "nan"
    return repr(v)


class EmitError(OSError):
    """I/O failure while writing an output file; carries the path."""

    def __init__(self, path, cause):
        super().__init__(f"failed to write {path}: {cause}")
        self.path = str(path)


def _write_text(path, text: str):
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise EmitError(path, exc) from exc


def write_diagnostics_csv(records, path):
    lines = [",".join(DIAGNOSTICS_COLUMNS)]
    for r in records:
        lines.append(",".join(_fmt(getattr(r, col)) for col in DIAGNOSTICS_COLUMNS))
    _write_text(path, "\n".join(lines) + "\n")


def write_snapshots_csv(traj, path):
    """Long-format (t, x, rho, u, p): u is interpolated to cell centers."""
    lines = [",".join(SNAPSHOT_COLUMNS)]
    x = traj.grid.centers
    for s in traj.snapshots:
        p = pressure(s.rho, traj.params.gamma)
        u_c = 0.5 * (s.u[:-1] + s.u[1:])
        for i in range(traj.grid.n_cells):
            lines.append(",".join(_fmt(v) for v in (s.t, x[i], s.rho[i], u_c[i], p[i])))
    _write_text(path, "\n".join(lines) + "\n")


def write_verdict_json(checks, path, extra: dict | None = None):
    doc = {
        "schema_version": SCHEMA_VERSION,
        "all_passed": all(c.passed for c in checks),
        "checks": [
            {"name": c.name, "passed": bool(c.passed),
             "worst_margin": float(c.worst_margin),
             "worst_time": float(c.worst_time), "tolerance": float(c.tolerance)}
            for c in checks
        ],
    }
    if extra:
        doc.update(extra)
    _write_text(path, json.dumps(doc, sort_keys=True, indent=2) + "\n")


def write_sweep_csv(report, path):
    lines = [",".join(SWEEP_COLUMNS)]
    for row in report.rows:
        vals = (report.axis, row.value, row.excess_l2_final, row.pressure_l2,
                row.complementarity_cum, row.consistency_rms, row.consistency_cells,
                row.eps_grad_cum, row.eps_pressure_cum, row.mass_final,
                row.energy_final, row.failed or "ok")
        lines.append(",".join(v if isinstance(v, str) else _fmt(v) for v in vals))
    _write_text(path, "\n".join(lines) + "\n")


def write_compactness_csv(creport, path):
    lines = [",".join(COMPACTNESS_COLUMNS)]
    for h, s in zip(creport.h_list, creport.sup_values):
        lines.append(f"{_fmt(h)},{_fmt(s)}")
    _write_text(path, "\n".join(lines) + "\n")


def svg_line_chart(series: dict, path, title: str, xlabel: str, ylabel: str,
                   width: int = 640, height: int = 400):
    """Minimal deterministic SVG polyline chart of {label: (x, y)} series."""
    pad = 56
    xs = np.concatenate([np.asarray(x, dtype=float) for x, _ in series.values()])
    ys = np.concatenate([np.asarray(y, dtype=float) for _, y in series.values()])
    ys = ys[np.isfinite(ys)]
    if xs.size == 0 or ys.size == 0:
        xs, ys = np.array([0.0, 1.0]), np.array([0.0, 1.0])
    x0, x1 = float(np.min(xs)), float(np.max(xs))
    y0, y1 = float(np.min(ys)), float(np.max(ys))
    if x1 <= x0:
        x1 = x0 + 1.0
    if y1 <= y0:
        y1 = y0 + 1.0
    sx = (width - 2 * pad) / (x1 - x0)
    sy = (height - 2 * pad) / (y1 - y0)
    colors = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width // 2}" y="20" text-anchor="middle" font-size="14">{title}</text>',
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" '
        'stroke="black"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
        f'<text x="{width // 2}" y="{height - 12}" text-anchor="middle" '
        f'font-size="12">{xlabel}</text>',
        f'<text x="16" y="{height // 2}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 16 {height // 2})">{ylabel}</text>',
        f'<text x="{pad}" y="{height - pad + 16}" font-size="10">{x0:.6g}</text>',
        f'<text x="{width - pad}" y="{height - pad + 16}" text-anchor="end" '
        f'font-size="10">{x1:.6g}</text>',
        f'<text x="{pad - 4}" y="{height - pad}" text-anchor="end" font-size="10">{y0:.6g}</text>',
        f'<text x="{pad - 4}" y="{pad + 4}" text-anchor="end" font-size="10">{y1:.6g}</text>',
    ]
    for k, (label, (x, y)) in enumerate(series.items()):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        pts = []
        for xi, yi in zip(x, y):
            if not (math.isfinite(xi) and math.isfinite(yi)):
                continue
            px = pad + (xi - x0) * sx
            py = height - pad - (yi - y0) * sy
            pts.append(f"{px:.2f},{py:.2f}")
        color = colors[k % len(colors)]
        parts.append(f'<polyline points="{" ".join(pts)}" fill="none" '
                     f'stroke="{color}" stroke-width="1.5"/>')
        parts.append(f'<text x="{width - pad}" y="{pad + 14 * (k + 1)}" text-anchor="end" '
                     f'font-size="11" fill="{color}">{label}</text>')
    parts.append("</svg>")
    _write_text(path, "\n".join(parts) + "\n")


@dataclass
class OutputManifest:
    run_id: str
    schema_version: int
    config_echo: dict | None
    files: list            # {"path": ..., "role": ...}
    exit_status: int

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=2) + "\n"


def run_id_for(config_text: str | None, tag: str = "run") -> str:
    digest = hashlib.sha256((config_text or tag).encode("utf-8")).hexdigest()[:12]
    return f"{tag}-{digest}"


def _check_files(entries, out_dir):
    for e in entries:
        full = os.path.join(out_dir, e["path"])
        if not os.path.isfile(full) or os.path.getsize(full) == 0:
            raise EmitError(full, "missing or empty output file")


def emit_trajectory(traj, checks, out_dir, config_text: str | None = None,
                    plots: bool = False) -> OutputManifest:
    """Write diagnostics.csv, snapshots.csv, verdict.json (and SVG charts)."""
    os.makedirs(out_dir, exist_ok=True)
    files = []
    write_diagnostics_csv(traj.records, os.path.join(out_dir, "diagnostics.csv"))
    files.append({"path": "diagnostics.csv", "role": "diagnostics"})
    write_snapshots_csv(traj, os.path.join(out_dir, "snapshots.csv"))
    files.append({"path": "snapshots.csv", "role": "snapshots"})
    write_verdict_json(checks, os.path.join(out_dir, "verdict.json"))
    files.append({"path": "verdict.json", "role": "verdict"})
    if plots:
        t = np.array([r.t for r in traj.records])
        for name, col in (("energy", "energy"), ("mass", "mass"), ("excess", "excess_l2")):
            y = np.array([getattr(r, col) for r in traj.records])
            fname = f"{name}.svg"
            svg_line_chart({name: (t, y)}, os.path.join(out_dir, fname),
                           title=f"{name} vs t", xlabel="t", ylabel=name)
            files.append({"path": fname, "role": "plot"})
    manifest = OutputManifest(run_id=run_id_for(config_text),
                              schema_version=SCHEMA_VERSION,
                              config_echo=json.loads(config_text) if config_text else None,
                              files=files, exit_status=0)
    _check_files(files, out_dir)
    _write_text(os.path.join(out_dir, "manifest.json"), manifest.to_json())
    return manifest


def emit_sweep(report, checks, out_dir, config_text: str | None = None) -> OutputManifest:
    """Write sweep.csv, compactness.csv and the verdict/manifest pair."""
    os.makedirs(out_dir, exist_ok=True)
    files = []
    write_sweep_csv(report, os.path.join(out_dir, "sweep.csv"))
    files.append({"path": "sweep.csv", "role": "sweep"})
    extra = {}
    if report.compactness is not None:
        write_compactness_csv(report.compactness, os.path.join(out_dir, "compactness.csv"))
        files.append({"path": "compactness.csv", "role": "compactness"})
        extra["compactness"] = {
            "decay_factor": float(report.compactness.decay_factor),
            "required_factor": float(report.compactness.required_factor),
            "slope": float(report.compactness.slope),
            "passed": bool(report.compactness.passed),
        }
    if report.cauchy_distances:
        extra["cauchy_distances"] = [float(d) for d in report.cauchy_distances]
    write_verdict_json(checks, os.path.join(out_dir, "verdict.json"), extra=extra)
    files.append({"path": "verdict.json", "role": "verdict"})
    manifest = OutputManifest(run_id=run_id_for(config_text, tag="sweep"),
                              schema_version=SCHEMA_VERSION,
                              config_echo=json.loads(config_text) if config_text else None,
                              files=files, exit_status=0)
    _check_files(files, out_dir)
    _write_text(os.path.join(out_dir, "manifest.json"), manifest.to_json())
    return manifest
