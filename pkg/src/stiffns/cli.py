# -*- coding: utf-8 -*-
"""
Command-line surface.

Subcommands:
    run          one simulation from a JSON config (+ optional overrides)
    sweep-gamma  stiff-pressure-limit sweep over gamma values
    sweep-eps    vanishing-artificial-viscosity sweep over eps values
    verify       invariant battery on randomized-amplitude presets
    compactness  oscillation-decay diagnostic over the config's sweep
    heleshaw     closed-form Hele-Shaw reference profile and self-check

Exit codes: 0 success / all checks passed, 1 usage or config error,
2 numerical failure (stall, NaN, negative density), 3 a verification
check failed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import compactness as cp
from . import diagnostics, limits, reporting
from .config import ConfigError, RunConfig, build_initial, parse_config, serialize_config
from .diagnostics import BoundCheckResult
from .model import ModelParams
from .solver import (NegativeDensityError, NumericsError, SolverStallError, run)

_NUMERICAL_ERRORS = (SolverStallError, NumericsError, NegativeDensityError)


def _load_config(path: str, overrides: dict | None = None) -> tuple[RunConfig, str]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc}") from exc
    if overrides:
        doc = json.loads(text)
        for (section, key), val in overrides.items():
            if val is None:
                continue
            doc.setdefault(section, {})[key] = val
        text = json.dumps(doc)
    cfg = parse_config(text)
    return cfg, serialize_config(cfg)


def _values_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"--values: not a comma-separated number list: {text!r}") from exc


def _cmd_run(args) -> int:
    cfg, canonical = _load_config(args.config, {
        ("params", "gamma"): args.gamma,
        ("params", "eps"): args.eps,
        ("time", "t_end"): args.t_end,
    })
    initial = build_initial(cfg)
    traj = run(initial, cfg.params, cfg.grid, cfg.solver)
    checks = diagnostics.run_checks(traj, cfg.params)
    reporting.emit_trajectory(traj, checks, args.out, config_text=canonical,
                              plots=args.plots)
    return 0 if all(c.passed for c in checks) else 3


def _run_sweep_command(args, axis: str) -> int:
    cfg, canonical = _load_config(args.config)
    values = _values_list(args.values) if args.values else list(cfg.sweep_values)
    if not values:
        raise ConfigError("sweep.values: provide --values or a sweep section")
    plan = limits.SweepPlan(params=cfg.params, grid=cfg.grid, config=cfg.solver,
                            initial=build_initial(cfg), axis=axis,
                            values=tuple(values))
    report = limits.run_sweep(plan)
    checks = []
    for row, traj in zip(report.rows, report.trajectories):
        if traj is None:
            continue
        mp = plan.member_params(row.value)
        for c in diagnostics.run_checks(traj, mp):
            checks.append(BoundCheckResult(f"{axis}={row.value:g}:{c.name}", c.passed,
                                           c.worst_margin, c.worst_time, c.tolerance))
    reporting.emit_sweep(report, checks, args.out, config_text=canonical)
    if any(r.failed for r in report.rows):
        return 2
    return 0 if all(c.passed for c in checks) else 3


def _cmd_verify(args) -> int:
    cfg, canonical = _load_config(args.config)
    seed = cfg.seed if args.seed is None else args.seed
    rng = np.random.default_rng(seed)
    members = [
        ("uniform", {"preset": "uniform", "r0": float(rng.uniform(0.2, 0.8))}),
        ("bump", {"preset": "bump", "amplitude": float(rng.uniform(0.3, 0.95))}),
        ("plateau", {"preset": "plateau", "inner": float(rng.uniform(0.5, 0.95))}),
    ]
    os.makedirs(args.out, exist_ok=True)
    all_checks, files = [], []
    for k, (name, init) in enumerate(members):
        doc = json.loads(canonical)
        doc["init"] = init
        member_cfg = parse_config(json.dumps(doc))
        traj = run(build_initial(member_cfg), member_cfg.params, member_cfg.grid,
                   member_cfg.solver)
        checks = diagnostics.run_checks(traj, member_cfg.params)
        weight, _hist = cp.evolve_weights_along(traj, member_cfg.params, lam=1.0)
        in_range = bool(np.all(weight.w >= 0.0) and np.all(weight.w <= 1.0))
        wm = cp.weight_mass_check(traj.snapshots[-1].rho, weight, traj.grid)
        checks.append(BoundCheckResult("weight_bounds", in_range and np.isfinite(wm.value),
                                       0.0 if in_range else -1.0,
                                       traj.snapshots[-1].t, 0.0))
        member_dir = os.path.join(args.out, f"member-{k:02d}-{name}")
        os.makedirs(member_dir, exist_ok=True)
        reporting.write_diagnostics_csv(traj.records,
                                        os.path.join(member_dir, "diagnostics.csv"))
        files.append({"path": f"member-{k:02d}-{name}/diagnostics.csv",
                      "role": "diagnostics"})
        for c in checks:
            all_checks.append(BoundCheckResult(f"{name}:{c.name}", c.passed,
                                               c.worst_margin, c.worst_time, c.tolerance))
    reporting.write_verdict_json(all_checks, os.path.join(args.out, "verdict.json"),
                                 extra={"seed": seed})
    files.append({"path": "verdict.json", "role": "verdict"})
    manifest = reporting.OutputManifest(
        run_id=reporting.run_id_for(canonical + f"seed={seed}", tag="verify"),
        schema_version=reporting.SCHEMA_VERSION,
        config_echo=json.loads(canonical), files=files, exit_status=0)
    with open(os.path.join(args.out, "manifest.json"), "w", encoding="utf-8") as fh:
        fh.write(manifest.to_json())
    return 0 if all(c.passed for c in all_checks) else 3


def _cmd_compactness(args) -> int:
    cfg, canonical = _load_config(args.config)
    if cfg.sweep_axis is None:
        raise ConfigError("sweep: the compactness command needs a sweep section")
    plan = limits.SweepPlan(params=cfg.params, grid=cfg.grid, config=cfg.solver,
                            initial=build_initial(cfg), axis=cfg.sweep_axis,
                            values=cfg.sweep_values,
                            required_decay=args.require_factor)
    report = limits.run_sweep(plan)
    if any(r.failed for r in report.rows) or report.compactness is None:
        return 2
    c = report.compactness
    checks = [BoundCheckResult("oscillation_decay", c.passed,
                               c.decay_factor - c.required_factor,
                               0.0, 0.0)]
    reporting.emit_sweep(report, checks, args.out, config_text=canonical)
    return 0 if c.passed else 3


def _cmd_heleshaw(args) -> int:
    try:
        a_str, b_str = args.interval.split(",")
        a, b = float(a_str), float(b_str)
    except ValueError as exc:
        raise ConfigError(f"--interval: expected 'a,b', got {args.interval!r}") from exc
    params = ModelParams(gamma=2.0, nu0=args.nu0, g0=args.g0, pm=args.pm)
    profile = limits.hele_shaw_profile(a, b, params, n_samples=args.samples)
    residual = limits.hele_shaw_residual(profile, params)
    os.makedirs(args.out, exist_ok=True)
    lines = ["x,p"] + [f"{repr(float(x))},{repr(float(p))}"
                       for x, p in zip(profile.x, profile.p)]
    with open(os.path.join(args.out, "heleshaw.csv"), "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    tol = 1e-8 * params.pm
    checks = [BoundCheckResult("heleshaw_ode_residual", residual <= tol,
                               tol - residual, 0.0, tol)]
    reporting.write_verdict_json(checks, os.path.join(args.out, "verdict.json"),
                                 extra={"center_value": profile.center_value,
                                        "k": profile.k})
    return 0 if residual <= tol else 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stiffns",
        description="growth-driven compressible flow lab: runs, limit sweeps, checks")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one simulation from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default="out")
    p.add_argument("--plots", action="store_true")
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--t-end", dest="t_end", type=float, default=None)
    p.set_defaults(func=_cmd_run)

    for name, axis in (("sweep-gamma", "gamma"), ("sweep-eps", "eps")):
        p = sub.add_parser(name, help=f"sweep over {axis} values")
        p.add_argument("--config", required=True)
        p.add_argument("--values", default=None,
                       help="comma-separated values (default: config sweep section)")
        p.add_argument("--out", default="out")
        p.set_defaults(func=lambda args, axis=axis: _run_sweep_command(args, axis))

    p = sub.add_parser("verify", help="invariant battery on randomized presets")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default="out")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("compactness", help="oscillation-decay diagnostic")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default="out")
    p.add_argument("--require-factor", type=float, default=3.0)
    p.set_defaults(func=_cmd_compactness)

    p = sub.add_parser("heleshaw", help="Hele-Shaw reference profile")
    p.add_argument("--nu0", type=float, required=True)
    p.add_argument("--interval", required=True, help="a,b")
    p.add_argument("--pm", type=float, default=1.0)
    p.add_argument("--g0", type=float, default=1.0)
    p.add_argument("--samples", type=int, default=10001)
    p.add_argument("--out", default="out")
    p.set_defaults(func=_cmd_heleshaw)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except _NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except reporting.EmitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
