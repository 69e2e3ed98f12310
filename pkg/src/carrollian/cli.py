"""Command line driver: single runs, epsilon sweeps, entropy audits, and
the coupled-versus-scalar oracle comparison.

Configs are single JSON documents validated against a schema with precise
error paths.  Exit codes are a stable contract: 0 success, 2 mathematical
invariant violation (including failed audits), 3 configuration error.  All
errors are also emitted as single-line JSON on standard error, and every
artifact is written atomically (temp file + rename).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import jsonschema
import numpy as np

from .analysis import (
    bump_battery,
    bump_test_function,
    convergence_metrics,
    entropy_inequality_check,
    kinetic_measures,
    weak_residual,
)
from .entropy import CATALOG_NAMES, catalog_pair
from .errors import (
    AdmissibilityError,
    CarrollianError,
    ConfigError,
    DomainError,
    InputError,
    InvariantViolationError,
    ParameterError,
    QuadratureError,
)
from .initial_data import build_initial_state
from .phase import Grid1D, check_admissible, state_to_csv, write_text_atomic
from .solver import BOUNDARIES, SCHEMES, SolverConfig, StepReport, Trajectory, run

EXIT_OK = 0
EXIT_INVARIANT = 2
EXIT_CONFIG = 3

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["grid", "solver", "initial_data"],
    "additionalProperties": False,
    "properties": {
        "grid": {
            "type": "object",
            "required": ["x_min", "x_max", "n_cells"],
            "additionalProperties": False,
            "properties": {
                "x_min": {"type": "number"},
                "x_max": {"type": "number"},
                "n_cells": {"type": "integer", "minimum": 4},
            },
        },
        "solver": {
            "type": "object",
            "required": ["epsilon", "c0", "t_end"],
            "additionalProperties": False,
            "properties": {
                "epsilon": {"type": "number", "exclusiveMinimum": 0},
                "c0": {"type": "number", "exclusiveMinimum": 0},
                "t_end": {"type": "number", "exclusiveMinimum": 0},
                "cfl_safety": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
                "boundary": {"enum": list(BOUNDARIES)},
                "scheme": {"enum": list(SCHEMES)},
                "output_every": {"type": "integer", "minimum": 1},
                "flux_form": {"type": "boolean"},
                "tol_invariant": {"type": "number", "minimum": 0},
            },
        },
        "initial_data": {
            "type": "object",
            "required": ["kind"],
            "properties": {"kind": {"enum": ["demo_sine", "constant", "riemann_jump", "custom_csv"]}},
        },
        "sweep": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "epsilon": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}, "minItems": 1}
            },
        },
        "audits": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["pair"],
                "additionalProperties": False,
                "properties": {
                    "pair": {"type": "string"},
                    "phi": {"type": "string"},
                    "scale": {"type": "number"},
                },
            },
        },
        "bins": {"type": "integer", "minimum": 1},
        "output_dir": {"type": "string"},
        "seed": {"type": "integer"},
    },
}


# ---------------------------------------------------------------------------
# plumbing


def _load_config(path: str) -> dict:
    try:
        with open(path, "r") as fh:
            cfg = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}")
    try:
        jsonschema.validate(cfg, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"config {exc.json_path}: {exc.message}")
    return cfg


def _grid_of(cfg: dict) -> Grid1D:
    g = cfg["grid"]
    return Grid1D(x_min=g["x_min"], x_max=g["x_max"], n_cells=g["n_cells"])


def _solver_of(cfg: dict, **overrides) -> SolverConfig:
    params = dict(cfg["solver"])
    params.update(overrides)
    return SolverConfig(**params)


def _solver_dict(sc: SolverConfig) -> dict:
    return {
        "epsilon": sc.epsilon,
        "c0": sc.c0,
        "t_end": sc.t_end,
        "cfl_safety": sc.cfl_safety,
        "boundary": sc.boundary,
        "scheme": sc.scheme,
        "output_every": sc.output_every,
        "flux_form": sc.flux_form,
        "tol_invariant": sc.tol_invariant,
    }


def _config_echo(cfg: dict, sc: SolverConfig, seed: int) -> dict:
    return {
        "grid": cfg["grid"],
        "solver": _solver_dict(sc),
        "initial_data": cfg["initial_data"],
        "seed": seed,
    }


def _write_json(path: str, obj) -> None:
    write_text_atomic(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _steps_csv(reports: list) -> str:
    lines = ["t,dt,min_w1,min_w2,l2_energy,visc_dissipation_cum"]
    for r in reports:
        lines.append(
            ",".join(
                f"{v:.17g}" for v in (r.t, r.dt, r.min_w1, r.min_w2, r.l2_energy, r.visc_dissipation_cum)
            )
        )
    return "\n".join(lines) + "\n"


def _histogram_csv(hist) -> str:
    lines = ["s_lo,s_hi,mu1,mu2"]
    for i in range(hist.mu1_mass.size):
        lines.append(
            f"{hist.s_edges[i]:.17g},{hist.s_edges[i + 1]:.17g},{hist.mu1_mass[i]:.17g},{hist.mu2_mass[i]:.17g}"
        )
    return "\n".join(lines) + "\n"


def _prepare_run(cfg: dict):
    grid = _grid_of(cfg)
    sc = _solver_of(cfg)
    state0 = build_initial_state(cfg["initial_data"], grid)
    if sc.scheme == "coupled_conservative":
        report = check_admissible(state0, sc.c0)
        if not report.admissible:
            raise InvariantViolationError(
                f"initial data is inadmissible at c0 = {sc.c0}: min w1 = {report.min_w1}, min w2 = {report.min_w2}",
                t=0.0,
            )
    return grid, sc, state0


def _summary_dict(traj: Trajectory, cfg: dict, seed: int) -> dict:
    return {
        "config": _config_echo(cfg, traj.config, seed),
        "steps": len(traj.reports),
        "min_w1_overall": traj.min_w1_overall,
        "min_w2_overall": traj.min_w2_overall,
        "sup_l2_energy": traj.sup_l2_energy,
        "cum_dissipation": traj.cum_dissipation,
        "wallclock_s": traj.wallclock_s,
    }


def _phi_from_id(phi_id: str, t_end: float, grid: Grid1D) -> list:
    """Resolve a test-function id: 'battery' or 'bump:<width>:<center>'."""
    if phi_id == "battery":
        return bump_battery(t_end, grid.x_min, grid.x_max)
    if phi_id.startswith("bump:"):
        parts = phi_id.split(":")
        if len(parts) != 3:
            raise ConfigError(f"bad test function id {phi_id!r}; expected bump:<width>:<center>")
        try:
            w, c = float(parts[1]), float(parts[2])
        except ValueError:
            raise ConfigError(f"bad test function id {phi_id!r}; width and center must be numbers")
        length = grid.x_max - grid.x_min
        x_lo = grid.x_min + (c - w / 2.0) * length
        x_hi = grid.x_min + (c + w / 2.0) * length
        if x_lo <= grid.x_min or x_hi >= grid.x_max:
            raise ConfigError(f"test function {phi_id!r} leaves the spatial window")
        t_lo, t_hi = 0.05 * t_end, 0.95 * t_end
        return [bump_test_function(t_lo, t_hi, x_lo, x_hi, label=f"bump-w{w:g}-c{c:g}")]
    raise ConfigError(f"unknown test function id {phi_id!r}; use 'battery' or 'bump:<width>:<center>'")


# ---------------------------------------------------------------------------
# commands


def cmd_run(cfg: dict, out_dir: str, threads: int, seed: int) -> int:
    grid, sc, state0 = _prepare_run(cfg)
    traj = run(state0, sc)
    os.makedirs(out_dir, exist_ok=True)
    snapshot_files = []
    for k in range(traj.n_snapshots):
        name = f"snapshot_{k:04d}.csv"
        state_to_csv(traj.state(k), os.path.join(out_dir, name))
        snapshot_files.append(name)
    write_text_atomic(os.path.join(out_dir, "steps.csv"), _steps_csv(traj.reports))
    summary = _summary_dict(traj, cfg, seed)
    summary["snapshot_times"] = [float(t) for t in traj.times]
    summary["snapshot_files"] = snapshot_files
    summary["h_flux_engaged"] = traj.h_flux_engaged
    _write_json(os.path.join(out_dir, "summary.json"), summary)
    print(f"run finished: {len(traj.reports)} steps, min w1 {traj.min_w1_overall:.6g}, "
          f"min w2 {traj.min_w2_overall:.6g}, artifacts in {out_dir}")
    return EXIT_OK


def cmd_sweep_eps(cfg: dict, out_dir: str, threads: int, seed: int) -> int:
    sweep = cfg.get("sweep", {})
    eps_list = sweep.get("epsilon")
    if not eps_list or len(eps_list) < 3:
        raise ConfigError("sweep-eps needs sweep.epsilon with at least 3 values")
    if any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise ConfigError(f"sweep.epsilon must be strictly decreasing, got {eps_list}")
    grid, _, state0 = _prepare_run(cfg)

    def run_one(eps: float) -> Trajectory:
        return run(state0.copy(), _solver_of(cfg, epsilon=eps))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            trajs = list(ex.map(run_one, eps_list))
    else:
        trajs = [run_one(e) for e in eps_list]

    conv = convergence_metrics(trajs, kind="epsilon")
    t_end = float(trajs[0].times[-1])
    length = grid.x_max - grid.x_min
    # bump decentered to x ~ 0.4 of the window: a symmetric center is nearly
    # orthogonal to u_x for the demo datum, which buries the epsilon-linear
    # part of the residual under its own higher-order remainder
    phi = bump_test_function(
        0.05 * t_end, 0.95 * t_end, grid.x_min + 0.15 * length, grid.x_min + 0.65 * length, label="sweep-bump"
    )
    residual_norms = []
    residuals = []
    for traj in trajs:
        res = weak_residual(traj, phi)
        residuals.append([float(res[0]), float(res[1])])
        residual_norms.append(float(np.linalg.norm(res)))
    decreasing = all(b < a for a, b in zip(residual_norms, residual_norms[1:]))
    slope, intercept = np.polyfit(np.log(eps_list), np.log(residual_norms), 1)

    report = {
        "config": _config_echo(cfg, _solver_of(cfg, epsilon=eps_list[0]), seed),
        "epsilons": eps_list,
        "l1_diffs": conv.l1_diffs,
        "diff_rates": conv.rates,
        "l1_monotone": conv.monotone,
        "weak_residuals": residuals,
        "weak_residual_norms": residual_norms,
        "weak_residual_strictly_decreasing": decreasing,
        "weak_residual_exponent": float(slope),
        "phi": phi.label,
        "per_run": [
            {
                "epsilon": eps,
                "steps": len(t.reports),
                "min_w1_overall": t.min_w1_overall,
                "min_w2_overall": t.min_w2_overall,
                "sup_l2_energy": t.sup_l2_energy,
                "cum_dissipation": t.cum_dissipation,
            }
            for eps, t in zip(eps_list, trajs)
        ],
    }
    os.makedirs(out_dir, exist_ok=True)
    _write_json(os.path.join(out_dir, "sweep_report.json"), report)
    print(f"sweep finished: epsilons {eps_list}, L1 diffs {['%.3e' % d for d in conv.l1_diffs]}, "
          f"residual exponent {slope:.3f}, report in {out_dir}")
    return EXIT_OK


def cmd_entropy_audit(cfg: dict, out_dir: str, threads: int, seed: int) -> int:
    audits = cfg.get("audits")
    if not audits:
        raise ConfigError("entropy-audit needs a nonempty audits list")
    grid, sc, state0 = _prepare_run(cfg)
    traj = run(state0, sc)
    os.makedirs(out_dir, exist_ok=True)

    rows = []
    results = []
    for entry in audits:
        pair = catalog_pair(entry["pair"])
        scale = entry.get("scale")
        if scale is not None:
            pair = pair.scaled(scale)
        for phi in _phi_from_id(entry.get("phi", "battery"), sc.t_end, grid):
            result = entropy_inequality_check(traj, pair, phi)
            results.append(result)
            rows.append(
                (
                    f"entropy-inequality {entry['pair']}{'' if scale is None else f' x{scale:g}'} {phi.label}",
                    f"{result.value:+.6e}",
                    f">= {-result.threshold:.3e}",
                    result.passed,
                )
            )

    hist = kinetic_measures(traj, bins=cfg.get("bins", 64))
    write_text_atomic(os.path.join(out_dir, "histogram.csv"), _histogram_csv(hist))
    mu1_min = float(np.min(hist.mu1_mass)) if hist.mu1_mass.size else 0.0
    rows.append(("kinetic-mu1-nonnegative", f"min bin {mu1_min:+.3e}", ">= 0", mu1_min >= 0.0))
    binwise = bool(np.all(np.abs(hist.mu2_mass) <= hist.mu1_mass * (1.0 + 1e-12) + 1e-300))
    rows.append(("kinetic-mu2-dominated", "|mu2| <= mu1 per bin", "bin-wise", binwise))
    if sc.output_every == 1:
        ident = abs(hist.total_mu1 - 2.0 * traj.cum_dissipation) / max(hist.total_mu1, 1e-300)
        rows.append(("kinetic-mass-identity", f"rel err {ident:.3e}", "<= 1e-12", ident <= 1e-12))

    for i, result in enumerate(results):
        _write_json(os.path.join(out_dir, f"audit_{i:03d}.json"), result.as_dict())
    _write_json(
        os.path.join(out_dir, "audit_report.json"),
        {
            "config": _config_echo(cfg, sc, seed),
            "audits": [r.as_dict() for r in results],
            "kinetic": {
                "total_mu1": hist.total_mu1,
                "total_mu2": hist.total_mu2,
                "cum_dissipation": traj.cum_dissipation,
                "mu1_min_bin": mu1_min,
            },
            "all_pass": all(r[3] for r in rows),
        },
    )

    w_name = max(len("AUDIT"), max(len(r[0]) for r in rows)) + 2
    w_val = max(len("VALUE"), max(len(r[1]) for r in rows)) + 2
    w_crit = max(len("CRITERION"), max(len(r[2]) for r in rows)) + 2
    print(f"{'AUDIT':<{w_name}}{'VALUE':<{w_val}}{'CRITERION':<{w_crit}}RESULT")
    for name, value, criterion, ok in rows:
        print(f"{name:<{w_name}}{value:<{w_val}}{criterion:<{w_crit}}{'PASS' if ok else 'FAIL'}")
    if all(r[3] for r in rows):
        return EXIT_OK
    return EXIT_INVARIANT


def cmd_oracle_compare(cfg: dict, out_dir: str, threads: int, seed: int) -> int:
    grid, sc, _ = _prepare_run(cfg)
    grids = [grid, Grid1D(grid.x_min, grid.x_max, 2 * grid.n_cells)]
    gaps = []
    modified_gaps = []
    for g in grids:
        state0 = build_initial_state(cfg["initial_data"], g)
        coupled = run(state0.copy(), _solver_of(cfg, scheme="coupled_conservative"))
        scalar = run(state0.copy(), _solver_of(cfg, scheme="scalar_ri"))
        modified = run(state0.copy(), _solver_of(cfg, scheme="coupled_modified"))
        for bucket, other in ((gaps, scalar), (modified_gaps, modified)):
            ds = coupled.sigmas[-1] - other.sigmas[-1]
            db = coupled.betas[-1] - other.betas[-1]
            bucket.append(
                {
                    "n_cells": g.n_cells,
                    "linf": float(max(np.max(np.abs(ds)), np.max(np.abs(db)))),
                    "l1": float((np.sum(np.abs(ds)) + np.sum(np.abs(db))) * g.dx),
                }
            )

    def _ratio(bucket, key):
        return bucket[0][key] / bucket[1][key] if bucket[1][key] > 0 else float("inf")

    report = {
        "config": _config_echo(cfg, sc, seed),
        "gaps": gaps,
        "ratio_linf": _ratio(gaps, "linf"),
        "ratio_l1": _ratio(gaps, "l1"),
        "modified_gaps": modified_gaps,
        "modified_ratio_linf": _ratio(modified_gaps, "linf"),
    }
    os.makedirs(out_dir, exist_ok=True)
    _write_json(os.path.join(out_dir, "oracle_report.json"), report)
    print(
        f"oracle compare: L-inf gap {gaps[0]['linf']:.3e} (n={gaps[0]['n_cells']}) vs "
        f"{gaps[1]['linf']:.3e} (n={gaps[1]['n_cells']}), ratio {report['ratio_linf']:.2f}; "
        f"modified-scheme ratio {report['modified_ratio_linf']:.2f}"
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point


_COMMANDS = {
    "run": cmd_run,
    "sweep-eps": cmd_sweep_eps,
    "entropy-audit": cmd_entropy_audit,
    "oracle-compare": cmd_oracle_compare,
}

_CONFIG_ERRORS = (ConfigError, ParameterError, AdmissibilityError, InputError, QuadratureError)
_INVARIANT_ERRORS = (InvariantViolationError, DomainError)


def _emit_error(exc: Exception) -> None:
    line = json.dumps({"error": type(exc).__name__, "message": str(exc)})
    print(line, file=sys.stderr)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="carrollian",
        description="Viscous solvers and structural audits for the 1D isentropic Carrollian fluid system.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("run", "integrate one configuration and write snapshots, steps.csv, summary.json"),
        ("sweep-eps", "run a strictly decreasing epsilon sweep and write a convergence report"),
        ("entropy-audit", f"entropy inequality and kinetic-measure audits (pairs: {', '.join(CATALOG_NAMES)})"),
        ("oracle-compare", "coupled versus scalar Riemann-invariant evolutions on two grids"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("config", help="path to a JSON config file")
        p.add_argument("--output-dir", default=None, help="artifact directory (default: config output_dir or ./out)")
        p.add_argument("--threads", type=int, default=1, help="worker threads for sweep members")
        p.add_argument("--seed", type=int, default=None, help="seed recorded in reports")
    args = parser.parse_args(argv)

    try:
        cfg = _load_config(args.config)
        out_dir = args.output_dir or cfg.get("output_dir") or "./out"
        seed = args.seed if args.seed is not None else cfg.get("seed", 0)
        return _COMMANDS[args.command](cfg, out_dir, args.threads, seed)
    except _INVARIANT_ERRORS as exc:
        _emit_error(exc)
        return EXIT_INVARIANT
    except _CONFIG_ERRORS as exc:
        _emit_error(exc)
        return EXIT_CONFIG
    except CarrollianError as exc:
        _emit_error(exc)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
