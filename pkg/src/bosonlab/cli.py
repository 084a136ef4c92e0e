"""Command-line surface.

Commands:
  build     assemble the configured model and dump its dimensions
  solve     compute the ground eigencluster
  verify    run the selected identity/inequality checks
  sweep     execute the configured parameter sweep
  spectrum  dump the full spectrum (small dimensions only)

Exit codes: 0 all checks pass; 2 an asserted check failed; 3 configuration
error; 4 solver non-convergence.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import sys

import numpy as np
import scipy

from . import __version__
from .config import ConfigError, RunConfig, parse_config, build_model
from .reporting import emit_report
from .spectral import SolverConvergenceError, full_spectrum_small, ground_eigenspace
from .sweep import SweepPlan, run_sweep, strip_volatile
from . import verify as V

EXIT_OK = 0
EXIT_CHECK_FAILED = 2
EXIT_CONFIG = 3
EXIT_SOLVER = 4


def _provenance(cfg: RunConfig) -> dict:
    return {
        "config_sha256": hashlib.sha256(cfg.source_text.encode()).hexdigest(),
        "seed": cfg.solver.seed,
        "versions": {
            "bosonlab": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
    }


def _load_config(args) -> RunConfig:
    with open(args.config, "r", encoding="utf-8") as fh:
        text = fh.read()
    cfg = parse_config(text)
    if args.seed is not None:
        cfg.solver = dataclasses.replace(cfg.solver, seed=args.seed)
    if args.out is not None:
        cfg.output_dir = args.out
    if args.format is not None:
        fmt = {"json": "jsonl"}.get(args.format, args.format)
        cfg.output_formats = (fmt,)
    return cfg


def _emit(cfg: RunConfig, records: list) -> list:
    prov = _provenance(cfg)
    stamped = [{**r, "provenance": prov} for r in records]
    return emit_report(stamped, cfg.output_dir, cfg.output_formats, cfg.output_stem)


def cmd_build(cfg: RunConfig) -> int:
    model = build_model(cfg)
    record = {
        "command": "build",
        "kind": model.kind,
        "atom_dim": model.atom_dim,
        "fock_dim": model.basis.dim,
        "total_dim": model.dim,
        "modes": model.grid.count,
        "n_max": model.basis.n_max,
        "coupling": model.g,
        "nnz_h": int(model.h.nnz),
        "atom_multiplicity": model.m_atom,
        "atom_gap": model.atom_gap,
    }
    paths = _emit(cfg, [record])
    print(f"{model.kind}: total dim {model.dim} (atom {model.atom_dim} x fock {model.basis.dim}), "
          f"H nnz {model.h.nnz}; wrote {', '.join(str(p) for p in paths)}")
    return EXIT_OK


def cmd_solve(cfg: RunConfig) -> int:
    model = build_model(cfg)
    gs = ground_eigenspace(model.h, cfg.solver, model.top_mask)
    record = {
        "command": "solve",
        "energy": gs.energy,
        "multiplicity": gs.multiplicity,
        "gap": gs.gap,
        "cluster_spread": gs.cluster_spread,
        "max_residual": float(np.max(gs.residuals)),
        "top_weight": float(np.max(gs.top_weights)),
        "number_expectation": max(
            model.number_expectation(gs.vectors[:, j]) for j in range(gs.multiplicity)
        ),
    }
    paths = _emit(cfg, [record])
    print(f"E = {gs.energy:.12g}, cluster size {gs.multiplicity}, gap {gs.gap:.6g}; "
          f"wrote {', '.join(str(p) for p in paths)}")
    return EXIT_OK


def _family_models(cfg: RunConfig, couplings) -> list:
    axis = "charge" if cfg.kind == "pf-toy" else "alpha"
    return [build_model(cfg, {axis: g}) for g in couplings]


def cmd_verify(cfg: RunConfig, names: list) -> int:
    model = None
    gs = None
    records = []

    def solved():
        nonlocal model, gs
        if model is None:
            model = build_model(cfg)
            gs = ground_eigenspace(model.h, cfg.solver, model.top_mask)
        return model, gs

    couplings = cfg.checks["coupling_list"]
    if couplings is None:
        couplings = [cfg.model.get("alpha", cfg.model.get("charge", 0.0))]

    for name in names:
        if name == "number_identity":
            m, g = solved()
            records.append(V.number_identity_check(m, g.vectors[:, 0]).record())
        elif name == "number_formula":
            m, g = solved()
            records.append(V.number_formula_check(m, g, cfg.solver).record())
        elif name == "pull_through":
            m, g = solved()
            records.append(
                V.pull_through_check(m, g, cfg.solver, cfg.checks["pull_through_tol"]).record()
            )
        elif name == "hs_invariance":
            m, g = solved()
            records.append(
                V.hs_invariance_check(m, g, cfg.checks["hs_trials"], cfg.solver).record()
            )
        elif name == "massive_bound":
            m, g = solved()
            records.append(
                V.massive_bound_check(m, g, cfg.checks["random_states"], cfg=cfg.solver).record()
            )
        elif name == "overlap_delta":
            models = _family_models(cfg, couplings)
            reports, trend = V.overlap_delta_check(models, cfg.solver)
            records.extend(r.record() for r in reports)
            records.append(trend.record())
        elif name == "multiplicity":
            models = _family_models(cfg, couplings)
            records.extend(r.record() for r in V.multiplicity_check(models, cfg.solver))
        elif name == "resolvent_convergence":
            models = _family_models(cfg, couplings)
            records.append(V.resolvent_convergence_check(models, cfg.solver).record())
        elif name == "ir_probe":
            for label, exponent, convergent in (
                ("regular", cfg.checks["ir_exponent_regular"], True),
                ("critical", cfg.checks["ir_exponent_critical"], False),
            ):
                specs = V.ir_refinement_specs(
                    cfg.checks["ir_k_min_list"],
                    exponent,
                    cfg.checks["ir_alpha"],
                    cfg.checks["ir_n_max"],
                    epsilon=cfg.model.get("epsilon", 0.0),
                    delta=cfg.model.get("delta", 0.5),
                    points_per_k_min=cfg.checks["ir_points_per_k_min"],
                )
                from .models import assemble_gsb

                models = [assemble_gsb(s) for s in specs]
                rep = V.ir_probe(models, convergent, cfg.solver)
                rec = rep.record()
                rec["family"] = label
                records.append(rec)
        elif name == "binding_energy":
            m, _ = solved()
            records.append(V.binding_energy_check(m, cfg.solver).record())
        elif name == "spatial_decay":
            m, g = solved()
            records.append(V.spatial_decay_check(m, g, cfg.solver).record())
        elif name == "commutator_identity":
            m, g = solved()
            records.append(
                V.commutator_identity_check(m, g, cfg.solver, cfg.checks["commutator_tol"]).record()
            )
        else:
            raise ConfigError([f"checks.run: unknown check {name!r}"])

    paths = _emit(cfg, records)
    failed = [r for r in records if r.get("status") == "fail"]
    for r in records:
        print(f"{r.get('check', r.get('command', '?')):24s} {r.get('status', '?')}")
    print(f"wrote {', '.join(str(p) for p in paths)}")
    return EXIT_CHECK_FAILED if failed else EXIT_OK


def cmd_sweep(cfg: RunConfig, threads: int) -> int:
    if not cfg.sweep_axes:
        raise ConfigError(["sweep: no axes configured"])
    plan = SweepPlan(
        base=cfg, axes=dict(cfg.sweep_axes), checks=list(cfg.sweep_checks),
        cell_cap=cfg.sweep_cell_cap,
    )
    result = run_sweep(plan, threads=threads)
    records = [dict(r, command="sweep") for r in strip_volatile(result.records)]
    paths = _emit(cfg, records)
    n_failed = sum(1 for r in result.records if r["status"] == "failed")
    n_check_failed = sum(
        1
        for r in result.records
        for c in r.get("checks", {}).values()
        if c.get("status") == "fail"
    )
    print(f"sweep: {len(records)} cells, {n_failed} failed cells, "
          f"{n_check_failed} failed checks; wrote {', '.join(str(p) for p in paths)}")
    return EXIT_CHECK_FAILED if n_check_failed else EXIT_OK


def cmd_spectrum(cfg: RunConfig) -> int:
    model = build_model(cfg)
    evals = full_spectrum_small(model.h, cfg.solver)
    record = {
        "command": "spectrum",
        "dim": model.dim,
        "eigenvalues": [float(v) for v in evals],
    }
    paths = _emit(cfg, [record])
    print(f"spectrum: {len(evals)} eigenvalues in [{evals[0]:.6g}, {evals[-1]:.6g}]; "
          f"wrote {', '.join(str(p) for p in paths)}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="bosonlab",
        description="Truncated Fock-space models and ground-state identity checks",
    )
    parser.add_argument("command", choices=["build", "solve", "verify", "sweep", "spectrum"])
    parser.add_argument("--config", required=True, help="configuration file path")
    parser.add_argument("--seed", type=int, default=None, help="override solver seed")
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument("--format", choices=["json", "jsonl", "csv"], default=None)
    parser.add_argument("--checks", default=None, help="comma-separated check list (verify)")
    parser.add_argument("--threads", type=int, default=1, help="sweep worker threads")
    args = parser.parse_args(argv)

    try:
        cfg = _load_config(args)
        if args.command == "build":
            return cmd_build(cfg)
        if args.command == "solve":
            return cmd_solve(cfg)
        if args.command == "verify":
            names = (
                [s.strip() for s in args.checks.split(",") if s.strip()]
                if args.checks
                else cfg.checks["run"]
            )
            if not names:
                raise ConfigError(["checks.run: no checks selected"])
            return cmd_verify(cfg, names)
        if args.command == "sweep":
            return cmd_sweep(cfg, args.threads)
        if args.command == "spectrum":
            return cmd_spectrum(cfg)
        raise ConfigError([f"unknown command {args.command!r}"])
    except ConfigError as exc:
        for err in exc.errors:
            print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverConvergenceError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
