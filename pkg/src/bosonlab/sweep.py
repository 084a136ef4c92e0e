"""Parameter sweeps over coupling, cutoff, mode count, and infrared cutoff.

A sweep plan names axes (lists of parameter values) over a base
configuration; every cell is executed independently (failures are recorded,
never fatal) and the per-cell records carry energies, cluster data, the
boson-number expectation, overlap/delta when requested, check outcomes, and
truncation diagnostics.  Cell ordering in the output is by cell index, and
re-running an identical plan with the same seed reproduces every numeric
field bit for bit.
"""

from __future__ import annotations

import itertools
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .config import RunConfig, build_model
from .spectral import ground_eigenspace
from . import verify as V

# Per-cell checks the sweep runner knows how to execute.
CELL_CHECKS = (
    "number_identity",
    "number_formula",
    "pull_through",
    "hs_invariance",
    "massive_bound",
    "overlap_delta",
    "multiplicity",
    "binding_energy",
    "spatial_decay",
    "commutator_identity",
)

# Checks whose interpretation is a limit g -> 0; sweeping a coupling axis with
# one of these requested gets the decoupled anchor point inserted.
TREND_ANCHORED = ("overlap_delta",)


@dataclass
class SweepPlan:
    base: RunConfig
    axes: dict
    checks: list = field(default_factory=list)
    cell_cap: int = 10000

    def __post_init__(self):
        if not self.axes:
            raise ValueError("a sweep needs at least one axis")
        for name, values in self.axes.items():
            if not values:
                raise ValueError(f"axis {name} is empty")
        n = 1
        for values in self.axes.values():
            n *= len(values)
        if n > self.cell_cap:
            raise ValueError(f"{n} cells exceed the cap {self.cell_cap}")
        for name in self.checks:
            if name not in CELL_CHECKS:
                raise ValueError(f"unknown per-cell check {name!r}")
        if any(c in TREND_ANCHORED for c in self.checks):
            for axis in ("alpha", "charge"):
                if axis in self.axes and 0.0 not in self.axes[axis]:
                    self.axes[axis] = [0.0] + list(self.axes[axis])

    def cells(self) -> list:
        names = sorted(self.axes)
        combos = itertools.product(*(self.axes[n] for n in names))
        return [dict(zip(names, combo)) for combo in combos]


@dataclass
class SweepResult:
    plan: SweepPlan
    records: list


def _run_cell(plan: SweepPlan, index: int, overrides: dict) -> dict:
    cfg = plan.base
    record: dict = {"cell": index, "parameters": dict(overrides)}
    started = time.perf_counter()
    try:
        model = build_model(cfg, overrides)
        gs = ground_eigenspace(model.h, cfg.solver, model.top_mask)
        record.update(
            {
                "status": "ok",
                "energy": gs.energy,
                "multiplicity": gs.multiplicity,
                "gap": gs.gap,
                "number_expectation": max(
                    model.number_expectation(gs.vectors[:, j]) for j in range(gs.multiplicity)
                ),
                "top_weight": float(np.max(gs.top_weights)),
            }
        )
        outcomes = {}
        for name in plan.checks:
            outcomes[name] = _cell_check(name, cfg, model, gs, record)
        record["checks"] = outcomes
    except Exception as exc:  # cell failures are recorded, never fatal
        record["status"] = "failed"
        record["error"] = f"{type(exc).__name__}: {exc}"
    record["_wall_time_s"] = time.perf_counter() - started
    return record


def _cell_check(name: str, cfg: RunConfig, model, gs, record: dict) -> dict:
    if name == "number_identity":
        rep = V.number_identity_check(model, gs.vectors[:, 0])
    elif name == "number_formula":
        rep = V.number_formula_check(model, gs, cfg.solver)
    elif name == "pull_through":
        rep = V.pull_through_check(model, gs, cfg.solver, cfg.checks["pull_through_tol"])
    elif name == "hs_invariance":
        rep = V.hs_invariance_check(model, gs, cfg.checks["hs_trials"], cfg.solver)
    elif name == "massive_bound":
        rep = V.massive_bound_check(model, gs, cfg.checks["random_states"], cfg=cfg.solver)
    elif name == "overlap_delta":
        reports, _ = V.overlap_delta_check([model], cfg.solver)
        rep = reports[0]
        record["overlap"] = rep.measured["overlap"]
        record["delta"] = rep.measured["delta"]
    elif name == "multiplicity":
        rep = V.multiplicity_check([model], cfg.solver)[0]
    elif name == "binding_energy":
        rep = V.binding_energy_check(model, cfg.solver)
    elif name == "spatial_decay":
        rep = V.spatial_decay_check(model, gs, cfg.solver)
    elif name == "commutator_identity":
        rep = V.commutator_identity_check(model, gs, cfg.solver, cfg.checks["commutator_tol"])
    else:
        raise ValueError(f"unknown per-cell check {name!r}")
    return rep.record()


def run_sweep(plan: SweepPlan, threads: int = 1) -> SweepResult:
    """Execute every cell; records come back ordered by cell index."""
    cells = plan.cells()
    if threads <= 1:
        records = [_run_cell(plan, i, c) for i, c in enumerate(cells)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(_run_cell, plan, i, c) for i, c in enumerate(cells)]
            records = [f.result() for f in futures]
    records.sort(key=lambda r: r["cell"])
    return SweepResult(plan=plan, records=records)


def strip_volatile(records: list) -> list:
    """Drop wall-time fields so the canonical report is run-independent."""
    out = []
    for record in records:
        out.append({k: v for k, v in record.items() if not k.startswith("_")})
    return out


def fit_convergence(series, kind: str = "geometric") -> dict:
    """Least-squares decay-rate fit for a positive series.

    geometric: log(value) against the parameter; the rate is the factor per
    unit parameter step.  power: log(value) against log(parameter); the rate
    is the exponent.  A rate >= 1 (geometric) or >= 0 (power) is flagged
    non-convergent.
    """
    pts = [(float(p), float(v)) for p, v in series]
    if len(pts) < 3:
        raise ValueError("need at least 3 points")
    if any(v <= 0 for _, v in pts):
        raise ValueError("values must be positive")
    x = np.array([p for p, _ in pts])
    y = np.log(np.array([v for _, v in pts]))
    if kind == "power":
        if any(p <= 0 for p, _ in pts):
            raise ValueError("power fit needs positive parameters")
        x = np.log(x)
    elif kind != "geometric":
        raise ValueError("kind must be geometric or power")
    slope, intercept = np.polyfit(x, y, 1)
    fitted = slope * x + intercept
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r_squared = 1.0 if ss_tot == 0.0 and ss_res < 1e-24 else 1.0 - ss_res / max(ss_tot, 1e-300)
    if kind == "geometric":
        rate = float(math.exp(slope))
        convergent = rate < 1.0
    else:
        rate = float(slope)
        convergent = rate < 0.0
    return {"kind": kind, "rate": rate, "r_squared": r_squared, "convergent": convergent}
