"""Configuration parsing and validation for the command-line surface.

The format is INI-style sectioned key-value text (configparser grammar):

    [model]
    kind = spin-boson
    epsilon = 0.5
    delta = 0.5
    alpha = 0.2
    exponent = 0.5
    n_max = 4

    [grid]
    kind = massless
    k_min = 0.2
    k_max = 1.2
    modes = 6

Unknown sections or keys are rejected, and validation reports every problem
at once, each named by its field.  See README for the full grammar.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field

import numpy as np

from .models import (
    GsbSpec,
    PfToySpec,
    assemble_gsb,
    assemble_pf_toy,
    dispersion_grid,
    spin_boson_preset,
    square_well_potential,
)
from .spectral import SpectralConfig


class ConfigError(ValueError):
    """Invalid configuration; carries the full list of problems."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


_SCHEMA = {
    "model": {
        "kind", "epsilon", "delta", "alpha", "exponent", "n_max",
        "atom", "couplings", "lambdas",
        "n_x", "box_length", "mass", "charge",
        "potential", "depth", "width", "wall_height", "wall_sites",
        "uv_cutoff",
    },
    "grid": {"kind", "nu", "k_min", "k_max", "modes"},
    "solver": {
        "dense_threshold", "eigen_tol", "delta_gap", "lanczos_maxiter",
        "seed", "cg_tol", "cg_maxiter",
    },
    "checks": {
        "run", "hs_trials", "random_states", "coupling_list",
        "ir_k_min_list", "ir_exponent_regular", "ir_exponent_critical",
        "ir_alpha", "ir_n_max", "ir_points_per_k_min",
        "pull_through_tol", "commutator_tol",
    },
    "sweep": {"cell_cap", "checks"},  # plus axis_<name> keys, validated below
    "output": {"dir", "formats", "stem"},
}

KNOWN_CHECKS = (
    "number_identity",
    "number_formula",
    "pull_through",
    "hs_invariance",
    "overlap_delta",
    "multiplicity",
    "resolvent_convergence",
    "massive_bound",
    "ir_probe",
    "binding_energy",
    "spatial_decay",
    "commutator_identity",
)

_SWEEP_AXES = ("alpha", "charge", "n_max", "modes", "k_min")


@dataclass
class RunConfig:
    kind: str
    model: dict
    grid: dict
    solver: SpectralConfig
    checks: dict
    sweep_axes: dict
    sweep_checks: list
    sweep_cell_cap: int
    output_dir: str
    output_formats: tuple
    output_stem: str
    source_text: str = field(repr=False, default="")


def _get(parser, section, key, cast, errors, default=None, required=False):
    if not parser.has_option(section, key):
        if required:
            errors.append(f"{section}.{key}: required key is missing")
        return default
    raw = parser.get(section, key)
    try:
        return cast(raw)
    except (ValueError, TypeError) as exc:
        errors.append(f"{section}.{key}: {exc}")
        return default


def _float(raw: str) -> float:
    return float(raw)


def _int(raw: str) -> int:
    v = float(raw)
    if v != int(v):
        raise ValueError(f"expected an integer, got {raw!r}")
    return int(v)


def _float_list(raw: str) -> list:
    items = [s.strip() for s in raw.split(",") if s.strip()]
    if not items:
        raise ValueError("empty list")
    return [float(s) for s in items]


def _complex_list(raw: str) -> list:
    items = [s.strip().replace(" ", "") for s in raw.split(",") if s.strip()]
    if not items:
        raise ValueError("empty list")
    return [complex(s) for s in items]


def _matrix(raw: str) -> np.ndarray:
    rows = [r for r in (s.strip() for s in raw.split(";")) if r]
    data = [_complex_list(r) for r in rows]
    width = {len(r) for r in data}
    if len(width) != 1:
        raise ValueError("matrix rows have unequal lengths")
    return np.array(data, dtype=np.complex128)


def _name_list(raw: str) -> list:
    return [s.strip() for s in raw.split(",") if s.strip()]


def parse_config(text: str) -> RunConfig:
    """Parse and validate configuration text.

    Raises ConfigError carrying every syntax and semantic problem found
    (syntax errors include the line number reported by the INI parser).
    """
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError([f"syntax: {exc}"]) from exc

    errors: list[str] = []
    for section in parser.sections():
        if section not in _SCHEMA:
            errors.append(f"{section}: unknown section")
            continue
        for key in parser.options(section):
            if section == "sweep" and key.startswith("axis_"):
                if key[len("axis_"):] not in _SWEEP_AXES:
                    errors.append(
                        f"sweep.{key}: unknown axis (known: {', '.join(_SWEEP_AXES)})"
                    )
                continue
            if key not in _SCHEMA[section]:
                errors.append(f"{section}.{key}: unknown key")

    kind = _get(parser, "model", "kind", str, errors, required=True)
    if kind is not None and kind not in ("spin-boson", "gsb", "pf-toy"):
        errors.append(f"model.kind: must be spin-boson, gsb, or pf-toy, got {kind!r}")

    grid = {
        "kind": _get(parser, "grid", "kind", str, errors, default="massless"),
        "nu": _get(parser, "grid", "nu", _float, errors, default=0.0),
        "k_min": _get(parser, "grid", "k_min", _float, errors, required=True),
        "k_max": _get(parser, "grid", "k_max", _float, errors, required=True),
        "modes": _get(parser, "grid", "modes", _int, errors, required=True),
    }
    if grid["kind"] not in ("massless", "massive"):
        errors.append("grid.kind: must be massless or massive")
    if grid["k_min"] is not None and grid["k_min"] <= 0:
        errors.append("grid.k_min: must be > 0 (omega = 0 is forbidden)")
    if (
        grid["k_min"] is not None
        and grid["k_max"] is not None
        and grid["k_max"] <= grid["k_min"]
    ):
        errors.append("grid.k_max: must exceed grid.k_min")
    if grid["modes"] is not None and grid["modes"] < 1:
        errors.append("grid.modes: must be >= 1")
    if grid["kind"] == "massive" and (grid["nu"] is None or grid["nu"] <= 0):
        errors.append("grid.nu: massive dispersion requires nu > 0")

    model: dict = {"kind": kind}
    n_max = _get(parser, "model", "n_max", _int, errors, required=True)
    if n_max is not None and n_max < 0:
        errors.append("model.n_max: must be >= 0")
    model["n_max"] = n_max

    if kind == "spin-boson":
        model["epsilon"] = _get(parser, "model", "epsilon", _float, errors, default=0.0)
        model["delta"] = _get(parser, "model", "delta", _float, errors, default=0.0)
        model["alpha"] = _get(parser, "model", "alpha", _float, errors, required=True)
        model["exponent"] = _get(parser, "model", "exponent", _float, errors, default=0.5)
    elif kind == "gsb":
        model["atom"] = _get(parser, "model", "atom", _matrix, errors, required=True)
        model["alpha"] = _get(parser, "model", "alpha", _float, errors, required=True)
        model["couplings"] = _get(parser, "model", "couplings", str, errors, required=True)
        model["lambdas"] = _get(parser, "model", "lambdas", str, errors, required=True)
    elif kind == "pf-toy":
        model["n_x"] = _get(parser, "model", "n_x", _int, errors, required=True)
        model["box_length"] = _get(parser, "model", "box_length", _float, errors, default=2 * math.pi)
        model["mass"] = _get(parser, "model", "mass", _float, errors, default=1.0)
        model["charge"] = _get(parser, "model", "charge", _float, errors, required=True)
        model["potential"] = _get(parser, "model", "potential", str, errors, default="square-well")
        model["depth"] = _get(parser, "model", "depth", _float, errors, default=8.0)
        model["width"] = _get(parser, "model", "width", _float, errors, default=2.4)
        model["wall_height"] = _get(parser, "model", "wall_height", _float, errors, default=0.0)
        model["wall_sites"] = _get(parser, "model", "wall_sites", _int, errors, default=0)
        model["uv_cutoff"] = _get(parser, "model", "uv_cutoff", _float, errors, default=1.0)
        if model["n_x"] is not None and model["n_x"] < 4:
            errors.append("model.n_x: must be >= 4")
        if model["mass"] is not None and model["mass"] <= 0:
            errors.append("model.mass: must be > 0")
        if model["potential"] not in ("square-well", "zero"):
            errors.append("model.potential: must be square-well or zero")

    solver_kwargs = {}
    for key, cast in (
        ("dense_threshold", _int),
        ("eigen_tol", _float),
        ("delta_gap", _float),
        ("lanczos_maxiter", _int),
        ("seed", _int),
        ("cg_tol", _float),
        ("cg_maxiter", _int),
    ):
        val = _get(parser, "solver", key, cast, errors)
        if val is not None:
            solver_kwargs[key] = val
    try:
        solver = SpectralConfig(**solver_kwargs)
    except ValueError as exc:
        errors.append(f"solver: {exc}")
        solver = SpectralConfig()

    checks: dict = {
        "run": _get(parser, "checks", "run", _name_list, errors, default=[]),
        "hs_trials": _get(parser, "checks", "hs_trials", _int, errors, default=5),
        "random_states": _get(parser, "checks", "random_states", _int, errors, default=20),
        "coupling_list": _get(parser, "checks", "coupling_list", _float_list, errors, default=None),
        "ir_k_min_list": _get(parser, "checks", "ir_k_min_list", _float_list, errors, default=[0.1, 0.05, 0.025, 0.0125]),
        "ir_exponent_regular": _get(parser, "checks", "ir_exponent_regular", _float, errors, default=0.5),
        "ir_exponent_critical": _get(parser, "checks", "ir_exponent_critical", _float, errors, default=-0.5),
        "ir_alpha": _get(parser, "checks", "ir_alpha", _float, errors, default=0.03),
        "ir_n_max": _get(parser, "checks", "ir_n_max", _int, errors, default=3),
        "ir_points_per_k_min": _get(parser, "checks", "ir_points_per_k_min", _float, errors, default=1.0),
        "pull_through_tol": _get(parser, "checks", "pull_through_tol", _float, errors, default=1e-8),
        "commutator_tol": _get(parser, "checks", "commutator_tol", _float, errors, default=1e-8),
    }
    for name in checks["run"]:
        if name not in KNOWN_CHECKS:
            errors.append(
                f"checks.run: unknown check {name!r} (known: {', '.join(KNOWN_CHECKS)})"
            )

    sweep_axes = {}
    if parser.has_section("sweep"):
        for key in parser.options("sweep"):
            if key.startswith("axis_") and key[len("axis_"):] in _SWEEP_AXES:
                axis = key[len("axis_"):]
                vals = _get(parser, "sweep", key, _float_list, errors, default=None)
                if vals is not None:
                    if axis in ("n_max", "modes"):
                        bad = [v for v in vals if v != int(v)]
                        if bad:
                            errors.append(f"sweep.{key}: entries must be integers")
                        vals = [int(v) for v in vals]
                    sweep_axes[axis] = vals
    sweep_checks = _name_list(parser.get("sweep", "checks")) if parser.has_option("sweep", "checks") else []
    for name in sweep_checks:
        if name not in KNOWN_CHECKS:
            errors.append(f"sweep.checks: unknown check {name!r}")
    sweep_cell_cap = _get(parser, "sweep", "cell_cap", _int, errors, default=10000)
    n_cells = 1
    for vals in sweep_axes.values():
        n_cells *= max(1, len(vals))
    if sweep_axes and n_cells > sweep_cell_cap:
        errors.append(f"sweep: {n_cells} cells exceed the cap {sweep_cell_cap}")

    output_dir = _get(parser, "output", "dir", str, errors, default="out")
    formats = tuple(
        _get(parser, "output", "formats", _name_list, errors, default=["jsonl"])
    )
    for fmt in formats:
        if fmt not in ("jsonl", "csv"):
            errors.append(f"output.formats: unknown format {fmt!r} (jsonl or csv)")
    output_stem = _get(parser, "output", "stem", str, errors, default="report")

    if errors:
        raise ConfigError(errors)
    return RunConfig(
        kind=kind,
        model=model,
        grid=grid,
        solver=solver,
        checks=checks,
        sweep_axes=sweep_axes,
        sweep_checks=sweep_checks,
        sweep_cell_cap=sweep_cell_cap,
        output_dir=output_dir,
        output_formats=formats,
        output_stem=output_stem,
        source_text=text,
    )


def build_grid(cfg: RunConfig, overrides: dict | None = None):
    g = dict(cfg.grid)
    overrides = overrides or {}
    if "k_min" in overrides:
        g["k_min"] = overrides["k_min"]
    if "modes" in overrides:
        g["modes"] = overrides["modes"]
    return dispersion_grid(g["kind"], g["k_min"], g["k_max"], g["modes"], g.get("nu", 0.0))


def build_spec(cfg: RunConfig, overrides: dict | None = None):
    """Construct the model spec from a validated configuration.

    overrides maps sweep-axis names (alpha, charge, n_max, modes, k_min) to
    replacement values for one sweep cell.
    """
    overrides = overrides or {}
    grid = build_grid(cfg, overrides)
    m = cfg.model
    n_max = int(overrides.get("n_max", m["n_max"]))
    if cfg.kind == "spin-boson":
        return spin_boson_preset(
            m["epsilon"], m["delta"], grid, m["exponent"],
            float(overrides.get("alpha", m["alpha"])), n_max,
        )
    if cfg.kind == "gsb":
        mats = [_matrix(s) for s in m["couplings"].split("|")]
        lams = [np.array(_complex_list(s)) for s in m["lambdas"].split("|")]
        if len(mats) != len(lams):
            raise ConfigError(["model.couplings/lambdas: counts differ"])
        for lam in lams:
            if lam.shape != (grid.count,):
                raise ConfigError(["model.lambdas: need one amplitude per mode"])
        return GsbSpec(
            atom=m["atom"],
            couplings=tuple(zip(mats, lams)),
            alpha=float(overrides.get("alpha", m["alpha"])),
            grid=grid,
            n_max=n_max,
        )
    if cfg.kind == "pf-toy":
        if m["potential"] == "square-well":
            pot = square_well_potential(
                m["n_x"], m["box_length"], m["depth"], m["width"],
                m["wall_height"], m["wall_sites"],
            )
        else:
            pot = np.zeros(m["n_x"])
        return PfToySpec(
            n_x=m["n_x"],
            box_length=m["box_length"],
            mass=m["mass"],
            charge=float(overrides.get("charge", m["charge"])),
            potential=pot,
            grid=grid,
            uv_cutoff=np.full(grid.count, m["uv_cutoff"]),
            n_max=n_max,
        )
    raise ConfigError([f"model.kind: unsupported {cfg.kind!r}"])


def build_model(cfg: RunConfig, overrides: dict | None = None):
    spec = build_spec(cfg, overrides)
    if isinstance(spec, PfToySpec):
        return assemble_pf_toy(spec)
    return assemble_gsb(spec)
