"""Acceptance suite: one test per criterion, each printing a PASS line.

Expected values tagged as derived come from the independent oracles in
oracles.py (closed forms, brute-force enumeration, high-resolution
quadrature), computed before the library paths they check.
"""

import math
import subprocess
import sys

import numpy as np
import pytest

from bosonlab.fock import (
    build_basis,
    ladder_op,
    number_operator,
    partial_number_sandwich,
    second_quantization,
)
from bosonlab.models import (
    GsbSpec,
    PfToySpec,
    SIGMA_X,
    SIGMA_Z,
    assemble_gsb,
    assemble_pf_toy,
    dispersion_grid,
    spin_boson_preset,
    square_well_potential,
)
from bosonlab.spectral import SpectralConfig, full_spectrum_small, ground_eigenspace
from bosonlab.verify import (
    binding_energy_check,
    commutator_identity_check,
    hs_invariance_check,
    ir_probe,
    ir_refinement_specs,
    massive_bound_check,
    multiplicity_check,
    number_formula_check,
    number_identity_check,
    overlap_delta_check,
    pull_through_check,
    resolvent_convergence_check,
    spatial_decay_check,
)

import oracles

CFG = SpectralConfig()

# Closed-form displaced-oscillator oracle, computed independently of the
# library (tests/oracles.py).  For eps=1, omega=1, lam=1, alpha=0.2 the
# ground branch has atom eigenvalue b0=-1, so the coherent amplitude is
# -alpha*b0*lam/(sqrt(2)*omega) = +0.14142135623730950; energy -0.52,
# boson number 0.02, vacuum overlap exp(-0.02).
ORACLE = oracles.displaced_oscillator(1.0, 1.0, 1.0, 0.2)


def _report(num, ok):
    print(f"ACCEPTANCE {num}: {'PASS' if ok else 'FAIL'}")
    assert ok


def _displaced(alpha=0.2, n_max=12):
    grid = dispersion_grid("massless", 0.5, 1.5, 1)  # midpoint k = omega = 1 exactly
    return assemble_gsb(
        GsbSpec(
            atom=0.5 * SIGMA_Z,
            couplings=((SIGMA_Z, np.array([1.0 + 0.0j])),),
            alpha=alpha,
            grid=grid,
            n_max=n_max,
        )
    )


def _spin_boson(alpha, n_max=4, epsilon=0.5, delta=0.5, modes=4, exponent=0.5):
    grid = dispersion_grid("massless", 0.3, 1.3, modes)
    return assemble_gsb(spin_boson_preset(epsilon, delta, grid, exponent, alpha, n_max))


def _pf_model(charge, n_max=2):
    grid = dispersion_grid("massless", 0.5, 3.5, 3)  # k = 1, 2, 3: commensurate with L
    pot = square_well_potential(16, 2 * math.pi, 8.0, 2.4, 1e5, 2)
    return assemble_pf_toy(
        PfToySpec(
            n_x=16, box_length=2 * math.pi, mass=1.0, charge=charge,
            potential=pot, grid=grid, uv_cutoff=np.ones(3), n_max=n_max,
        )
    )


def test_criterion_01_exact_identity_suite():
    ok = True
    rng = np.random.default_rng(101)

    # number-operator identity on 10 random states of a 3-mode product space
    model = _spin_boson(0.3, n_max=3, modes=3)
    for _ in range(10):
        psi = rng.standard_normal(model.dim) + 1j * rng.standard_normal(model.dim)
        rep = number_identity_check(model, psi, tol=1e-10)
        ok = ok and rep.passed

    # ... and on 3 model ground states
    grounds = [
        _displaced(),
        _spin_boson(0.2, n_max=4),
        assemble_gsb(
            spin_boson_preset(0.5, 0.5, dispersion_grid("massive", 0.3, 1.3, 3, nu=0.5), 0.5, 0.2, 3)
        ),
    ]
    for m in grounds:
        gs = ground_eigenspace(m.h, CFG, m.top_mask)
        rep = number_identity_check(m, gs.vectors[:, 0], tol=1e-10)
        ok = ok and rep.passed

    # Hilbert-Schmidt basis invariance under 5 random mode rotations
    m3 = _spin_boson(0.3, n_max=3, modes=3)
    gs3 = ground_eigenspace(m3.h, CFG, m3.top_mask)
    rep = hs_invariance_check(m3, gs3, trials=5, cfg=CFG, tol=1e-10)
    ok = ok and rep.passed

    # CCR and dispersion commutators below the cutoff
    basis = build_basis(3, 3)
    totals = basis.total_numbers()
    sub = totals <= basis.n_max - 1
    omega = np.array([0.5, 0.9, 1.4])
    dg = second_quantization(basis, np.diag(omega)).matrix
    for m in range(3):
        lo_m = ladder_op(basis, m, "lower").matrix
        for mp in range(3):
            ra = ladder_op(basis, mp, "raise").matrix
            comm = (lo_m @ ra - ra @ lo_m).toarray()
            comm -= (1.0 if m == mp else 0.0) * np.eye(basis.dim)
            ok = ok and np.max(np.abs(comm[:, sub])) < 1e-12
        disp = (dg @ lo_m - lo_m @ dg + omega[m] * lo_m).toarray()
        ok = ok and np.max(np.abs(disp)) < 1e-12

    # sandwiched partial number sums: norm <= 1, full sum = N(N+1)^-1
    for n_partial in range(4):
        norm = np.linalg.norm(partial_number_sandwich(basis, n_partial).matrix.toarray(), 2)
        ok = ok and norm <= 1.0 + 1e-12
    full = partial_number_sandwich(basis, 3).matrix.toarray()
    ok = ok and np.max(np.abs(full - np.diag(totals / (totals + 1.0)))) < 1e-12

    # additive-lift point spectrum against brute-force enumeration
    b23 = build_basis(2, 3)
    svals = [0.3, 0.5]
    got = full_spectrum_small(second_quantization(b23, np.diag(svals)).matrix, CFG)
    ok = ok and np.allclose(got, oracles.dgamma_point_spectrum(svals, 3), atol=1e-10)
    got_n = full_spectrum_small(number_operator(b23).matrix, CFG)
    ok = ok and np.allclose(got_n, oracles.dgamma_point_spectrum([1.0, 1.0], 3), atol=1e-12)

    _report(1, ok)


def test_criterion_02_displaced_oscillator_oracle():
    model = _displaced(alpha=0.2, n_max=12)
    gs = ground_eigenspace(model.h, CFG, model.top_mask)
    ok = abs(gs.energy - ORACLE["energy"]) < 1e-6
    assert abs(ORACLE["energy"] - (-0.52)) < 1e-14

    rep = number_formula_check(model, gs, CFG)
    for key in ("lhs_number", "mid_mode_sum", "rhs_resolvent_sum"):
        ok = ok and abs(rep.measured[key] - ORACLE["number"]) < 1e-6
    assert abs(ORACLE["number"] - 0.02) < 1e-14

    reports, _ = overlap_delta_check([model], CFG)
    ok = ok and abs(reports[0].measured["overlap"] - ORACLE["overlap"]) < 1e-4

    beta = float(ORACLE["amplitudes"][0])
    assert abs(abs(beta) - 0.1414213562373095) < 1e-10  # magnitude quoted in the brief
    phi = gs.vectors[:, 0]
    ok = ok and np.linalg.norm(model.lowers[0] @ phi - beta * phi) < 1e-5
    _report(2, ok)


def test_criterion_03_pull_through_convergence():
    raws = []
    ok = True
    for n_max in (4, 6, 8):
        model = _spin_boson(0.4, n_max=n_max, epsilon=1.0, delta=0.4, modes=2, exponent=0.0)
        gs = ground_eigenspace(model.h, CFG, model.top_mask)
        rep = pull_through_check(model, gs, CFG, corrected_tol=1e-8)
        ok = ok and rep.passed and rep.measured["max_corrected_residual"] <= 1e-8
        raws.append(rep.measured["max_raw_residual"])
    ok = ok and raws[1] <= raws[0] / 5.0 and raws[2] <= raws[1] / 5.0
    _report(3, ok)


def test_criterion_04_multiplicity_suite():
    ok = True
    alphas = (0.05, 0.1, 0.2)

    nondeg = [_spin_boson(a, n_max=4) for a in alphas]
    for rep in multiplicity_check(nondeg, CFG):
        ok = ok and rep.passed and rep.measured["cluster_size"] == 1

    grid = dispersion_grid("massless", 0.3, 1.3, 3)
    lam = np.sqrt(grid.weights).astype(complex)
    degenerate = [
        assemble_gsb(GsbSpec(atom=np.zeros((2, 2)), couplings=((SIGMA_X, lam),),
                             alpha=a, grid=grid, n_max=4))
        for a in alphas
    ]
    for rep in multiplicity_check(degenerate, CFG):
        ok = ok and rep.measured["cluster_size"] <= 2
        if rep.passed is not None:
            ok = ok and rep.passed

    for e in (0.0, 0.05):
        rep = multiplicity_check([_pf_model(e)], CFG)[0]
        ok = ok and rep.passed and rep.measured["cluster_size"] == 2
        ok = ok and rep.measured["gap_to_spread_ratio"] >= 1e3
    _report(4, ok)


def test_criterion_05_overlap_delta_suite():
    models = [_spin_boson(a, n_max=4) for a in (0.2, 0.1, 0.05, 0.025)]
    reports, trend = overlap_delta_check(models, CFG, slack=0.10)
    ok = trend.passed
    for rep in reports:
        ok = ok and rep.measured["overlap"] > 0
        delta = rep.measured["delta"]
        if math.isfinite(delta) and delta < 1:
            ok = ok and rep.measured["margin"] >= -1e-10
    deltas = trend.measured["deltas"]
    ok = ok and all(b <= a * 1.10 for a, b in zip(deltas, deltas[1:]))
    _report(5, ok)


def test_criterion_06_resolvent_convergence():
    grid = dispersion_grid("massless", 0.3, 1.3, 4)
    models = [
        assemble_gsb(spin_boson_preset(0.5, 0.5, grid, 0.5, a, 2))
        for a in (0.4, 0.2, 0.1, 0.05)
    ]
    assert models[0].dim <= 500
    rep = resolvent_convergence_check(models, CFG)
    ok = rep.passed
    ns = rep.measured["resolvent_diff_norms"]
    ok = ok and ns[-1] <= ns[0] / 4.0
    for n, bound in zip(ns, rep.measured["proof_chain_bounds"]):
        ok = ok and n <= bound + 1e-10
    for shift, bound in zip(rep.measured["energy_shifts"], rep.measured["energy_shift_bounds"]):
        ok = ok and shift <= bound + 1e-10
    _report(6, ok)


def test_criterion_07_massive_bound():
    ok = True
    for nu in (0.5, 1.0):
        grid = dispersion_grid("massive", 0.3, 1.3, 3, nu=nu)
        model = assemble_gsb(spin_boson_preset(0.5, 0.5, grid, 0.5, 0.2, 3))
        rep = massive_bound_check(model, n_random=20, tol=1e-10, cfg=CFG)
        ok = ok and rep.passed and rep.measured["max_violation"] <= 1e-10
    _report(7, ok)


def test_criterion_08_ir_dichotomy_probe():
    k_mins = [0.1, 0.05, 0.025, 0.0125]
    ok = True

    regular = [assemble_gsb(s) for s in ir_refinement_specs(k_mins, 0.5, 0.03, 3)]
    rep = ir_probe(regular, expect_convergent=True, cfg=CFG)
    ok = ok and rep.passed and not any(rep.diagnostics["flagged_refinements"])
    n = rep.measured["number_expectations"]
    ok = ok and abs(n[-1] - n[-2]) <= 0.05 * n[-1]

    critical = [assemble_gsb(s) for s in ir_refinement_specs(k_mins, -0.5, 0.03, 3)]
    rep = ir_probe(critical, expect_convergent=False, cfg=CFG)
    ok = ok and rep.passed and not any(rep.diagnostics["flagged_refinements"])
    n = rep.measured["number_expectations"]
    increments = np.diff(n)
    ok = ok and all(d > 0 for d in increments) and increments[-1] >= 0.5 * increments[-2]
    _report(8, ok)


def test_criterion_09_pf_inequalities():
    ok = True
    for e in (0.0, 0.05, 0.1):
        model = _pf_model(e)
        gs = ground_eigenspace(model.h, CFG, model.top_mask)
        bind = binding_energy_check(model, CFG, rel_tol=1e-6)
        ok = ok and bind.passed and bind.measured["margin"] >= -1e-6 * bind.diagnostics["scale"]
        if e == 0.0:
            ok = ok and abs(bind.measured["margin"]) < 1e-8  # decoupled equality
        decay = spatial_decay_check(model, gs, CFG)
        ok = ok and decay.passed and decay.measured["margin"] > 0

    # the commutator identity is well-posed on the decoupled member: with a
    # coordinate diagonal in position, [x, H] has zero position diagonal while
    # (i/m)(p - eA) carries -ieA(x)/m there, so e > 0 only admits a residual
    # report (printed below), not a 1e-8 identity
    rep0 = commutator_identity_check(_pf_model(0.0), cfg=CFG, tol=1e-8)
    ok = ok and rep0.passed and rep0.measured["max_residual"] <= 1e-8
    for e in (0.05, 0.1):
        rep = commutator_identity_check(_pf_model(e), cfg=CFG)
        print(f"  commutator residual at coupling {e}: {rep.measured['max_residual']:.3e} "
              f"(finite-grid obstruction, reported)")
    _report(9, ok)


def test_criterion_10_reproducibility(tmp_path):
    config = """
[model]
kind = spin-boson
epsilon = 0.5
delta = 0.5
alpha = 0.2
exponent = 0.5
n_max = 3

[grid]
kind = massless
k_min = 0.3
k_max = 1.3
modes = 3

[checks]
run = number_identity, number_formula, pull_through, hs_invariance

[sweep]
axis_alpha = 0.05, 0.1, 0.2
checks = number_formula, overlap_delta
"""
    path = tmp_path / "repro.ini"
    path.write_text(config)
    outputs = []
    for sub in ("a", "b"):
        proc = subprocess.run(
            [sys.executable, "-m", "bosonlab.cli", "sweep", "--config", str(path),
             "--seed", "7", "--out", str(tmp_path / sub)],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0, proc.stderr
        outputs.append((tmp_path / sub / "report.jsonl").read_bytes())
        proc = subprocess.run(
            [sys.executable, "-m", "bosonlab.cli", "verify", "--config", str(path),
             "--seed", "7", "--out", str(tmp_path / sub / "v")],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0, proc.stderr
        outputs.append((tmp_path / sub / "v" / "report.jsonl").read_bytes())
    ok = outputs[0] == outputs[2] and outputs[1] == outputs[3]
    _report(10, ok)
