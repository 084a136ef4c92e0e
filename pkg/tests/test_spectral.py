import numpy as np
import pytest
import scipy.sparse as sp

from bosonlab.models import assemble_gsb, dispersion_grid, spin_boson_preset
from bosonlab.spectral import (
    SolverConvergenceError,
    SpectralConfig,
    full_spectrum_small,
    ground_eigenspace,
    operator_norm_diff,
    resolvent_apply,
    spectral_norm,
)

import oracles


def test_ground_eigenspace_diagonal_cluster():
    h = np.diag([0.0, 0.0, 1.0])
    gs = ground_eigenspace(h)
    assert gs.energy == 0.0
    assert gs.multiplicity == 2
    assert abs(gs.gap - 1.0) < 1e-15


def test_ground_eigenspace_decoupled_model():
    g = dispersion_grid("massless", 0.5, 1.5, 2)
    model = assemble_gsb(spin_boson_preset(1.0, 0.3, g, 0.5, 0.0, 3))
    gs = ground_eigenspace(model.h, top_mask=model.top_mask)
    assert gs.multiplicity == 1
    atom_evals, atom_vecs = np.linalg.eigh(model.atom_h)
    ref = np.kron(atom_vecs[:, 0], np.eye(model.basis.dim)[:, 0])
    assert abs(abs(np.vdot(ref, gs.vectors[:, 0])) - 1.0) < 1e-10
    assert gs.top_weights is not None and gs.top_weights[0] < 1e-20


def test_ground_eigenspace_displaced_oscillator():
    oracle = oracles.displaced_oscillator(1.0, 1.0, 1.0, 0.2)
    g = dispersion_grid("massless", 0.5, 1.5, 1)
    model = assemble_gsb(
        spin_boson_preset(1.0, 0.0, g, 0.0, 0.2, 12, window=1.0 / np.sqrt(g.weights))
    )
    gs = ground_eigenspace(model.h, top_mask=model.top_mask)
    assert abs(gs.energy - oracle["energy"]) < 1e-6
    assert gs.multiplicity == 1


def test_ground_eigenspace_sparse_path_matches_dense_and_is_deterministic():
    g = dispersion_grid("massless", 0.4, 1.6, 4)
    model = assemble_gsb(spin_boson_preset(0.8, 0.5, g, 0.5, 0.3, 4))
    dense_cfg = SpectralConfig(dense_threshold=10000)
    sparse_cfg = SpectralConfig(dense_threshold=8)
    dense = ground_eigenspace(model.h, dense_cfg)
    sparse1 = ground_eigenspace(model.h, sparse_cfg)
    sparse2 = ground_eigenspace(model.h, sparse_cfg)
    assert abs(dense.energy - sparse1.energy) < 1e-9
    assert sparse1.energy == sparse2.energy  # bit-identical for a fixed seed
    assert sparse1.multiplicity == sparse2.multiplicity
    assert np.array_equal(sparse1.vectors, sparse2.vectors)


def test_rayleigh_quotient_minimality():
    g = dispersion_grid("massless", 0.5, 1.5, 3)
    model = assemble_gsb(spin_boson_preset(0.6, 0.4, g, 0.5, 0.2, 3))
    gs = ground_eigenspace(model.h)
    rng = np.random.default_rng(8)
    h = model.h.toarray()
    for _ in range(100):
        u = rng.standard_normal(model.dim) + 1j * rng.standard_normal(model.dim)
        u /= np.linalg.norm(u)
        assert np.vdot(u, h @ u).real >= gs.energy - 1e-8 * gs.scale


def test_residuals_reported():
    h = np.diag([0.0, 2.0, 5.0])
    gs = ground_eigenspace(h)
    assert np.all(gs.residuals <= 1e-12)


def test_resolvent_trivial_cases():
    assert np.all(resolvent_apply(np.zeros((1, 1)), 0.0, 2.0, np.array([0.0])) == 0.0)
    x = resolvent_apply(np.zeros((1, 1)), 0.0, 2.0, np.array([1.0]))
    assert abs(x[0] - 0.5) < 1e-14


def test_resolvent_matches_dense_inverse():
    rng = np.random.default_rng(12)
    a = rng.standard_normal((50, 50)) + 1j * rng.standard_normal((50, 50))
    h = a @ a.conjugate().T  # Hermitian PSD
    evals = np.linalg.eigvalsh(h)
    rhs = rng.standard_normal(50) + 1j * rng.standard_normal(50)
    shift = 0.7
    x = resolvent_apply(h, evals[0], shift, rhs)
    want = np.linalg.solve(h - (evals[0] - shift) * np.eye(50), rhs)
    assert np.linalg.norm(x - want) < 1e-8 * np.linalg.norm(want)


def test_resolvent_identity_residual():
    rng = np.random.default_rng(13)
    a = rng.standard_normal((40, 40))
    h = a @ a.T
    e0 = float(np.linalg.eigvalsh(h)[0])
    rhs = rng.standard_normal(40)
    cfg = SpectralConfig()
    for shift in (0.3, 1.0, 2.5):
        x = resolvent_apply(h, e0, shift, rhs, cfg)
        resid = np.linalg.norm((h - (e0 - shift) * np.eye(40)) @ x - rhs)
        assert resid <= cfg.cg_tol * np.linalg.norm(rhs)


def test_resolvent_cg_path_and_indefinite_detection():
    rng = np.random.default_rng(14)
    a = rng.standard_normal((60, 60))
    h = sp.csr_matrix(a @ a.T + 60 * np.eye(60))
    cfg = SpectralConfig(dense_threshold=10)
    e0 = float(np.linalg.eigvalsh(h.toarray())[0])
    rhs = rng.standard_normal(60)
    x = resolvent_apply(h, e0, 0.5, rhs, cfg)
    resid = np.linalg.norm((h.toarray() - (e0 - 0.5) * np.eye(60)) @ x - rhs)
    assert resid <= cfg.cg_tol * np.linalg.norm(rhs) * 1.01
    # shifting far above the bottom makes the system indefinite
    with pytest.raises(SolverConvergenceError):
        resolvent_apply(h, e0 + 200.0, 1e-3, rhs, cfg)


def test_operator_norm_diff_examples():
    assert operator_norm_diff(np.eye(3), np.eye(3)) == 0.0
    x = np.diag([3.0, -1.0])
    assert abs(operator_norm_diff(x + np.eye(2), np.eye(2)) - 3.0) < 1e-12
    rng = np.random.default_rng(15)
    a = rng.standard_normal((30, 30)) + 1j * rng.standard_normal((30, 30))
    b = rng.standard_normal((30, 30)) + 1j * rng.standard_normal((30, 30))
    want = np.linalg.norm(a - b, 2)
    assert abs(operator_norm_diff(a, b) - want) < 1e-6 * want


def test_power_iteration_matches_dense_svd():
    rng = np.random.default_rng(16)
    a = rng.standard_normal((80, 80))
    cfg = SpectralConfig(dense_threshold=10)
    want = np.linalg.norm(a, 2)
    got = spectral_norm(sp.csr_matrix(a), cfg)
    assert abs(got - want) < 2e-5 * want


def test_full_spectrum_small():
    assert np.allclose(full_spectrum_small(np.diag([3.0, 1.0, 2.0])), [1.0, 2.0, 3.0])

    from bosonlab.fock import build_basis, number_operator, second_quantization

    b = build_basis(2, 2)
    dg = second_quantization(b, np.diag([0.3, 0.5])).matrix
    assert np.allclose(
        full_spectrum_small(dg), oracles.dgamma_point_spectrum([0.3, 0.5], 2), atol=1e-12
    )
    b23 = build_basis(2, 3)
    n_op = number_operator(b23).matrix
    assert np.allclose(
        full_spectrum_small(n_op), oracles.dgamma_point_spectrum([1.0, 1.0], 3), atol=1e-14
    )
    with pytest.raises(ValueError):
        full_spectrum_small(np.eye(5), SpectralConfig(dense_threshold=3))
