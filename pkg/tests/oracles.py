"""Independent oracles for the test suite.

Everything here is built from first principles (itertools enumeration, dense
single-mode ladders with full tensor products, closed forms, high-resolution
quadrature) and deliberately avoids the library's occupation-basis and
operator-assembly code paths.
"""

import itertools
import math

import numpy as np


def occupations_brute(n_modes: int, n_max: int):
    """All occupation tuples with total <= n_max, total-major then lexicographic."""
    out = []
    for total in range(n_max + 1):
        for occ in itertools.product(range(total + 1), repeat=n_modes):
            if sum(occ) == total:
                out.append(occ)
    return out


def dgamma_point_spectrum(diag_values, n_max: int):
    """Sorted eigenvalues (with multiplicity) of the additive lift of a diagonal."""
    vals = []
    for occ in occupations_brute(len(diag_values), n_max):
        vals.append(sum(n * s for n, s in zip(occ, diag_values)))
    return np.sort(np.array(vals, dtype=float))


def displaced_oscillator(epsilon: float, omega, lam, alpha: float) -> dict:
    """Closed form for the commuting spin-boson case A = (eps/2) sz, B = sz.

    Each atom branch b0 = +/-1 sees an oscillator displaced by the coupling;
    the branch energy is E_atom - sum_m (alpha b0 lam_m)^2 / (2 omega_m) and
    the per-mode coherent amplitude is z_m = -alpha b0 lam_m / (sqrt(2) omega_m).
    Returns the data of the lower branch.
    """
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    branches = []
    for b0, e_atom in ((1.0, epsilon / 2.0), (-1.0, -epsilon / 2.0)):
        shift = float(np.sum((alpha * b0 * lam) ** 2 / (2.0 * omega)))
        z = -alpha * b0 * lam / (np.sqrt(2.0) * omega)
        branches.append((e_atom - shift, z, b0))
    branches.sort(key=lambda t: t[0])
    energy, z, b0 = branches[0]
    number = float(np.sum(z**2))
    return {
        "energy": energy,
        "amplitudes": z,
        "number": number,
        "overlap": math.exp(-number),
        "atom_branch": b0,
    }


def single_mode_ladders(n_max: int):
    d = n_max + 1
    lower = np.diag(np.sqrt(np.arange(1, d)), 1)
    return lower, lower.T.copy()


def tensor_ladders(n_modes: int, n_max: int):
    """Per-mode lowering operators on the full (n_max+1)^M tensor grid."""
    lower, _ = single_mode_ladders(n_max)
    d = n_max + 1
    ops = []
    for m in range(n_modes):
        mats = [np.eye(d)] * n_modes
        mats[m] = lower
        acc = mats[0]
        for other in mats[1:]:
            acc = np.kron(acc, other)
        ops.append(acc)
    return ops


def truncation_indices(n_modes: int, n_max: int):
    """Tensor-grid indices whose total occupation is within the cutoff."""
    d = n_max + 1
    keep = []
    for i, occ in enumerate(itertools.product(range(d), repeat=n_modes)):
        if sum(occ) <= n_max:
            keep.append(i)
    return np.array(keep, dtype=int)


def dense_gsb(atom, couplings, alpha, omega, n_max: int) -> np.ndarray:
    """Dense generalized spin-boson Hamiltonian via tensor-grid projection.

    Builds every operator on the full per-mode tensor grid with plain numpy
    Kronecker products, then compresses to the total-number-truncated
    subspace.  Independent of the library's occupation enumeration; spectra
    and scalar expectations are basis-order-free.
    """
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    n_modes = len(omega)
    lowers = tensor_ladders(n_modes, n_max)
    keep = truncation_indices(n_modes, n_max)
    atom = np.asarray(atom, dtype=complex)
    na = atom.shape[0]

    dg = sum(w * (lo.T.conj() @ lo) for w, lo in zip(omega, lowers))
    dg_t = dg[np.ix_(keep, keep)]
    h = np.kron(atom, np.eye(len(keep))) + np.kron(np.eye(na), dg_t)
    for b, lam in couplings:
        lam = np.asarray(lam, dtype=complex)
        a_lam = sum(l * lo for l, lo in zip(lam, lowers))
        phi = (a_lam + a_lam.T.conj()) / np.sqrt(2.0)
        phi_t = phi[np.ix_(keep, keep)]
        h = h + alpha * np.kron(np.asarray(b, dtype=complex), phi_t)
    return h


def dense_pf_toy(n_x, box_length, mass, charge, potential, k_points, weights,
                 omega, uv, n_max) -> np.ndarray:
    """Dense reduced Pauli-Fierz Hamiltonian, built independently.

    Ordering (site, spin, Fock-kept-index).  Kinetic term is the 3-point
    stencil; momentum is the periodic central difference; the field operators
    are built on the tensor grid and compressed to the truncated subspace.
    """
    k_points = np.asarray(k_points, dtype=float)
    omega = np.asarray(omega, dtype=float)
    uv = np.asarray(uv, dtype=float)
    weights = np.asarray(weights, dtype=float)
    n_modes = len(k_points)
    lowers = tensor_ladders(n_modes, n_max)
    keep = truncation_indices(n_modes, n_max)
    nf = len(keep)

    h = box_length / n_x
    x = -0.5 * box_length + h * np.arange(n_x)
    shift = np.zeros((n_x, n_x))
    for i in range(n_x):
        shift[i, (i + 1) % n_x] = 1.0
    p = (-1j / (2 * h)) * (shift - shift.T)
    lap = (2 * np.eye(n_x) - shift - shift.T) / h**2
    h_p = lap / (2 * mass) + np.diag(np.asarray(potential, dtype=float))

    c = uv * np.sqrt(weights) / np.sqrt(2.0 * omega)
    dg = sum(w * (lo.T.conj() @ lo) for w, lo in zip(omega, lowers))[np.ix_(keep, keep)]

    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    i2 = np.eye(2)
    i_f = np.eye(nf)
    dim = n_x * 2 * nf
    a_full = np.zeros((dim, dim), dtype=complex)
    sb_full = np.zeros((dim, dim), dtype=complex)
    for i in range(n_x):
        a_i = np.zeros((nf, nf), dtype=complex)
        b_i = np.zeros((nf, nf), dtype=complex)
        for m in range(n_modes):
            ph = np.exp(-1j * k_points[m] * x[i])
            raise_t = lowers[m].T.conj()[np.ix_(keep, keep)]
            lower_t = lowers[m][np.ix_(keep, keep)]
            a_i += c[m] * (ph * raise_t + np.conj(ph) * lower_t)
            b_i += c[m] * (-1j * k_points[m]) * (ph * raise_t - np.conj(ph) * lower_t)
        block = slice(i * 2 * nf, (i + 1) * 2 * nf)
        a_full[block, block] = np.kron(i2, a_i)
        sb_full[block, block] = np.kron(sx, b_i)
    p_full = np.kron(p, np.eye(2 * nf))
    h0 = np.kron(np.kron(h_p, i2), i_f) + np.kron(np.eye(2 * n_x), dg)
    h_int = (
        -(1.0 / (2 * mass)) * (p_full @ a_full + a_full @ p_full)
        + (charge / (2 * mass)) * (a_full @ a_full)
        - (1.0 / (2 * mass)) * sb_full
    )
    return h0 + charge * h_int


def quadrature_integral(fn, a: float, b: float, cells: int) -> float:
    """Midpoint rule with a fixed high resolution; reference for refinements."""
    w = (b - a) / cells
    k = a + w * (np.arange(cells) + 0.5)
    return float(np.sum(fn(k) * w))


def uniform_second_moment_ratio(box_length: float) -> float:
    """||x psi|| / ||psi|| for the uniform density on [-L/2, L/2]."""
    return box_length / (2.0 * math.sqrt(3.0))


def scalar_resolvent_difference(g: float, z: complex = 1j) -> float:
    """1x1 toy: |1/(1 + g - z) - 1/(1 - z)| for H0bar = 1, H_I = 1."""
    return abs(1.0 / (1.0 + g - z) - 1.0 / (1.0 - z))
