"""Coupled atom-field Hamiltonians on the atom (x) Fock product space.

Two families are assembled as sparse Hermitian matrices:

* generalized spin-boson:  H = A (x) 1 + 1 (x) dG(omega) + alpha * sum_j B_j (x) field(lam_j)
* a reduced one-dimensional Pauli-Fierz model: a charged particle with spin
  1/2 on a periodic grid, minimally coupled to the truncated boson field,
  with a scalar caricature b(k) = k of the magnetic coupling.

Every assembled model carries the decomposition H = H0 + g * H_I entrywise,
the per-mode interaction commutators T_m = [a_m, H_I] (symbolic for the
spin-boson family, sparse numerical commutators for the particle model), and
projection/diagnostic helpers used by the verifier.

The quadrature weights are folded into the mode amplitudes (lam_m contains a
sqrt(w_m) factor), so the mode basis is orthonormal and continuum integrals
become plain sums over modes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .fock import (
    DEFAULT_DIMENSION_CAP,
    DimensionCapError,
    ModeGrid,
    OccupationBasis,
    build_basis,
    field_operator,
    fock_dimension,
    ladder_op,
    number_operator,
    second_quantization,
)

HERMITIAN_RTOL = 1e-12

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=np.complex128)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=np.complex128)


def dispersion_grid(kind: str, k_min: float, k_max: float, n_modes: int, nu: float = 0.0) -> ModeGrid:
    """Uniform-midpoint mode grid with massless or massive dispersion.

    k_m sits at the midpoint of each of n_modes equal cells of [k_min, k_max],
    every weight is (k_max - k_min) / n_modes, and omega = sqrt(k^2 + nu^2).
    """
    if kind not in ("massless", "massive"):
        raise ValueError("kind must be 'massless' or 'massive'")
    if kind == "massless":
        nu = 0.0
    elif nu <= 0:
        raise ValueError("massive dispersion requires nu > 0")
    if not 0 < k_min < k_max:
        raise ValueError("need 0 < k_min < k_max")
    if n_modes < 1:
        raise ValueError("n_modes must be >= 1")
    w = (k_max - k_min) / n_modes
    k = k_min + w * (np.arange(n_modes) + 0.5)
    omega = np.sqrt(k**2 + nu**2)
    return ModeGrid(
        k_points=k,
        weights=np.full(n_modes, w),
        omega=omega,
        nu=nu,
        k_min=k_min,
        k_max=k_max,
    )


def form_factor_preset(grid: ModeGrid, exponent: float, window=None) -> np.ndarray:
    """Coupling amplitudes lam_m = omega_m^exponent * window(k_m) * sqrt(w_m).

    The sqrt(w_m) factor embeds the quadrature so that sum_m |lam_m|^2
    approximates the continuum integral of |omega^exponent * window|^2.
    """
    if window is None:
        win = np.ones(grid.count)
    elif callable(window):
        win = np.asarray([window(k) for k in grid.k_points], dtype=float)
    else:
        win = np.asarray(window, dtype=float)
        if win.shape != (grid.count,):
            raise ValueError("window array must have one entry per mode")
    lam = grid.omega**exponent * win * np.sqrt(grid.weights)
    return lam.astype(np.complex128)


def _check_hermitian(name: str, m: np.ndarray):
    dev = np.max(np.abs(m - m.conjugate().T)) if m.size else 0.0
    scale = max(float(np.max(np.abs(m))) if m.size else 0.0, 1e-300)
    if dev > HERMITIAN_RTOL * scale:
        raise ValueError(f"{name} is not Hermitian (deviation {dev:.3e})")


@dataclass(frozen=True)
class GsbSpec:
    """Generalized spin-boson model data.

    atom is an n x n Hermitian matrix; couplings is a nonempty list of
    (B_j, lam_j) pairs with B_j Hermitian n x n and lam_j one complex
    amplitude per mode; alpha is the dimensionless coupling constant.
    """

    atom: np.ndarray
    couplings: tuple
    alpha: float
    grid: ModeGrid
    n_max: int
    dimension_cap: int = DEFAULT_DIMENSION_CAP
    label: str = "gsb"

    def __post_init__(self):
        atom = np.asarray(self.atom, dtype=np.complex128)
        object.__setattr__(self, "atom", atom)
        if atom.ndim != 2 or atom.shape[0] != atom.shape[1] or atom.shape[0] < 1:
            raise ValueError("atom must be a square matrix")
        _check_hermitian("atom", atom)
        if not self.couplings:
            raise ValueError("at least one coupling term is required")
        cleaned = []
        for j, (b, lam) in enumerate(self.couplings):
            b = np.asarray(b, dtype=np.complex128)
            lam = np.asarray(lam, dtype=np.complex128).reshape(-1)
            if b.shape != atom.shape:
                raise ValueError(f"coupling matrix {j} must match the atom dimension")
            _check_hermitian(f"coupling matrix {j}", b)
            if lam.shape != (self.grid.count,):
                raise ValueError(f"coupling amplitudes {j} must have one entry per mode")
            if not np.all(np.isfinite(lam)):
                raise ValueError(f"coupling amplitudes {j} must be finite")
            cleaned.append((b, lam))
        object.__setattr__(self, "couplings", tuple(cleaned))
        if self.n_max < 0:
            raise ValueError("n_max must be >= 0")

    @property
    def atom_dim(self) -> int:
        return self.atom.shape[0]


def spin_boson_preset(
    epsilon: float,
    delta: float,
    grid: ModeGrid,
    exponent: float,
    alpha: float,
    n_max: int,
    window=None,
    dimension_cap: int = DEFAULT_DIMENSION_CAP,
) -> GsbSpec:
    """Two-level atom (eps/2) sz + (delta/2) sx coupled through sz to the field."""
    atom = 0.5 * epsilon * SIGMA_Z + 0.5 * delta * SIGMA_X
    lam = form_factor_preset(grid, exponent, window)
    return GsbSpec(
        atom=atom,
        couplings=((SIGMA_Z, lam),),
        alpha=alpha,
        grid=grid,
        n_max=n_max,
        dimension_cap=dimension_cap,
        label="spin-boson",
    )


def square_well_potential(
    n_x: int,
    box_length: float,
    depth: float,
    width: float,
    wall_height: float = 0.0,
    wall_sites: int = 0,
) -> np.ndarray:
    """Attractive square well centered at x = 0, optionally walled at the box edge.

    The wall (wall_sites grid points of height wall_height at each end of the
    coordinate range) pins the state away from the periodic wrap, where the
    coordinate observable is discontinuous.
    """
    x = grid_points(n_x, box_length)
    v = np.where(np.abs(x) < 0.5 * width, -float(depth), 0.0)
    if wall_sites > 0:
        order = np.argsort(np.abs(x))[::-1]
        v[order[: 2 * wall_sites]] = wall_height
    return v


def grid_points(n_x: int, box_length: float) -> np.ndarray:
    h = box_length / n_x
    return -0.5 * box_length + h * np.arange(n_x)


@dataclass(frozen=True)
class PfToySpec:
    """Reduced Pauli-Fierz data: 1-d periodic particle, spin 1/2, scalar photons."""

    n_x: int
    box_length: float
    mass: float
    charge: float
    potential: np.ndarray
    grid: ModeGrid
    uv_cutoff: np.ndarray
    n_max: int
    dimension_cap: int = DEFAULT_DIMENSION_CAP
    label: str = "pf-toy"

    def __post_init__(self):
        if self.n_x < 4:
            raise ValueError("n_x must be >= 4")
        if self.box_length <= 0:
            raise ValueError("box_length must be > 0")
        if self.mass <= 0:
            raise ValueError("mass must be > 0")
        v = np.asarray(self.potential, dtype=float)
        if v.shape != (self.n_x,):
            raise ValueError("potential must have one sample per grid point")
        object.__setattr__(self, "potential", v)
        phat = np.asarray(self.uv_cutoff, dtype=float).reshape(-1)
        if phat.shape != (self.grid.count,):
            raise ValueError("uv_cutoff must have one sample per mode")
        if not np.all(np.isfinite(phat)):
            raise ValueError("uv_cutoff samples must be finite")
        for name, arr in (
            ("uv_cutoff/sqrt(omega)", phat / np.sqrt(self.grid.omega)),
            ("sqrt(omega)*uv_cutoff", np.sqrt(self.grid.omega) * phat),
            ("uv_cutoff/omega", phat / self.grid.omega),
        ):
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} must be finite on the grid")
        object.__setattr__(self, "uv_cutoff", phat)
        if self.n_max < 0:
            raise ValueError("n_max must be >= 0")

    @property
    def x_points(self) -> np.ndarray:
        return grid_points(self.n_x, self.box_length)

    def with_potential_zero(self) -> "PfToySpec":
        return PfToySpec(
            n_x=self.n_x,
            box_length=self.box_length,
            mass=self.mass,
            charge=self.charge,
            potential=np.zeros(self.n_x),
            grid=self.grid,
            uv_cutoff=self.uv_cutoff,
            n_max=self.n_max,
            dimension_cap=self.dimension_cap,
            label=self.label + "-free",
        )

    def with_charge(self, charge: float) -> "PfToySpec":
        return PfToySpec(
            n_x=self.n_x,
            box_length=self.box_length,
            mass=self.mass,
            charge=charge,
            potential=self.potential,
            grid=self.grid,
            uv_cutoff=self.uv_cutoff,
            n_max=self.n_max,
            dimension_cap=self.dimension_cap,
            label=self.label,
        )


@dataclass
class AssembledModel:
    """Sparse H = H0 + g * H_I on the atom (x) Fock product space.

    atom_h is the full non-field factor (the n x n atom matrix for the
    spin-boson family; particle (x) spin for the reduced Pauli-Fierz model).
    commutators[m] realizes T_m = [a_m, H_I]; lowers[m] is 1_atom (x) a_m.
    """

    kind: str
    spec: object
    grid: ModeGrid
    basis: OccupationBasis
    atom_dim: int
    atom_h: np.ndarray
    h0: sp.csr_matrix
    h_int: sp.csr_matrix
    h: sp.csr_matrix
    g: float
    lowers: list
    commutators: list
    proj_atom_vacuum: sp.csr_matrix
    top_mask: np.ndarray
    e_atom: float
    atom_gap: float
    m_atom: int
    label: str
    extras: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.h.shape[0]

    @property
    def omega(self) -> np.ndarray:
        return self.grid.omega

    def lift(self, fock_op: sp.spmatrix) -> sp.csr_matrix:
        return sp.kron(sp.identity(self.atom_dim, format="csr"), fock_op, format="csr")

    def number_full(self) -> sp.csr_matrix:
        return self.lift(number_operator(self.basis).matrix)

    def dgamma_full(self) -> sp.csr_matrix:
        return self.lift(second_quantization(self.basis, np.diag(self.grid.omega)).matrix)

    def top_weight(self, vec: np.ndarray) -> float:
        vec = np.asarray(vec)
        nrm2 = float(np.vdot(vec, vec).real)
        if nrm2 == 0.0:
            return 0.0
        return float(np.sum(np.abs(vec[self.top_mask]) ** 2) / nrm2)

    def number_expectation(self, vec: np.ndarray) -> float:
        vec = np.asarray(vec)
        totals = np.tile(self.basis.total_numbers(), self.atom_dim)
        nrm2 = float(np.vdot(vec, vec).real)
        return float(np.sum(totals * np.abs(vec) ** 2) / nrm2)


def _atom_spectrum_info(atom_h: np.ndarray, tol_scale: float = 1e-9):
    """Ground energy, ground degeneracy, and gap to the next distinct level."""
    evals = np.linalg.eigvalsh(atom_h)
    scale = max(1.0, float(evals[-1] - evals[0]))
    e0 = float(evals[0])
    distinct_tol = tol_scale * scale
    m = int(np.sum(evals <= e0 + distinct_tol))
    gap = float(evals[m] - e0) if m < len(evals) else math.inf
    return e0, m, gap


def _atom_ground_projector(atom_h: np.ndarray, tol_scale: float = 1e-9) -> np.ndarray:
    evals, vecs = np.linalg.eigh(atom_h)
    scale = max(1.0, float(evals[-1] - evals[0]))
    sel = evals <= evals[0] + tol_scale * scale
    v = vecs[:, sel]
    return v @ v.conjugate().T


def _full_top_mask(basis: OccupationBasis, atom_dim: int) -> np.ndarray:
    fock_top = basis.total_numbers() == basis.n_max
    return np.tile(fock_top, atom_dim)


def _check_total_dimension(total: int, cap: int):
    if total > cap:
        raise DimensionCapError(
            f"product-space dimension {total} exceeds the cap {cap}"
        )


def assemble_gsb(spec: GsbSpec) -> AssembledModel:
    """Assemble the generalized spin-boson Hamiltonian and its T_m operators."""
    fdim = fock_dimension(spec.grid.count, spec.n_max)
    _check_total_dimension(spec.atom_dim * fdim, spec.dimension_cap)
    basis = build_basis(spec.grid.count, spec.n_max, spec.dimension_cap)
    atom = sp.csr_matrix(spec.atom)
    i_atom = sp.identity(spec.atom_dim, format="csr")
    i_fock = sp.identity(basis.dim, format="csr")

    dg = second_quantization(basis, np.diag(spec.grid.omega)).matrix
    h0 = (sp.kron(atom, i_fock) + sp.kron(i_atom, dg)).tocsr()
    h0.sort_indices()

    h_int = sp.csr_matrix((h0.shape[0], h0.shape[1]), dtype=np.complex128)
    for b, lam in spec.couplings:
        h_int = h_int + sp.kron(sp.csr_matrix(b), field_operator(basis, lam).matrix)
    h_int = h_int.tocsr()
    h_int.sort_indices()

    h = (h0 + spec.alpha * h_int).tocsr()
    h.sort_indices()

    lowers = [
        sp.kron(i_atom, ladder_op(basis, m, "lower").matrix, format="csr")
        for m in range(spec.grid.count)
    ]
    # T_m = [a_m, H_I] closes on B_j (x) 1 with amplitude conj(lam_{j,m})/sqrt(2).
    commutators = []
    for m in range(spec.grid.count):
        coef = sum(
            (np.conj(lam[m]) / math.sqrt(2)) * b for b, lam in spec.couplings
        )
        commutators.append(sp.kron(sp.csr_matrix(coef), i_fock, format="csr"))

    p_atom = _atom_ground_projector(spec.atom)
    p_vac = sp.csc_matrix(
        (np.ones(1), (np.zeros(1, dtype=int), np.zeros(1, dtype=int))),
        shape=(basis.dim, basis.dim),
    )
    proj = sp.kron(sp.csr_matrix(p_atom), p_vac, format="csr")

    e_atom, m_atom, atom_gap = _atom_spectrum_info(spec.atom)
    return AssembledModel(
        kind="gsb",
        spec=spec,
        grid=spec.grid,
        basis=basis,
        atom_dim=spec.atom_dim,
        atom_h=np.asarray(spec.atom),
        h0=h0,
        h_int=h_int,
        h=h,
        g=float(spec.alpha),
        lowers=lowers,
        commutators=commutators,
        proj_atom_vacuum=proj,
        top_mask=_full_top_mask(basis, spec.atom_dim),
        e_atom=e_atom,
        atom_gap=atom_gap,
        m_atom=m_atom,
        label=spec.label,
    )


def momentum_matrix(n_x: int, box_length: float) -> sp.csr_matrix:
    """Periodic central-difference momentum -i d/dx (Hermitian)."""
    h = box_length / n_x
    shift_up = sp.eye(n_x, k=1, format="lil")
    shift_up[n_x - 1, 0] = 1.0
    shift_up = shift_up.tocsr()
    return ((-1j / (2 * h)) * (shift_up - shift_up.T)).tocsr()


def laplacian_matrix(n_x: int, box_length: float) -> sp.csr_matrix:
    """Periodic 3-point -d^2/dx^2 (the discrete p^2).

    Chosen over the square of the central difference: the squared stencil
    decouples even/odd sublattices and breaks the exact discrete commutator
    [x, p^2] = 2i p away from the wrap, which the verifier relies on.
    """
    h = box_length / n_x
    shift_up = sp.eye(n_x, k=1, format="lil")
    shift_up[n_x - 1, 0] = 1.0
    shift_up = shift_up.tocsr()
    return ((2.0 * sp.identity(n_x) - shift_up - shift_up.T) / h**2).tocsr()


def particle_hamiltonian(spec: PfToySpec) -> np.ndarray:
    """Dense spinless particle Hamiltonian h_p = p^2/(2m) + V on the grid."""
    lap = laplacian_matrix(spec.n_x, spec.box_length).toarray()
    return lap / (2.0 * spec.mass) + np.diag(spec.potential)


def assemble_pf_toy(spec: PfToySpec) -> AssembledModel:
    """Assemble the reduced Pauli-Fierz Hamiltonian.

    Ordering is (site, spin, Fock).  The vector potential at each site is
    A_i = sum_m c_m (exp(-i k_m x_i) raise_m + exp(i k_m x_i) lower_m) with
    c_m = uv_m sqrt(w_m) / sqrt(2 omega_m); the magnetic caricature replaces
    the 3-d curl factor by the scalar b(k) = k and couples through sigma_x.
    T_m is the sparse commutator [a_m, H_I], exact below the cutoff.
    """
    fdim = fock_dimension(spec.grid.count, spec.n_max)
    atom_dim = 2 * spec.n_x
    _check_total_dimension(atom_dim * fdim, spec.dimension_cap)
    ratio = np.max(spec.uv_cutoff / spec.grid.omega)
    if ratio > 1e12:
        raise ValueError(
            f"uv_cutoff/omega reaches {ratio:.3e} near k_min; refusing to assemble"
        )
    basis = build_basis(spec.grid.count, spec.n_max, spec.dimension_cap)
    n_modes = spec.grid.count
    x = spec.x_points
    m_e = spec.mass
    e = spec.charge

    raises = [ladder_op(basis, m, "raise").matrix for m in range(n_modes)]
    lowers_f = [r.conjugate().transpose().tocsc() for r in raises]
    c = spec.uv_cutoff * np.sqrt(spec.grid.weights) / np.sqrt(2.0 * spec.grid.omega)

    i2 = sp.identity(2, format="csr")
    i_fock = sp.identity(basis.dim, format="csr")

    a_blocks = []
    sb_blocks = []
    for i in range(spec.n_x):
        phase = np.exp(-1j * spec.grid.k_points * x[i])
        a_i = sp.csc_matrix((basis.dim, basis.dim), dtype=np.complex128)
        b_i = sp.csc_matrix((basis.dim, basis.dim), dtype=np.complex128)
        for m in range(n_modes):
            a_i = a_i + c[m] * (phase[m] * raises[m] + np.conj(phase[m]) * lowers_f[m])
            b_i = b_i + c[m] * (-1j * spec.grid.k_points[m]) * (
                phase[m] * raises[m] - np.conj(phase[m]) * lowers_f[m]
            )
        a_blocks.append(sp.kron(i2, a_i))
        sb_blocks.append(sp.kron(sp.csr_matrix(SIGMA_X), b_i))
    a_full = sp.block_diag(a_blocks, format="csr")
    sb_full = sp.block_diag(sb_blocks, format="csr")

    h_p = particle_hamiltonian(spec)
    atom_h = np.kron(h_p, np.eye(2))
    p = momentum_matrix(spec.n_x, spec.box_length)
    p_full = sp.kron(p, sp.identity(2 * basis.dim, format="csr"), format="csr")

    dg = second_quantization(basis, np.diag(spec.grid.omega)).matrix
    h0 = (
        sp.kron(sp.csr_matrix(atom_h), i_fock)
        + sp.kron(sp.identity(atom_dim, format="csr"), dg)
    ).tocsr()

    h_int = (
        -(1.0 / (2.0 * m_e)) * (p_full @ a_full + a_full @ p_full)
        + (e / (2.0 * m_e)) * (a_full @ a_full)
        - (1.0 / (2.0 * m_e)) * sb_full
    ).tocsr()
    h_int.sort_indices()

    h = (h0 + e * h_int).tocsr()
    h.sort_indices()

    lowers = [
        sp.kron(sp.identity(atom_dim, format="csr"), lowers_f[m], format="csr")
        for m in range(n_modes)
    ]
    commutators = [(lo @ h_int - h_int @ lo).tocsr() for lo in lowers]

    p_hp = _atom_ground_projector(h_p)
    p_atom = np.kron(p_hp, np.eye(2))
    p_vac = sp.csc_matrix(
        (np.ones(1), (np.zeros(1, dtype=int), np.zeros(1, dtype=int))),
        shape=(basis.dim, basis.dim),
    )
    proj = sp.kron(sp.csr_matrix(p_atom), p_vac, format="csr")

    e_atom, m_atom, atom_gap = _atom_spectrum_info(atom_h)
    model = AssembledModel(
        kind="pf-toy",
        spec=spec,
        grid=spec.grid,
        basis=basis,
        atom_dim=atom_dim,
        atom_h=atom_h,
        h0=h0,
        h_int=h_int,
        h=h,
        g=float(e),
        lowers=lowers,
        commutators=commutators,
        proj_atom_vacuum=proj,
        top_mask=_full_top_mask(basis, atom_dim),
        e_atom=e_atom,
        atom_gap=atom_gap,
        m_atom=m_atom,
        label=spec.label,
    )
    model.extras["vector_potential"] = a_full
    model.extras["momentum_full"] = p_full
    model.extras["particle_h"] = h_p
    return model


def position_full(model: AssembledModel, absolute: bool = False) -> sp.csr_matrix:
    """Coordinate (or |coordinate|) of the particle lifted to the full space."""
    if model.kind != "pf-toy":
        raise ValueError("position operator is defined for the pf-toy model only")
    x = model.spec.x_points
    vals = np.abs(x) if absolute else x
    diag = sp.diags(vals.astype(np.complex128), format="csr")
    return sp.kron(diag, sp.identity(2 * model.basis.dim, format="csr"), format="csr")
