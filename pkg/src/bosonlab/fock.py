"""Truncated boson Fock space over a finite mode set.

The one-particle space is spanned by M orthonormal modes; the Fock space is
truncated at a total occupation cutoff n_max, so its dimension is
C(M + n_max, n_max).  States are ordered total-number-major and
lexicographically within each sector, which keeps sector projectors
contiguous.  All operators are sparse complex matrices assembled in a fixed
column-major order, so construction is bit-reproducible.

Conventions:
  raise_m |.., n_m, ..>  = sqrt(n_m + 1) |.., n_m + 1, ..>   (top sector image dropped)
  lower_m                = adjoint of raise_m (exactly the conjugate transpose)
  field(lam)             = (a'(conj(lam)) + a(lam)) / sqrt(2), Hermitian for any lam
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

DEFAULT_DIMENSION_CAP = 5_000_000

HERMITIAN_RTOL = 1e-12


class DimensionCapError(ValueError):
    """Requested Fock space exceeds the configured dimension cap."""


@dataclass(frozen=True)
class ModeGrid:
    """Discretized one-particle space: momenta, quadrature weights, dispersion.

    k_points must be strictly increasing and positive; omega must be strictly
    positive (k_min > 0 guarantees this even for massless dispersion).
    """

    k_points: np.ndarray
    weights: np.ndarray
    omega: np.ndarray
    nu: float
    k_min: float
    k_max: float

    def __post_init__(self):
        k = np.asarray(self.k_points, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        om = np.asarray(self.omega, dtype=float)
        object.__setattr__(self, "k_points", k)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "omega", om)
        if k.ndim != 1 or k.size < 1:
            raise ValueError("k_points must be a nonempty 1-d array")
        if not (len(k) == len(w) == len(om)):
            raise ValueError("k_points, weights, omega must have equal length")
        if self.k_min <= 0:
            raise ValueError("k_min must be > 0 (omega = 0 is forbidden)")
        if self.k_max <= self.k_min:
            raise ValueError("k_max must exceed k_min")
        if np.any(np.diff(k) <= 0):
            raise ValueError("k_points must be strictly increasing")
        if np.any(w <= 0):
            raise ValueError("all quadrature weights must be strictly positive")
        if np.any(om <= 0):
            raise ValueError("all dispersion values must be strictly positive")
        if self.nu < 0:
            raise ValueError("mass nu must be >= 0")

    @property
    def count(self) -> int:
        return len(self.k_points)


def _enumerate_sector(n_modes: int, total: int):
    """All occupation tuples of length n_modes summing to total, lexicographic."""
    if n_modes == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for tail in _enumerate_sector(n_modes - 1, total - head):
            yield (head,) + tail


@dataclass(frozen=True)
class OccupationBasis:
    """Occupation-number basis with a total-number cutoff.

    states[i] is the occupation vector of basis state i; index maps the tuple
    back to i; sector_offsets[n] is the first index of the total-number-n
    sector, with sector_offsets[n_max + 1] == dim.
    """

    n_modes: int
    n_max: int
    states: np.ndarray
    index: dict = field(repr=False)
    sector_offsets: np.ndarray

    @property
    def dim(self) -> int:
        return self.states.shape[0]

    def sector_slice(self, n: int) -> slice:
        """Index slice of the total-number-n sector."""
        return slice(int(self.sector_offsets[n]), int(self.sector_offsets[n + 1]))

    def sector_weights(self, vec: np.ndarray) -> np.ndarray:
        """Squared norm of each total-number component of vec."""
        vec = np.asarray(vec)
        return np.array(
            [np.sum(np.abs(vec[self.sector_slice(n)]) ** 2) for n in range(self.n_max + 1)]
        )

    def total_numbers(self) -> np.ndarray:
        """Total occupation of every basis state, in basis order."""
        return self.states.sum(axis=1)


def fock_dimension(n_modes: int, n_max: int) -> int:
    return math.comb(n_modes + n_max, n_max)


def build_basis(n_modes: int, n_max: int, dimension_cap: int = DEFAULT_DIMENSION_CAP) -> OccupationBasis:
    """Build the truncated occupation basis; vacuum is index 0.

    Raises DimensionCapError if C(n_modes + n_max, n_max) exceeds dimension_cap.
    """
    if n_modes < 1:
        raise ValueError("n_modes must be >= 1")
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    dim = fock_dimension(n_modes, n_max)
    if dim > dimension_cap:
        raise DimensionCapError(
            f"Fock dimension C({n_modes}+{n_max},{n_max}) = {dim} exceeds the cap "
            f"{dimension_cap}; lower n_modes/n_max or raise the cap explicitly"
        )
    states = []
    offsets = [0]
    for n in range(n_max + 1):
        states.extend(_enumerate_sector(n_modes, n))
        offsets.append(len(states))
    arr = np.array(states, dtype=np.int64).reshape(dim, n_modes)
    index = {tuple(int(x) for x in row): i for i, row in enumerate(arr)}
    return OccupationBasis(
        n_modes=n_modes,
        n_max=n_max,
        states=arr,
        index=index,
        sector_offsets=np.array(offsets, dtype=np.int64),
    )


@dataclass(frozen=True)
class FockOperator:
    """Sparse operator on a truncated Fock basis."""

    basis: OccupationBasis
    matrix: sp.csc_matrix
    hermitian: bool = False

    def __post_init__(self):
        if self.matrix.shape != (self.basis.dim, self.basis.dim):
            raise ValueError("operator shape does not match basis dimension")
        if self.hermitian:
            dev = _max_abs(self.matrix - self.matrix.conjugate().transpose())
            scale = max(_max_abs(self.matrix), 1e-300)
            if dev > HERMITIAN_RTOL * scale:
                raise ValueError(
                    f"operator flagged hermitian deviates from its adjoint by {dev:.3e} "
                    f"(max-entry scale {scale:.3e})"
                )

    @property
    def dim(self) -> int:
        return self.basis.dim

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()


def _max_abs(m) -> float:
    m = sp.csc_matrix(m)
    return float(np.max(np.abs(m.data))) if m.nnz else 0.0


def _csc_from_triplets(rows, cols, vals, dim) -> sp.csc_matrix:
    # Triplets are produced column by column, so the CSC build is deterministic.
    m = sp.csc_matrix(
        (np.asarray(vals, dtype=np.complex128), (np.asarray(rows), np.asarray(cols))),
        shape=(dim, dim),
    )
    m.sum_duplicates()
    m.sort_indices()
    return m


def ladder_op(basis: OccupationBasis, mode: int, kind: str) -> FockOperator:
    """Ladder operator for one mode: kind = 'raise' or 'lower'.

    Raising out of the top sector is dropped (projected truncation); lowering
    is exactly the conjugate transpose of raising.
    """
    if not 0 <= mode < basis.n_modes:
        raise IndexError(f"mode {mode} out of range [0, {basis.n_modes})")
    if kind not in ("raise", "lower"):
        raise ValueError("kind must be 'raise' or 'lower'")
    rows, cols, vals = [], [], []
    totals = basis.total_numbers()
    for col in range(basis.dim):
        if totals[col] >= basis.n_max:
            continue
        occ = basis.states[col]
        target = tuple(occ + (np.arange(basis.n_modes) == mode))
        rows.append(basis.index[target])
        cols.append(col)
        vals.append(math.sqrt(occ[mode] + 1))
    raised = _csc_from_triplets(rows, cols, vals, basis.dim)
    if kind == "raise":
        return FockOperator(basis, raised, hermitian=False)
    lowered = raised.conjugate().transpose().tocsc()
    lowered.sort_indices()
    return FockOperator(basis, lowered, hermitian=False)


def number_operator(basis: OccupationBasis) -> FockOperator:
    """Total number operator: diagonal with entries sum_m n_m."""
    diag = basis.total_numbers().astype(np.complex128)
    return FockOperator(basis, sp.diags(diag, format="csc"), hermitian=True)


def second_quantization(basis: OccupationBasis, one_particle: np.ndarray) -> FockOperator:
    """Additive lift of a Hermitian M x M one-particle matrix to the Fock space.

    Block diagonal in total-number sectors; annihilates the vacuum.  The
    matrix element connecting occ -> occ - e_q + e_p carries
    S[p, q] * sqrt(n_q) * sqrt(n_p + 1); diagonal terms are sum_m S[m, m] n_m.
    """
    S = np.asarray(one_particle, dtype=np.complex128)
    if S.shape != (basis.n_modes, basis.n_modes):
        raise ValueError("one-particle matrix shape must be (n_modes, n_modes)")
    dev = np.max(np.abs(S - S.conjugate().T)) if S.size else 0.0
    scale = max(float(np.max(np.abs(S))) if S.size else 0.0, 1e-300)
    if dev > HERMITIAN_RTOL * scale:
        raise ValueError(f"one-particle matrix is not Hermitian (deviation {dev:.3e})")
    rows, cols, vals = [], [], []
    diag_s = np.real(np.diag(S))
    offdiag = [
        (p, q) for q in range(basis.n_modes) for p in range(basis.n_modes)
        if p != q and S[p, q] != 0
    ]
    unit = np.eye(basis.n_modes, dtype=np.int64)
    for col in range(basis.dim):
        occ = basis.states[col]
        d = float(np.dot(diag_s, occ))
        if d != 0.0:
            rows.append(col)
            cols.append(col)
            vals.append(d)
        for p, q in offdiag:
            nq = occ[q]
            if nq == 0:
                continue
            target = tuple(occ - unit[q] + unit[p])
            rows.append(basis.index[target])
            cols.append(col)
            vals.append(S[p, q] * math.sqrt(nq) * math.sqrt(occ[p] + 1))
    return FockOperator(basis, _csc_from_triplets(rows, cols, vals, basis.dim), hermitian=True)


def field_operator(basis: OccupationBasis, lam: np.ndarray) -> FockOperator:
    """Hermitian field operator (a'(conj(lam)) + a(lam)) / sqrt(2).

    a'(f) = sum_m f_m raise_m and a(f) = sum_m f_m lower_m; both are linear
    in f, and the conjugate in the creation argument makes the sum Hermitian
    for arbitrary complex lam.
    """
    lam = np.asarray(lam, dtype=np.complex128).reshape(-1)
    if lam.shape != (basis.n_modes,):
        raise ValueError("lam must have one entry per mode")
    if not np.all(np.isfinite(lam)):
        raise ValueError("lam must be finite")
    acc = sp.csc_matrix((basis.dim, basis.dim), dtype=np.complex128)
    for m in range(basis.n_modes):
        if lam[m] == 0:
            continue
        raise_m = ladder_op(basis, m, "raise").matrix
        acc = acc + np.conj(lam[m]) * raise_m + lam[m] * raise_m.conjugate().transpose()
    out = (acc / math.sqrt(2)).tocsc()
    out.sort_indices()
    return FockOperator(basis, out, hermitian=True)


def partial_number_sandwich(basis: OccupationBasis, n_partial: int) -> FockOperator:
    """(N+1)^(-1/2) (sum_{m < n_partial} raise_m lower_m) (N+1)^(-1/2).

    Uniformly bounded by 1 for every partial mode count; for the full sum it
    equals N (N+1)^(-1) exactly.
    """
    if not 0 <= n_partial <= basis.n_modes:
        raise ValueError("n_partial out of range")
    acc = sp.csc_matrix((basis.dim, basis.dim), dtype=np.complex128)
    for m in range(n_partial):
        raise_m = ladder_op(basis, m, "raise").matrix
        acc = acc + raise_m @ raise_m.conjugate().transpose()
    scale = sp.diags(1.0 / np.sqrt(basis.total_numbers() + 1.0), format="csc")
    out = (scale @ acc @ scale).tocsc()
    out.sort_indices()
    return FockOperator(basis, out, hermitian=True)


def vacuum_vector(basis: OccupationBasis) -> np.ndarray:
    vec = np.zeros(basis.dim, dtype=np.complex128)
    vec[0] = 1.0
    return vec
