"""Ground-eigenspace computation, shifted resolvent solves, and norm estimates.

Dense LAPACK paths are used below a configurable dimension threshold; above
it, ARPACK Lanczos (full reorthogonalization of the Krylov basis) computes
the low end of the spectrum and conjugate gradients solve the Hermitian
positive-definite shifted systems.  Every solver is deterministic for a fixed
seed: start vectors come from a seeded generator and reduction orders are
fixed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla


class SolverConvergenceError(RuntimeError):
    """An iterative solve failed to reach its tolerance."""


@dataclass(frozen=True)
class SpectralConfig:
    dense_threshold: int = 2000
    eigen_tol: float = 1e-10
    delta_gap: float = 1e-8
    lanczos_maxiter: int = 20000
    lanczos_k_start: int = 8
    lanczos_k_limit: int = 128
    seed: int = 1234
    cg_tol: float = 1e-10
    cg_maxiter: int = 100000
    norm_rtol: float = 1e-6
    norm_maxiter: int = 5000

    def __post_init__(self):
        for name in ("eigen_tol", "delta_gap", "cg_tol", "norm_rtol"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass
class GroundStateResult:
    """Near-ground eigencluster: energy, orthonormal vectors, and diagnostics.

    multiplicity is the size of the detected cluster (all eigenvalues within
    delta_gap * scale of the lowest); gap is the distance from the cluster
    bottom to the first eigenvalue outside it.
    """

    energy: float
    vectors: np.ndarray
    multiplicity: int
    gap: float
    residuals: np.ndarray
    scale: float
    cluster_spread: float
    top_weights: np.ndarray | None = None
    diagnostics: dict = field(default_factory=dict)


def gershgorin_bound(h) -> float:
    """Upper bound on the spectral norm of a Hermitian matrix."""
    if sp.issparse(h):
        return float(np.max(np.abs(h).sum(axis=1)))
    return float(np.max(np.sum(np.abs(np.asarray(h)), axis=1)))


def _as_operator(h):
    if sp.issparse(h):
        return h.tocsr()
    return np.asarray(h)


def ground_eigenspace(h, cfg: SpectralConfig | None = None, top_mask=None) -> GroundStateResult:
    """Lowest eigenvalue and every eigenvector within the degeneracy window.

    Dense below cfg.dense_threshold, ARPACK Lanczos (seeded start vector,
    escalating subspace size until the cluster edge is certified) above.
    Raises SolverConvergenceError when residuals cannot be met.
    """
    cfg = cfg or SpectralConfig()
    h = _as_operator(h)
    dim = h.shape[0]
    if dim <= cfg.dense_threshold:
        dense = h.toarray() if sp.issparse(h) else h
        evals, evecs = np.linalg.eigh(dense)
        scale = max(1.0, float(evals[-1] - evals[0]))
        thr = cfg.delta_gap * scale
        m = int(np.searchsorted(evals, evals[0] + thr, side="right"))
        vectors = np.ascontiguousarray(evecs[:, :m])
        gap = float(evals[m] - evals[0]) if m < dim else float("inf")
        spread = float(evals[m - 1] - evals[0])
        cluster_evals = evals[:m]
    else:
        scale = max(1.0, gershgorin_bound(h))
        thr = cfg.delta_gap * scale
        rng = np.random.default_rng(cfg.seed)
        v0 = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        v0 /= np.linalg.norm(v0)
        k = min(max(cfg.lanczos_k_start, 2), dim - 1)
        while True:
            try:
                evals, evecs = spla.eigsh(
                    h, k=k, which="SA", v0=v0, maxiter=cfg.lanczos_maxiter, tol=0
                )
            except spla.ArpackNoConvergence as exc:
                raise SolverConvergenceError(
                    f"Lanczos failed to converge with k={k} after "
                    f"{cfg.lanczos_maxiter} iterations: {exc}"
                ) from exc
            order = np.argsort(evals)
            evals, evecs = evals[order], evecs[:, order]
            m = int(np.searchsorted(evals, evals[0] + thr, side="right"))
            if m < k:
                break
            if k >= min(cfg.lanczos_k_limit, dim - 1):
                raise SolverConvergenceError(
                    f"could not certify the cluster edge: all {k} computed "
                    f"eigenvalues lie within the degeneracy window {thr:.3e}"
                )
            k = min(2 * k, dim - 1, cfg.lanczos_k_limit)
        vectors = np.ascontiguousarray(evecs[:, :m])
        gap = float(evals[m] - evals[0])
        spread = float(evals[m - 1] - evals[0])
        cluster_evals = evals[:m]

    e0 = float(evals[0])
    # Re-orthonormalize only if needed; LAPACK/ARPACK vectors are orthonormal
    # already, and rotations across near-degenerate levels would inflate
    # per-vector residuals.
    overlap = vectors.conjugate().T @ vectors
    if np.max(np.abs(overlap - np.eye(vectors.shape[1]))) > 1e-10:
        vectors, _ = np.linalg.qr(vectors)
    hv = h @ vectors
    residuals = np.array(
        [float(np.linalg.norm(hv[:, j] - cluster_evals[j] * vectors[:, j])) for j in range(vectors.shape[1])]
    )
    if np.any(residuals > cfg.eigen_tol * scale):
        raise SolverConvergenceError(
            f"eigenvector residuals {residuals} exceed {cfg.eigen_tol * scale:.3e}"
        )
    top_weights = None
    if top_mask is not None:
        top_mask = np.asarray(top_mask, dtype=bool)
        top_weights = np.array(
            [float(np.sum(np.abs(vectors[top_mask, j]) ** 2)) for j in range(vectors.shape[1])]
        )
    return GroundStateResult(
        energy=e0,
        vectors=vectors,
        multiplicity=vectors.shape[1],
        gap=gap,
        residuals=residuals,
        scale=scale,
        cluster_spread=spread,
        top_weights=top_weights,
    )


def resolvent_apply(h, energy: float, shift: float, rhs: np.ndarray, cfg: SpectralConfig | None = None) -> np.ndarray:
    """Solve (H - energy + shift) x = rhs for Hermitian H with H - energy >= 0.

    shift must be positive so the system is Hermitian positive definite.
    Direct dense solve below the threshold, conjugate gradients above;
    indefiniteness surfaces as SolverConvergenceError naming the shift.
    """
    cfg = cfg or SpectralConfig()
    if shift <= 0:
        raise ValueError("shift must be positive")
    h = _as_operator(h)
    rhs = np.asarray(rhs, dtype=np.complex128)
    nrm = float(np.linalg.norm(rhs))
    if nrm == 0.0:
        return np.zeros_like(rhs)
    dim = h.shape[0]
    if dim <= cfg.dense_threshold:
        dense = h.toarray() if sp.issparse(h) else np.array(h, dtype=np.complex128)
        mat = dense - (energy - shift) * np.eye(dim)
        try:
            x = scipy.linalg.solve(mat, rhs, assume_a="pos")
        except np.linalg.LinAlgError as exc:
            raise SolverConvergenceError(
                f"shifted system indefinite at shift {shift}: {exc}"
            ) from exc
        resid = np.linalg.norm(mat @ x - rhs)
        if resid > cfg.cg_tol * nrm:
            # One step of iterative refinement covers ill-scaled cases.
            x = x + scipy.linalg.solve(mat, rhs - mat @ x, assume_a="pos")
            resid = np.linalg.norm(mat @ x - rhs)
            if resid > cfg.cg_tol * nrm:
                raise SolverConvergenceError(
                    f"dense solve residual {resid:.3e} exceeds tolerance at shift {shift}"
                )
        return x
    mat = (h + (shift - energy) * sp.identity(dim, dtype=np.complex128, format="csr")).tocsr()
    return _cg_hermitian(mat, rhs, cfg.cg_tol, cfg.cg_maxiter, shift)


def _cg_hermitian(mat, rhs: np.ndarray, rtol: float, maxiter: int, shift: float) -> np.ndarray:
    """Plain conjugate gradients with explicit positive-definiteness monitoring.

    p' A p <= 0 means the shifted system is not positive definite and is
    reported as a breakdown naming the shift; the reduction order is fixed,
    so repeated runs are bit-identical.
    """
    x = np.zeros_like(rhs)
    r = rhs.copy()
    p = r.copy()
    rs = float(np.vdot(r, r).real)
    tol2 = (rtol * math.sqrt(float(np.vdot(rhs, rhs).real))) ** 2
    for _ in range(maxiter):
        if rs <= tol2:
            return x
        ap = mat @ p
        pap = float(np.vdot(p, ap).real)
        if pap <= 0.0:
            raise SolverConvergenceError(
                f"conjugate gradients broke down at shift {shift}: "
                f"the shifted system is indefinite (p'Ap = {pap:.3e})"
            )
        alpha = rs / pap
        x = x + alpha * p
        r = r - alpha * ap
        rs_new = float(np.vdot(r, r).real)
        p = r + (rs_new / rs) * p
        rs = rs_new
    if rs <= tol2:
        return x
    raise SolverConvergenceError(
        f"conjugate gradients did not converge at shift {shift}: "
        f"residual {math.sqrt(rs):.3e} after {maxiter} iterations"
    )


def spectral_norm(x, cfg: SpectralConfig | None = None) -> float:
    """Largest singular value; dense SVD below threshold, power iteration above."""
    cfg = cfg or SpectralConfig()
    if sp.issparse(x):
        dim = max(x.shape)
        if dim <= cfg.dense_threshold:
            return _dense_norm(x.toarray())
        return _power_norm(x.tocsr(), cfg)
    x = np.asarray(x)
    if max(x.shape) <= cfg.dense_threshold:
        return _dense_norm(x)
    return _power_norm(x, cfg)


def _dense_norm(x: np.ndarray) -> float:
    if x.size == 0 or not np.any(x):
        return 0.0
    return float(np.linalg.norm(x, 2))


def _power_norm(x, cfg: SpectralConfig) -> float:
    rng = np.random.default_rng(cfg.seed)
    v = rng.standard_normal(x.shape[1]) + 1j * rng.standard_normal(x.shape[1])
    v /= np.linalg.norm(v)
    xh = x.conjugate().T if not sp.issparse(x) else x.conjugate().transpose().tocsr()
    sigma2 = 0.0
    for _ in range(cfg.norm_maxiter):
        w = xh @ (x @ v)
        new = float(np.real(np.vdot(v, w)))
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        v = w / nw
        if abs(new - sigma2) <= cfg.norm_rtol * max(abs(new), 1e-300):
            return float(np.sqrt(max(new, 0.0)))
        sigma2 = new
    raise SolverConvergenceError(
        f"power iteration for the operator norm did not reach relative "
        f"accuracy {cfg.norm_rtol} in {cfg.norm_maxiter} iterations"
    )


def operator_norm_diff(x, y, cfg: SpectralConfig | None = None) -> float:
    """Spectral norm of X - Y."""
    cfg = cfg or SpectralConfig()
    if sp.issparse(x) or sp.issparse(y):
        d = sp.csr_matrix(x) - sp.csr_matrix(y)
    else:
        d = np.asarray(x) - np.asarray(y)
    return spectral_norm(d, cfg)


def full_spectrum_small(h, cfg: SpectralConfig | None = None) -> np.ndarray:
    """All eigenvalues, ascending; only for dimensions below the dense threshold."""
    cfg = cfg or SpectralConfig()
    h = _as_operator(h)
    if h.shape[0] > cfg.dense_threshold:
        raise ValueError(
            f"full spectrum requested for dimension {h.shape[0]} above the dense "
            f"threshold {cfg.dense_threshold}"
        )
    dense = h.toarray() if sp.issparse(h) else h
    return np.linalg.eigvalsh(dense)
