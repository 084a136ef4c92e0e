"""Truncated bosonic Fock spaces, coupled atom-field models, and ground-state checks.

The package builds occupation-number Fock bases with a total-number cutoff,
assembles spin-boson / generalized spin-boson and a reduced one-dimensional
Pauli-Fierz Hamiltonian on the atom (x) field product space, diagonalizes them,
and verifies ground-state identities (pull-through, number-operator formula,
Hilbert-Schmidt invariance, overlap and multiplicity bounds) with quantified
tolerances and explicit truncation diagnostics.
"""

from .fock import (
    DimensionCapError,
    FockOperator,
    ModeGrid,
    OccupationBasis,
    build_basis,
    field_operator,
    ladder_op,
    number_operator,
    second_quantization,
)
from .models import (
    AssembledModel,
    GsbSpec,
    PfToySpec,
    assemble_gsb,
    assemble_pf_toy,
    dispersion_grid,
    form_factor_preset,
    spin_boson_preset,
)
from .spectral import (
    GroundStateResult,
    SolverConvergenceError,
    SpectralConfig,
    full_spectrum_small,
    ground_eigenspace,
    operator_norm_diff,
    resolvent_apply,
)

__all__ = [
    "AssembledModel",
    "DimensionCapError",
    "FockOperator",
    "GroundStateResult",
    "GsbSpec",
    "ModeGrid",
    "OccupationBasis",
    "PfToySpec",
    "SolverConvergenceError",
    "SpectralConfig",
    "assemble_gsb",
    "assemble_pf_toy",
    "build_basis",
    "dispersion_grid",
    "field_operator",
    "form_factor_preset",
    "full_spectrum_small",
    "ground_eigenspace",
    "ladder_op",
    "number_operator",
    "operator_norm_diff",
    "resolvent_apply",
    "second_quantization",
    "spin_boson_preset",
]

__version__ = "0.1.0"
