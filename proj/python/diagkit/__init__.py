"""Idempotent operators with prescribed diagonals."""

from ._diagkit import *  # noqa: F401,F403
from ._diagkit import (
    DomainError,
    Error,
    InfeasibleError,
    PreconditionError,
    ShapeError,
    SpecificationError,
)

__all__ = [
    "DomainError",
    "Error",
    "InfeasibleError",
    "PreconditionError",
    "ShapeError",
    "SpecificationError",
    "canonical_decomposition",
    "canonical_dual",
    "cross_gramian",
    "extract_frames",
    "fan_pair",
    "herm_part_spectrum_2x2",
    "idem_2x2_diag",
    "idem_bounded_diag",
    "idem_constant_diag",
    "idem_finite_rank",
    "idem_infinite_multiplicity",
    "idem_matrix_exact",
    "idem_rank_one",
    "kadison_feasibility",
    "projection_with_diagonal",
    "rotation_diagonal",
    "run_cli",
    "trace_shape",
    "zero_diagonal_basis",
    "zero_diagonalizable",
]
