"""Dense complex linear algebra and the complex-to-real maps."""

from .core import (
    SvdResult,
    as_matrix,
    as_vector,
    column_space_basis,
    complexify_vector,
    default_rank_tol,
    dist_to_colspan,
    kernel_basis,
    operator_norm,
    project_onto,
    realify_matrix,
    realify_subspace,
    realify_vector,
    restricted_s_min,
    s_min,
    singular_values,
    svd,
)
from .eigen import EigenResult, eigenpairs, hessenberg, schur

__all__ = [
    "EigenResult",
    "SvdResult",
    "as_matrix",
    "as_vector",
    "column_space_basis",
    "complexify_vector",
    "default_rank_tol",
    "dist_to_colspan",
    "eigenpairs",
    "hessenberg",
    "kernel_basis",
    "operator_norm",
    "project_onto",
    "realify_matrix",
    "realify_subspace",
    "realify_vector",
    "restricted_s_min",
    "s_min",
    "schur",
    "singular_values",
    "svd",
]
