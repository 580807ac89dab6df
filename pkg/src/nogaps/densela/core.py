"""SVD-backed kernels: singular values, norms, distances, kernels, realification.

Matrices are plain numpy arrays (complex128 unless the caller passes real
data, which is promoted on demand).  All functions are pure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import NumericError, ShapeError

_EPS = np.finfo(float).eps


def as_matrix(A) -> np.ndarray:
    """Return ``A`` as a finite 2-D complex array (no copy if already one)."""
    A = np.asarray(A)
    if A.ndim != 2:
        raise ShapeError(f"expected a 2-D array, got shape {A.shape}")
    A = A.astype(np.complex128, copy=False)
    if not np.all(np.isfinite(A)):
        raise NumericError("matrix has non-finite entries")
    return A


def as_vector(z) -> np.ndarray:
    z = np.asarray(z)
    if z.ndim != 1:
        raise ShapeError(f"expected a 1-D array, got shape {z.shape}")
    return z.astype(np.complex128, copy=False)


@dataclass(frozen=True)
class SvdResult:
    """Full SVD ``A = U diag(s) V^*``.

    ``left_basis`` has the left singular vectors as columns and
    ``right_basis`` the right ones; only ``min(rows, cols)`` triples are
    retained.  ``backend_residual`` is ``max_i ||A v_i - s_i u_i||_2``.
    """

    singular_values: np.ndarray
    left_basis: np.ndarray
    right_basis: np.ndarray
    backend_residual: float


def svd(A) -> SvdResult:
    A = as_matrix(A)
    if A.size == 0:
        m, n = A.shape
        return SvdResult(np.zeros(0), np.zeros((m, 0), complex), np.zeros((n, 0), complex), 0.0)
    try:
        U, s, Vh = np.linalg.svd(A, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"SVD did not converge: {exc}") from exc
    V = Vh.conj().T
    residual = float(np.max(np.linalg.norm(A @ V - U * s, axis=0)))
    return SvdResult(s, U, V, residual)


def singular_values(A) -> np.ndarray:
    A = as_matrix(A)
    if A.size == 0:
        return np.zeros(0)
    try:
        return np.linalg.svd(A, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"SVD did not converge: {exc}") from exc


def s_min(A) -> float:
    """Smallest singular value ``min_{|x|=1} ||Ax||`` of a tall or square matrix."""
    A = as_matrix(A)
    m, n = A.shape
    if m < n:
        raise ShapeError(f"s_min needs rows >= cols, got {m}x{n}")
    if n == 0:
        raise ShapeError("s_min of a matrix with no columns is undefined")
    return float(singular_values(A)[-1])


def restricted_s_min(A, basis) -> float:
    """``min ||Ax||`` over unit ``x`` in the span of the orthonormal columns of ``basis``.

    Returns 0 when the restriction cannot be injective (more basis vectors
    than rows) and ``inf`` for an empty basis.
    """
    A = as_matrix(A)
    basis = np.asarray(basis, dtype=np.complex128)
    if basis.shape[1] == 0:
        return float("inf")
    AU = A @ basis
    if AU.shape[0] < AU.shape[1]:
        return 0.0
    return float(singular_values(AU)[-1])


def operator_norm(A) -> float:
    A = as_matrix(A)
    if A.size == 0:
        return 0.0
    return float(singular_values(A)[0])


def default_rank_tol(shape) -> float:
    return 64 * _EPS * max(shape)


def column_space_basis(H, rank_tol: float | None = None) -> np.ndarray:
    """Orthonormal basis (as columns) of the column span of ``H``."""
    H = as_matrix(H)
    if H.shape[1] == 0:
        return np.zeros((H.shape[0], 0), complex)
    res = svd(H)
    if rank_tol is None:
        rank_tol = default_rank_tol(H.shape)
    s = res.singular_values
    if s.size == 0 or s[0] == 0:
        return np.zeros((H.shape[0], 0), complex)
    rank = int(np.sum(s > rank_tol * s[0]))
    return res.left_basis[:, :rank]


def project_onto(z, basis) -> np.ndarray:
    """Orthogonal projection of ``z`` onto the span of orthonormal ``basis`` columns."""
    basis = np.asarray(basis)
    return basis @ (basis.conj().T @ z)


def dist_to_colspan(z, H) -> float:
    """Euclidean distance from ``z`` to the column span of ``H``."""
    z = as_vector(z)
    H = as_matrix(H)
    if H.shape[0] != z.shape[0]:
        raise ShapeError(f"vector of length {z.shape[0]} vs matrix with {H.shape[0]} rows")
    Q = column_space_basis(H)
    return float(np.linalg.norm(z - project_onto(z, Q)))


def kernel_basis(B, rank_tol: float | None = None) -> list[np.ndarray]:
    """Orthonormal basis of the numerical kernel of ``B``.

    A right singular vector belongs to the kernel when its singular value is
    at most ``rank_tol * s_1``.  Right singular vectors beyond ``rows`` (wide
    matrices) have singular value zero.
    """
    B = as_matrix(B)
    m, n = B.shape
    if rank_tol is None:
        rank_tol = default_rank_tol(B.shape)
    try:
        _, s, Vh = np.linalg.svd(B, full_matrices=True)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"SVD did not converge: {exc}") from exc
    s_full = np.zeros(n)
    s_full[: s.size] = s
    s1 = s_full[0] if n else 0.0
    if s1 == 0.0:
        return [Vh[i].conj() for i in range(n)]
    keep = np.flatnonzero(s_full <= rank_tol * s1)
    return [Vh[i].conj().copy() for i in keep]


def realify_vector(z) -> np.ndarray:
    """Map ``z = x + iy`` to the stacked real vector ``(x; y)``."""
    z = as_vector(z)
    return np.concatenate([z.real, z.imag])


def complexify_vector(w) -> np.ndarray:
    """Inverse of :func:`realify_vector`."""
    w = np.asarray(w, dtype=float)
    if w.ndim != 1 or w.size % 2:
        raise ShapeError("realified vectors have even length")
    half = w.size // 2
    return w[:half] + 1j * w[half:]


def realify_matrix(B) -> np.ndarray:
    """Map ``B = R + iT`` to ``[[R, -T], [T, R]]``, preserving products."""
    B = as_matrix(B)
    R, T = B.real, B.imag
    return np.block([[R, -T], [T, R]])


def realify_subspace(basis) -> np.ndarray:
    """Orthonormal real basis (columns) of ``{real(z) : z in span(basis)}``.

    For an orthonormal complex basis ``v_1..v_k`` the vectors ``real(v_j)``
    and ``real(i v_j)`` form an orthonormal basis of the realified space.
    """
    vecs = [np.asarray(v, dtype=np.complex128) for v in basis]
    if not vecs:
        return np.zeros((0, 0))
    cols = [realify_vector(v) for v in vecs] + [realify_vector(1j * v) for v in vecs]
    return np.column_stack(cols)
