"""Deterministic audits of the linear-algebra steps behind delocalization.

Every statement checked here holds for each individual matrix, so a single
failure indicates a bug (or a tolerance problem) rather than bad luck.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..densela import as_matrix, dist_to_colspan, eigenpairs, operator_norm, restricted_s_min, s_min, singular_values
from ..errors import NumericError, ParameterError, ShapeError, SingularityError
from .functionals import localization_norm, set_size, smallest_coords
from .nets import disc_net


# ---------------------------------------------------------------------------
# reduction of delocalization to invertibility


@dataclass(frozen=True)
class ReductionAudit:
    """Result of :func:`reduction_audit`.

    ``verdict`` is ``"certified"`` (every localized eigenvector yields a
    witness), ``"violated"``, ``"not_applicable"`` (no localized eigenvector)
    or ``"skipped_unbounded"`` (``||A|| > M sqrt(n)``).  The witness fields
    describe the localized eigenvector with the largest ratio
    ``s_min / bound``.
    """

    verdict: str
    bounded: bool
    n_localized: int
    eigen_index: int | None = None
    eigenvalue: complex | None = None
    subset: np.ndarray | None = None
    lambda0: complex | None = None
    s_min: float = math.nan
    bound: float = math.nan

    @property
    def holds(self) -> bool:
        return self.verdict != "violated"


def reduction_audit(A, eps: float, delta: float, M: float, tol: float = 1e-8) -> ReductionAudit:
    """Check the deterministic core of the reduction to invertibility.

    If ``||A|| <= M sqrt(n)`` and an eigenvector ``v`` (eigenvalue ``lam``)
    has ``||v_I|| < delta`` on its ``ceil(eps n)`` smallest coordinates
    ``I``, then for the centre ``lam0`` of :func:`disc_net` nearest to
    ``lam``

        s_min((A - lam0)_{I^c}) <= 8 M delta sqrt(n),

    where ``(.)_{I^c}`` keeps the columns outside ``I``.  The argument uses
    ``||v_{I^c}|| >= 1/2``, hence ``delta <= 1/2``.
    """
    A = as_matrix(A)
    n = A.shape[0]
    if A.shape[1] != n:
        raise ShapeError(f"reduction audit needs a square matrix, got {A.shape}")
    if not 0 < delta <= 0.5:
        raise ParameterError("delta must lie in (0, 1/2]")
    k = set_size(eps, n)
    if not 1 <= k < n:
        raise ParameterError(f"ceil(eps*n) = {k} must lie in [1, n-1]")
    bounded = operator_norm(A) <= M * math.sqrt(n)
    if not bounded:
        return ReductionAudit("skipped_unbounded", False, 0)
    eig = eigenpairs(A, tol=tol)
    net = disc_net(M, n, delta)
    bound = 8.0 * M * delta * math.sqrt(n)
    worst = None
    n_loc = 0
    for i in range(len(eig)):
        v = eig.vectors[:, i]
        if localization_norm(v, eps) >= delta:
            continue
        n_loc += 1
        I = smallest_coords(v, k)
        keep = np.setdiff1d(np.arange(n), I)
        lam0 = net.nearest(eig.values[i])
        s = s_min((A - lam0 * np.eye(n))[:, keep])
        if worst is None or s / bound > worst[0]:
            worst = (s / bound, i, I, lam0, s)
    if worst is None:
        return ReductionAudit("not_applicable", True, 0, bound=bound)
    _, i, I, lam0, s = worst
    verdict = "certified" if s <= bound * (1 + 1e-10) else "violated"
    return ReductionAudit(verdict, True, n_loc, i, complex(eig.values[i]), I, lam0, float(s), bound)


# ---------------------------------------------------------------------------
# negative second moment


@dataclass(frozen=True)
class SecondMomentAudit:
    lhs: float
    rhs: float
    gap: float


def _check_full_rank(B):
    m, n = B.shape
    if m < n:
        raise ShapeError(f"need a tall or square matrix, got {m}x{n}")
    s = singular_values(B)
    if n == 0 or s[-1] <= 64 * np.finfo(float).eps * max(m, n) * s[0]:
        raise SingularityError("matrix is numerically rank deficient", residual=float(s[-1]) if n else 0.0)
    return s


def _column_distances(B) -> np.ndarray:
    n = B.shape[1]
    return np.array([dist_to_colspan(B[:, j], np.delete(B, j, axis=1)) for j in range(n)])


def neg_second_moment_audit(B) -> SecondMomentAudit:
    """Both sides of ``sum_j s_j(B)^-2 = sum_j dist(B_j, H_j)^-2``.

    ``H_j`` is the span of the columns other than ``B_j``.  The two sides are
    computed independently (singular values vs. column projections) and
    ``gap`` is their relative difference.

    Raises
    ------
    SingularityError
        If ``B`` does not have numerically full column rank.
    """
    B = as_matrix(B)
    s = _check_full_rank(B)
    lhs = float(np.sum(s ** -2.0))
    dists = _column_distances(B)
    if np.any(dists == 0):
        raise SingularityError("a column lies in the span of the others")
    rhs = float(np.sum(dists ** -2.0))
    return SecondMomentAudit(lhs, rhs, abs(lhs - rhs) / lhs)


@dataclass(frozen=True)
class RowDeletionAudit:
    full: np.ndarray
    deleted: np.ndarray
    violations: int


def row_deletion_audit(B, rtol: float = 1e-10) -> RowDeletionAudit:
    """Compare ``dist(B_j, H_j)`` with ``dist(B'_j, H'_j)``, where primes mark
    deletion of row ``j`` from every column.

    Dropping a coordinate cannot increase a distance to a subspace spanned by
    the correspondingly truncated vectors, so ``full >= deleted`` entrywise.
    Only ``j < rows`` are considered.
    """
    B = as_matrix(B)
    m, n = B.shape
    if m < 2:
        raise ShapeError("need at least two rows")
    full = _column_distances(B)
    deleted = np.empty(min(m, n))
    for j in range(deleted.size):
        Bp = np.delete(B, j, axis=0)
        deleted[j] = dist_to_colspan(Bp[:, j], np.delete(Bp, j, axis=1))
    full = full[: deleted.size]
    scale = max(float(np.abs(B).max()), 1.0)
    violations = int(np.sum(deleted > full + rtol * scale))
    return RowDeletionAudit(full, deleted, violations)


# ---------------------------------------------------------------------------
# spectral split and the decomposition lemma


@dataclass(frozen=True)
class SplitResult:
    """Right singular subspaces of ``B`` below (``minus``) and above (``plus``)
    the threshold; bases are columns."""

    minus_basis: np.ndarray
    plus_basis: np.ndarray
    threshold: float
    minus_dim: int

    @property
    def plus_dim(self) -> int:
        return self.plus_basis.shape[1]


def _full_right_svd(B):
    m, n = B.shape
    try:
        _, s, Vh = np.linalg.svd(B, full_matrices=True)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"SVD did not converge: {exc}") from exc
    s_full = np.zeros(n)
    s_full[: s.size] = s
    return s_full, Vh.conj().T


def split_spectral_subspaces(B, threshold: float) -> SplitResult:
    """Split ``C^n`` by the right singular vectors of ``B`` (``m x n``).

    Singular values at most ``threshold`` (including the zero values of a wide
    ``B``) go to ``E^-``; the rest span ``E^+``, on which
    ``||B x|| > threshold ||x||``.
    """
    if not threshold > 0:
        raise ParameterError("threshold must be positive")
    B = as_matrix(B)
    s, V = _full_right_svd(B)
    minus = s <= threshold
    return SplitResult(V[:, minus], V[:, ~minus], float(threshold), int(minus.sum()))


def plus_lower_bound_violations(B, split: SplitResult, n_samples: int = 100, seed: int = 0, atol: float = 1e-10) -> int:
    """Random unit ``x`` in ``E^+`` with ``||Bx|| < threshold - atol``."""
    B = as_matrix(B)
    k = split.plus_dim
    if k == 0:
        return 0
    rng = np.random.default_rng(seed)
    c = rng.standard_normal((k, n_samples)) + 1j * rng.standard_normal((k, n_samples))
    X = split.plus_basis @ c
    X /= np.linalg.norm(X, axis=0)
    return int(np.sum(np.linalg.norm(B @ X, axis=0) < split.threshold - atol))


@dataclass(frozen=True)
class DecompositionAudit:
    s_A: float
    s_B_on_plus: float
    s_G_on_minus: float
    bound: float
    holds: bool


def interior_threshold(B) -> float:
    """Midpoint of the widest gap between distinct padded singular values of ``B``."""
    s, _ = _full_right_svd(as_matrix(B))
    gaps = s[:-1] - s[1:]
    if s.size < 2 or gaps.max() <= 0:
        raise ParameterError("B has a single distinct singular value; no interior threshold exists")
    i = int(np.argmax(gaps))
    return float(0.5 * (s[i] + s[i + 1]))


def decomposition_bound_audit(A, split_row: int, threshold: float | None = None, rtol: float = 1e-10) -> DecompositionAudit:
    """Check ``s_min(A) >= s_B s_G / (4 ||A||)``.

    ``A`` is split into rows ``B = A[:split_row]`` and ``G = A[split_row:]``;
    ``s_B`` is the smallest singular value of ``B`` on ``E^+`` and ``s_G`` that
    of ``G`` on ``E^-`` for the split of :func:`split_spectral_subspaces` at
    ``threshold`` (default :func:`interior_threshold`).  Both subspaces must be
    non-trivial.
    """
    A = as_matrix(A)
    m, n = A.shape
    if m < n:
        raise ShapeError(f"need a tall or square matrix, got {m}x{n}")
    if not 1 <= split_row < m:
        raise ParameterError(f"split_row must lie in [1, {m - 1}]")
    B, G = A[:split_row], A[split_row:]
    if threshold is None:
        threshold = interior_threshold(B)
    split = split_spectral_subspaces(B, threshold)
    if split.minus_dim == 0 or split.plus_dim == 0:
        raise ParameterError("threshold leaves E^- or E^+ empty; choose an interior threshold")
    s_A = s_min(A)
    s_B = restricted_s_min(B, split.plus_basis)
    s_G = restricted_s_min(G, split.minus_basis)
    norm = operator_norm(A)
    bound = s_B * s_G / (4.0 * norm) if norm > 0 else 0.0
    return DecompositionAudit(s_A, s_B, s_G, bound, bool(s_A >= bound * (1 - rtol)))
