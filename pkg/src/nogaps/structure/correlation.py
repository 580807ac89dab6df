"""Small coordinates, real-imaginary correlation and compressibility."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from ..errors import BudgetError, NormalizationError, ParameterError

EXACT_BUDGET = 10**6


def _as_cvec(z):
    return np.asarray(z, dtype=np.complex128).ravel()


def small_count(N: int, delta: float) -> int:
    """``floor(delta * N)``, the number of large coordinates set aside."""
    return int(math.floor(delta * N + 1e-12))


def sm_set(z, delta: float) -> np.ndarray:
    """Indices of all but the ``floor(delta N)`` largest ``|z_j|`` (0-based).

    Ties are broken towards lower indices: among equal moduli the
    lower-index coordinate counts as larger.  The result is sorted.
    """
    z = _as_cvec(z)
    N = z.size
    if not 0 < delta < 1:
        raise ParameterError("delta must lie in (0, 1)")
    k = small_count(N, delta)
    if k < 1 or k >= N:
        raise ParameterError(f"floor(delta*N) = {k} must lie in [1, N-1] for N = {N}")
    order = np.lexsort((np.arange(N), -np.abs(z)))
    return np.sort(order[k:])


def real_imag_matrix(z) -> np.ndarray:
    """The ``2 x N`` real matrix with rows ``Re z`` and ``Im z``."""
    z = _as_cvec(z)
    return np.vstack([z.real, z.imag])


def gram_det_sqrt(V) -> float:
    """``det(V V^T)^{1/2}`` for a ``2 x k`` real matrix."""
    G = V @ V.T
    det = G[0, 0] * G[1, 1] - G[0, 1] * G[1, 0]
    return math.sqrt(max(det, 0.0))


@dataclass(frozen=True)
class CorrelationResult:
    d_value: float
    witness_subset: np.ndarray
    method: str
    small_set: np.ndarray


def _greedy_subset(V, candidates, size):
    """D-optimal growth: best pair first, then the column maximizing the
    updated Gram determinant."""
    cols = V[:, candidates]
    # pair determinants det([x_i x_j; y_i y_j])^2
    pd = np.square(np.outer(cols[0], cols[1]) - np.outer(cols[1], cols[0]))
    np.fill_diagonal(pd, -1.0)
    i, j = np.unravel_index(int(np.argmax(pd)), pd.shape)
    chosen = [min(i, j), max(i, j)]
    G = cols[:, chosen] @ cols[:, chosen].T
    remaining = [c for c in range(len(candidates)) if c not in chosen]
    while len(chosen) < size:
        best, best_det = None, -1.0
        for c in remaining:
            Gc = G + np.outer(cols[:, c], cols[:, c])
            det = Gc[0, 0] * Gc[1, 1] - Gc[0, 1] ** 2
            if det > best_det + 1e-300:
                best, best_det = c, det
        chosen.append(best)
        remaining.remove(best)
        G = G + np.outer(cols[:, best], cols[:, best])
    return np.sort(np.asarray(candidates)[chosen])


def rc_correlation(z, delta: float, mode: str = "exact") -> CorrelationResult:
    """``d(z) = max det(V_J V_J^T)^{1/2}`` over ``J`` in ``sm(z)`` with
    ``|J| = floor(delta N)``, where ``V`` stacks ``Re z`` over ``Im z``.

    ``mode="exact"`` enumerates every subset (budget ``10**6``);
    ``mode="greedy"`` grows the subset D-optimally and gives a lower value.
    """
    z = _as_cvec(z)
    small = sm_set(z, delta)
    k = small_count(z.size, delta)
    if k < 2:
        raise ParameterError("floor(delta*N) must be at least 2 for a 2 x |J| Gram determinant")
    if small.size < k:
        raise ParameterError(f"sm(z) has {small.size} indices, fewer than floor(delta*N) = {k}; need delta <= 1/2")
    V = real_imag_matrix(z)
    if mode == "exact":
        if math.comb(small.size, k) > EXACT_BUDGET:
            raise BudgetError(
                f"C({small.size}, {k}) subsets exceed the exact budget {EXACT_BUDGET}; use mode='greedy'"
            )
        best, best_J = -1.0, None
        for J in itertools.combinations(small.tolist(), k):
            val = gram_det_sqrt(V[:, J])
            if val > best:
                best, best_J = val, J
        J = np.asarray(best_J)
    elif mode == "greedy":
        J = _greedy_subset(V, small, k)
    else:
        raise ParameterError(f"unknown mode {mode!r}")
    return CorrelationResult(gram_det_sqrt(V[:, J]), J, mode, small)


@dataclass(frozen=True)
class CauchyBinetAudit:
    lhs: float
    rhs: float
    holds: bool
    rhs_printed_count: float


def cauchy_binet_audit(z, delta: float, rtol: float = 1e-12) -> CauchyBinetAudit:
    """Averaging check behind the real-imaginary correlation bound.

    With ``I = sm(z)``, ``N0 = |I|`` and ``k = floor(delta N)``, the
    Cauchy-Binet expansion of ``det(V_J V_J^T)`` summed over all ``k``-subsets
    ``J`` of ``I`` counts every pair of columns ``C(N0-2, k-2)`` times, so

        lhs = C(N0, k) d(z)^2  >=  C(N0-2, k-2) det(V_I V_I^T) = rhs.

    ``rhs_printed_count`` uses ``C(N0, k-2)`` in place of ``C(N0-2, k-2)``;
    the two agree for ``k = 2`` but the former overcounts for ``k >= 3`` and
    the inequality can then fail, so ``holds`` refers to ``rhs``.
    """
    z = _as_cvec(z)
    res = rc_correlation(z, delta, "exact")
    k = small_count(z.size, delta)
    I = res.small_set
    n0 = I.size
    det_I = gram_det_sqrt(real_imag_matrix(z)[:, I]) ** 2
    lhs = math.comb(n0, k) * res.d_value**2
    rhs = math.comb(n0 - 2, k - 2) * det_I
    printed = math.comb(n0, k - 2) * det_I
    return CauchyBinetAudit(lhs, rhs, bool(lhs >= rhs * (1 - rtol)), printed)


def compress_class(z, c0: float, c1: float) -> tuple[str, float]:
    """Classify a unit vector as compressible or incompressible.

    The nearest ``floor(c0 N)``-sparse vector to ``z`` is its truncation to
    the largest coordinates, so the distance to the sparse set is the norm of
    the remaining coordinates.
    """
    z = _as_cvec(z)
    if abs(np.linalg.norm(z) - 1.0) > 1e-10:
        raise NormalizationError(f"expected a unit vector, got norm {np.linalg.norm(z)!r}")
    if not (0 < c0 < 1 and 0 < c1 < 1):
        raise ParameterError("c0 and c1 must lie in (0, 1)")
    s = small_count(z.size, c0)
    mags = np.sort(np.abs(z))[::-1]
    dist = float(np.linalg.norm(mags[s:]))
    return ("compressible" if dist <= c1 else "incompressible"), dist
