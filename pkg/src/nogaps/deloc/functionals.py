"""Localization functionals of unit vectors and eigenvector profiles."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..densela import eigenpairs
from ..errors import NormalizationError, ParameterError


def set_size(eps: float, n: int) -> int:
    """``ceil(eps * n)``, ignoring floating-point noise below ``1e-9``."""
    return int(math.ceil(eps * n - 1e-9))


def smallest_coords(v, k: int) -> np.ndarray:
    """Indices of the ``k`` smallest-modulus coordinates, ties to lower index."""
    mags = np.abs(np.asarray(v))
    order = np.lexsort((np.arange(mags.size), mags))
    return np.sort(order[:k])


def localization_norm(v, eps: float) -> float:
    """``min ||v_I||_2`` over index sets with ``|I| >= ceil(eps n)``.

    The minimum is attained by the ``ceil(eps n)`` smallest coordinates, so
    this is the Euclidean norm of those coordinates.

    Raises
    ------
    NormalizationError
        If ``||v||_2`` differs from 1 by more than ``1e-10``.
    """
    v = np.asarray(v, dtype=np.complex128).ravel()
    n = v.size
    if abs(np.linalg.norm(v) - 1.0) > 1e-10:
        raise NormalizationError(f"expected a unit vector, got norm {np.linalg.norm(v)!r}")
    k = set_size(eps, n)
    if not 1 <= k <= n:
        raise ParameterError(f"ceil(eps*n) = {k} must lie in [1, {n}]")
    mags = np.sort(np.abs(v))
    return float(np.sqrt(np.sum(mags[:k] ** 2)))


@dataclass(frozen=True)
class DelocReport:
    """Localization profile of one eigenvector.

    ``localization_curve`` lists ``(eps, localization_norm(v, eps))`` pairs.
    """

    eigen_index: int
    eigenvalue: complex
    localization_curve: tuple
    sup_norm: float
    residual: float

    def min_mass(self, eps: float) -> float:
        for e, m in self.localization_curve:
            if math.isclose(e, eps, rel_tol=1e-12, abs_tol=1e-15):
                return m
        raise ParameterError(f"eps = {eps} is not on the recorded localization curve")


def deloc_report(v, eps_grid: Sequence[float], *, eigen_index: int = 0, eigenvalue: complex = 0j,
                 residual: float = 0.0) -> DelocReport:
    """Profile of a single unit vector over ``eps_grid``."""
    v = np.asarray(v, dtype=np.complex128).ravel()
    curve = tuple((float(e), localization_norm(v, e)) for e in sorted(eps_grid))
    return DelocReport(eigen_index, complex(eigenvalue), curve, float(np.abs(v).max()), float(residual))


def deloc_profile(A, eps_grid: Sequence[float], tol: float = 1e-8) -> list[DelocReport]:
    """Profiles of every eigenvector of square ``A``."""
    eig = eigenpairs(A, tol=tol)
    return [
        deloc_report(eig.vectors[:, i], eps_grid, eigen_index=i, eigenvalue=eig.values[i],
                     residual=eig.residuals[i])
        for i in range(len(eig))
    ]


def loc_event(reports: Sequence[DelocReport], eps: float, delta: float) -> bool:
    """Whether some eigenvector has ``localization_norm(v, eps) < delta``."""
    if not reports:
        raise ParameterError("loc_event needs at least one report")
    return any(r.min_mass(eps) < delta for r in reports)
