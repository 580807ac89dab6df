"""Dense complex eigensolver.

Householder reduction to upper Hessenberg form, then the implicitly shifted
(single-shift, Wilkinson) QR algorithm with deflation produces a complex Schur
form ``A = Z T Z^*``.  Eigenvectors come from back substitution on the
triangular factor, i.e. one step of inverse iteration on ``T`` with the
eigenvalue itself as shift, perturbed away from exact singularity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from ..errors import NumericError, ShapeError
from .core import as_matrix, operator_norm

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class EigenResult:
    """Eigenvalues with unit eigenvectors (columns of ``vectors``).

    ``defective[i]`` is set when pair ``i`` belongs to a cluster of
    numerically equal eigenvalues whose eigenvectors are numerically
    dependent; the returned vector is then the residual-minimizing direction
    of the cluster's invariant subspace rather than one of a basis.
    """

    values: np.ndarray
    vectors: np.ndarray
    residuals: np.ndarray
    defective: np.ndarray
    norm: float

    @property
    def pairs(self) -> list[tuple[complex, np.ndarray]]:
        return [(complex(lam), self.vectors[:, i]) for i, lam in enumerate(self.values)]

    def __len__(self) -> int:
        return self.values.size


def hessenberg(A) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(H, Q)`` with ``H = Q^* A Q`` upper Hessenberg and ``Q`` unitary."""
    H = as_matrix(A).copy()
    n = H.shape[0]
    Q = np.eye(n, dtype=np.complex128)
    for k in range(n - 2):
        x = H[k + 1 :, k].copy()
        xnorm = np.linalg.norm(x)
        if xnorm == 0.0:
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        v = x
        v[0] += phase * xnorm
        v /= np.linalg.norm(v)
        H[k + 1 :, :] -= 2.0 * np.outer(v, v.conj() @ H[k + 1 :, :])
        H[:, k + 1 :] -= 2.0 * np.outer(H[:, k + 1 :] @ v, v.conj())
        Q[:, k + 1 :] -= 2.0 * np.outer(Q[:, k + 1 :] @ v, v.conj())
        H[k + 2 :, k] = 0.0
    return H, Q


@numba.njit(cache=True)
def _wilkinson_shift(a, b, c, d):
    p = 0.5 * (a - d)
    bc = b * c
    disc = np.sqrt(p * p + bc)
    den1 = p + disc
    den2 = p - disc
    den = den1 if abs(den1) >= abs(den2) else den2
    if den == 0:
        return d
    return d - bc / den


@numba.njit(cache=True)
def _schur_qr(H, Z, maxit):
    """In-place complex Schur reduction of Hessenberg ``H``; accumulates ``Z``.

    Returns ``(info, sweeps)``; ``info`` is 0 on success, otherwise the index
    of the highest row that failed to deflate.
    """
    n = H.shape[0]
    eps = 2.220446049250313e-16
    scale = 0.0
    for i in range(n):
        for j in range(n):
            scale = max(scale, abs(H[i, j]))
    if scale == 0.0:
        return 0, 0
    ihi = n - 1
    its = 0
    total = 0
    while ihi >= 0:
        # locate the active unreduced block [l, ihi]
        l = ihi
        while l > 0:
            s = abs(H[l - 1, l - 1]) + abs(H[l, l])
            if s == 0.0:
                s = scale
            if abs(H[l, l - 1]) <= eps * s:
                H[l, l - 1] = 0.0
                break
            l -= 1
        if l == ihi:
            ihi -= 1
            its = 0
            continue
        its += 1
        total += 1
        if total > maxit:
            return ihi, total
        if its % 11 == 10:
            # exceptional shift breaks cycles of the Wilkinson shift
            mu = H[ihi, ihi] + 0.75 * abs(H[ihi, ihi - 1])
        else:
            mu = _wilkinson_shift(H[ihi - 1, ihi - 1], H[ihi - 1, ihi], H[ihi, ihi - 1], H[ihi, ihi])
        x = H[l, l] - mu
        y = H[l + 1, l]
        for k in range(l, ihi):
            if k > l:
                x = H[k, k - 1]
                y = H[k + 1, k - 1]
            ax = abs(x)
            rho = np.sqrt(ax * ax + abs(y) ** 2)
            if rho == 0.0:
                continue
            if ax == 0.0:
                c = 0.0
                s = 1.0 + 0.0j
            else:
                c = ax / rho
                s = (x / ax) * np.conj(y) / rho
            j0 = k - 1 if k > l else l
            for j in range(j0, n):
                h1 = H[k, j]
                h2 = H[k + 1, j]
                H[k, j] = c * h1 + s * h2
                H[k + 1, j] = -np.conj(s) * h1 + c * h2
            if k > l:
                H[k + 1, k - 1] = 0.0
            i1 = min(k + 2, ihi)
            for i in range(0, i1 + 1):
                h1 = H[i, k]
                h2 = H[i, k + 1]
                H[i, k] = c * h1 + np.conj(s) * h2
                H[i, k + 1] = -s * h1 + c * h2
            for i in range(n):
                z1 = Z[i, k]
                z2 = Z[i, k + 1]
                Z[i, k] = c * z1 + np.conj(s) * z2
                Z[i, k + 1] = -s * z1 + c * z2
    return 0, total


@numba.njit(cache=True)
def _triangular_eigvecs(T, smallnum):
    """Eigenvectors of upper triangular ``T`` by back substitution."""
    n = T.shape[0]
    Y = np.zeros((n, n), dtype=np.complex128)
    big = 1e150
    for k in range(n):
        lam = T[k, k]
        Y[k, k] = 1.0
        for i in range(k - 1, -1, -1):
            acc = T[i, k]
            for j in range(i + 1, k):
                acc += T[i, j] * Y[j, k]
            den = T[i, i] - lam
            if abs(den) < smallnum:
                den = smallnum
            Y[i, k] = -acc / den
            if abs(Y[i, k]) > big:
                for j in range(i, k + 1):
                    Y[j, k] /= big
        nrm = 0.0
        for j in range(k + 1):
            nrm += abs(Y[j, k]) ** 2
        nrm = np.sqrt(nrm)
        for j in range(k + 1):
            Y[j, k] /= nrm
    return Y


def schur(A, maxit_per_eig: int = 30) -> tuple[np.ndarray, np.ndarray]:
    """Complex Schur form ``A = Z T Z^*`` with ``T`` upper triangular."""
    A = as_matrix(A)
    n, m = A.shape
    if n != m:
        raise ShapeError(f"eigenproblem needs a square matrix, got {n}x{m}")
    H, Z = hessenberg(A)
    H = np.ascontiguousarray(H)
    Z = np.ascontiguousarray(Z)
    info, _ = _schur_qr(H, Z, maxit_per_eig * max(n, 1))
    if info:
        partial = np.diag(H)[info + 1 :].copy()
        resid = float(np.abs(np.diag(H, -1)).max()) if n > 1 else 0.0
        raise NumericError(
            f"QR iteration failed to deflate row {info}", residual=resid, partial=partial
        )
    return np.triu(H), Z


def _defective_flags(values, vectors, cluster_tol):
    n = values.size
    flags = np.zeros(n, dtype=bool)
    seen = np.zeros(n, dtype=bool)
    for i in range(n):
        if seen[i]:
            continue
        members = np.flatnonzero(np.abs(values - values[i]) <= cluster_tol)
        seen[members] = True
        if members.size < 2:
            continue
        s = np.linalg.svd(vectors[:, members], compute_uv=False)
        if s[-1] < np.sqrt(_EPS):
            flags[members] = True
    return flags


def eigenpairs(A, tol: float = 1e-8) -> EigenResult:
    """All eigenvalues of square ``A`` with unit eigenvectors.

    Parameters
    ----------
    A : array_like, shape (n, n)
    tol : float
        Relative residual tolerance; pairs with
        ``||A v - lam v|| > tol * ||A||`` raise :class:`NumericError`.

    Raises
    ------
    ShapeError
        If ``A`` is not square.
    NumericError
        If the QR iteration does not converge or a residual exceeds ``tol``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    A = as_matrix(A)
    n = A.shape[0]
    if A.shape[1] != n:
        raise ShapeError(f"eigenproblem needs a square matrix, got {A.shape}")
    if n == 0:
        empty = np.zeros(0)
        return EigenResult(empty.astype(complex), np.zeros((0, 0), complex), empty, empty.astype(bool), 0.0)
    T, Z = schur(A)
    norm = operator_norm(A)
    smallnum = max(norm, 1.0) * _EPS
    Y = _triangular_eigvecs(np.ascontiguousarray(T), smallnum)
    V = Z @ Y
    V /= np.linalg.norm(V, axis=0)
    values = np.diag(T).copy()
    residuals = np.linalg.norm(A @ V - V * values, axis=0)
    defective = _defective_flags(values, V, cluster_tol=np.sqrt(_EPS) * max(norm, 1.0))
    bad = residuals > tol * max(norm, np.finfo(float).tiny)
    if norm > 0 and np.any(bad):
        raise NumericError(
            f"{int(bad.sum())} eigenpairs exceed the residual tolerance",
            residual=float(residuals.max()),
            partial=values,
        )
    return EigenResult(values, V, residuals, defective, norm)
