"""Floating-point LLL reduction, used to seed LCD searches with lattice
points that lie close to a subspace."""

import numba
import numpy as np


@numba.njit(cache=True)
def _gs_row(B, Bs, mu, bb, k):
    d = B.shape[1]
    for t in range(d):
        Bs[k, t] = B[k, t]
    for j in range(k):
        if bb[j] == 0.0:
            mu[k, j] = 0.0
            continue
        dot = 0.0
        for t in range(d):
            dot += B[k, t] * Bs[j, t]
        mu[k, j] = dot / bb[j]
        for t in range(d):
            Bs[k, t] -= mu[k, j] * Bs[j, t]
    s = 0.0
    for t in range(d):
        s += Bs[k, t] * Bs[k, t]
    bb[k] = s
    mu[k, k] = 1.0


@numba.njit(cache=True)
def _lll(B, delta, max_iter):
    n, d = B.shape
    Bs = np.zeros((n, d))
    mu = np.zeros((n, n))
    bb = np.zeros(n)
    for i in range(n):
        _gs_row(B, Bs, mu, bb, i)
    k = 1
    it = 0
    while k < n and it < max_iter:
        it += 1
        for j in range(k - 1, -1, -1):
            q = np.round(mu[k, j])
            if q != 0.0:
                for t in range(d):
                    B[k, t] -= q * B[j, t]
                for i in range(j + 1):
                    mu[k, i] -= q * mu[j, i]
        _gs_row(B, Bs, mu, bb, k)
        if bb[k] >= (delta - mu[k, k - 1] ** 2) * bb[k - 1]:
            k += 1
        else:
            for t in range(d):
                tmp = B[k, t]
                B[k, t] = B[k - 1, t]
                B[k - 1, t] = tmp
            _gs_row(B, Bs, mu, bb, k - 1)
            _gs_row(B, Bs, mu, bb, k)
            k = max(k - 1, 1)
    return it


def lll_reduce(basis, delta: float = 0.99, max_iter: int = 200_000) -> np.ndarray:
    """LLL-reduce the rows of ``basis`` (a copy is returned)."""
    B = np.array(basis, dtype=float, copy=True)
    if B.shape[0] > 1:
        _lll(B, delta, max_iter)
    return B


def near_lattice_points(U, weights=(4.0, 16.0, 64.0), per_weight: int = 8) -> list[np.ndarray]:
    """Integer vectors that are short and nearly inside ``span(U)``.

    ``U`` has orthonormal columns in ``R^D``.  For each weight ``w`` the
    lattice ``{(w P_perp p, p) : p in Z^D}`` is LLL-reduced; its short
    vectors have small norm and small distance to the subspace.
    """
    U = np.asarray(U, dtype=float)
    D = U.shape[0]
    P_perp = np.eye(D) - U @ U.T
    found = []
    seen = set()
    for w in weights:
        basis = np.hstack([w * P_perp.T, np.eye(D)])
        red = lll_reduce(basis)
        norms = np.linalg.norm(red, axis=1)
        for row in red[np.argsort(norms)][:per_weight]:
            p = np.round(row[D:])
            if not np.any(p):
                continue
            if p[np.flatnonzero(p)[0]] < 0:
                p = -p
            key = tuple(p.astype(np.int64))
            if key not in seen:
                seen.add(key)
                found.append(p)
    return found
