"""Least common denominators of vectors, 2 x N matrices and subspaces.

For ``L > 0`` the LCD of ``V`` (``m x N``, ``m`` in {1, 2}) is the infimum of
``||theta||`` over multipliers with

    dist(V^T theta, Z^N) < L * sqrt(log_+(||V^T theta|| / L)).

The infimum ranges over an unbounded set, so every search here is confined to
``(0, search_cap]``; when nothing qualifies the estimate is ``search_cap`` and
flagged ``censored``.  A large LCD means the vector is far from any scaled
integer point, i.e. arithmetically unstructured.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ParameterError
from ..rng import derive_seed, make_rng
from .lattice import near_lattice_points

#: Presets for ``L`` used in different parts of the argument.
L_PRESETS = {
    "vector": lambda m=1, **_: math.sqrt(m),
    "sums": lambda p, **_: math.sqrt(8.0 / p),
    "matrix": lambda p, m=1, **_: math.sqrt(8.0 * m / p),
    "correlation": lambda p, **_: 4.0 / math.sqrt(p),
    "kernel": lambda eps, N, **_: math.sqrt(eps * N),
}


def L_preset(name: str, **kwargs) -> float:
    """Named choice of the LCD slack parameter ``L``."""
    try:
        return float(L_PRESETS[name](**kwargs))
    except KeyError:
        raise ParameterError(f"unknown L preset {name!r}; choose from {sorted(L_PRESETS)}") from None


@dataclass(frozen=True)
class LcdEstimate:
    value: float
    witness: np.ndarray
    witness_residual: float
    grid_step: float
    kind: str
    censored: bool = False
    L: float = float("nan")


def lattice_dist(points) -> np.ndarray:
    """Distance of each row of ``points`` to the integer lattice."""
    points = np.asarray(points, dtype=float)
    return np.linalg.norm(points - np.rint(points), axis=-1)


def log_plus(x):
    return np.log(np.maximum(x, 1.0))


def lcd_condition(points, L: float) -> np.ndarray:
    """Row-wise test ``dist(x, Z^N) < L sqrt(log_+(||x|| / L))``."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    rhs = L * np.sqrt(log_plus(np.linalg.norm(points, axis=1) / L))
    return lattice_dist(points) < rhs


def lcd_lower_bound(V) -> float:
    """``1 / (2 max_j ||V_j||)`` over the columns ``V_j`` of ``V``.

    A vector is treated as a ``1 x N`` matrix, so this is ``1/(2||v||_inf)``.
    """
    V = np.atleast_2d(np.asarray(V, dtype=float))
    col = np.linalg.norm(V, axis=0).max() if V.size else 0.0
    if col == 0:
        raise ParameterError("LCD lower bound of the zero matrix is undefined")
    return 1.0 / (2.0 * col)


def _check_common(L, search_cap, grid_step):
    if not L > 0:
        raise ParameterError("L must be positive")
    if not search_cap > 0:
        raise ParameterError("search_cap must be positive")
    if not grid_step > 0:
        raise ParameterError("grid_step must be positive")


def _bisect(cond, lo, hi, tol):
    """Shrink ``(lo, hi]`` with ``cond(hi)`` true towards the left boundary."""
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if cond(mid):
            hi = mid
        else:
            lo = mid
    return hi


def lcd_vector(v, L: float, search_cap: float | None = None, grid_step: float | None = None, *, chunk: int = 4096) -> LcdEstimate:
    """Grid search for ``D(v, L)`` with bisection refinement.

    The grid starts at the proven lower bound ``max(L/||v||, 1/(2||v||_inf))``
    and advances by ``grid_step`` (default ``1e-3 * search_cap``).  The first
    crossing is refined to ``grid_step / 1000``.  Default cap is
    ``16 sqrt(N)``.
    """
    v = np.asarray(v, dtype=float).ravel()
    nv = np.linalg.norm(v)
    if nv == 0:
        raise ParameterError("LCD of the zero vector is undefined")
    if search_cap is None:
        search_cap = 16.0 * math.sqrt(v.size)
    if grid_step is None:
        grid_step = 1e-3 * search_cap
    _check_common(L, search_cap, grid_step)

    start = max(L / nv, lcd_lower_bound(v))
    if start >= search_cap:
        return _censored_vector(v, L, start, grid_step)

    def ok(theta):
        return bool(lcd_condition(theta * v, L)[0])

    n_steps = int(math.ceil((search_cap - start) / grid_step))
    prev = start
    for c0 in range(0, n_steps, chunk):
        ks = np.arange(c0 + 1, min(c0 + chunk, n_steps) + 1)
        thetas = np.minimum(start + ks * grid_step, search_cap)
        hits = np.flatnonzero(lcd_condition(thetas[:, None] * v[None, :], L))
        if hits.size:
            i = hits[0]
            lo = thetas[i - 1] if i > 0 else prev
            theta = _bisect(ok, lo, thetas[i], grid_step / 1000.0)
            return LcdEstimate(theta, np.array([theta]), float(lattice_dist(theta * v)), grid_step, "vector", False, L)
        prev = thetas[-1]
    return _censored_vector(v, L, search_cap, grid_step)


def _censored_vector(v, L, cap, step):
    # nothing below ``cap`` qualifies; ``cap`` may exceed search_cap when the
    # proven lower bound already lies beyond it
    return LcdEstimate(float(cap), np.array([cap]), float(lattice_dist(cap * v)), step, "vector", True, L)


def lcd_matrix2(V, L: float, search_cap: float | None = None, grid_step: float | None = None) -> LcdEstimate:
    """Polar-grid search for ``D(V, L)`` of a ``2 x N`` matrix.

    Radii advance by ``grid_step`` (default ``1e-2 * search_cap``); at radius
    ``r`` the half circle is sampled so that the arc between neighbours is at
    most ``grid_step`` (``theta`` and ``-theta`` are equivalent).  Every
    successful direction on the first successful radius is refined radially
    by bisection, and the smallest refined radius is reported.
    """
    V = np.asarray(V, dtype=float)
    if V.ndim != 2 or V.shape[0] != 2:
        raise ParameterError(f"lcd_matrix2 needs a 2 x N matrix, got shape {V.shape}")
    if not np.any(V):
        raise ParameterError("LCD of the zero matrix is undefined")
    N = V.shape[1]
    if search_cap is None:
        search_cap = 16.0 * math.sqrt(N)
    if grid_step is None:
        grid_step = 1e-2 * search_cap
    _check_common(L, search_cap, grid_step)

    op = np.linalg.norm(V, 2)
    start = max(L / op, lcd_lower_bound(V))
    r = start
    while r < search_cap:
        r_next = min(r + grid_step, search_cap)
        n_ang = max(2, int(math.ceil(math.pi * r_next / grid_step)) + 1)
        phis = np.linspace(0.0, math.pi, n_ang, endpoint=False)
        dirs = np.column_stack([np.cos(phis), np.sin(phis)])
        pts = (r_next * dirs) @ V
        hits = np.flatnonzero(lcd_condition(pts, L))
        if hits.size:
            best = None
            for h in hits:
                u = dirs[h]
                rad = _bisect(lambda s: bool(lcd_condition((s * u) @ V, L)[0]), r, r_next, grid_step / 1000.0)
                if best is None or rad < best[0] - 1e-15:
                    best = (rad, rad * u)
            rad, theta = best
            return LcdEstimate(rad, theta, float(lattice_dist(theta @ V)), grid_step, "matrix2", False, L)
        r = r_next
    cap = max(search_cap, start)
    theta = np.array([cap, 0.0])
    return LcdEstimate(float(cap), theta, float(lattice_dist(theta @ V)), grid_step, "matrix2", True, L)


def _orthonormal_columns(E_basis) -> np.ndarray:
    U = np.asarray(E_basis, dtype=float)
    if U.ndim == 1:
        U = U[:, None]
    if U.size == 0 or U.shape[1] == 0:
        raise ParameterError("subspace basis is empty")
    gram = U.T @ U
    if not np.allclose(gram, np.eye(U.shape[1]), atol=1e-10, rtol=0):
        raise ParameterError("subspace basis must be orthonormal within 1e-10")
    return U


def _descend(f, c, fc, steps=(0.5, 0.25, 0.125, 0.0625, 0.03125), max_rounds=6):
    """Coordinate descent on the unit sphere of coefficient space."""
    m = c.size
    for eta in steps:
        for _ in range(max_rounds):
            improved = False
            for i in range(m):
                for sgn in (1.0, -1.0):
                    trial = c.copy()
                    trial[i] += sgn * eta
                    nrm = np.linalg.norm(trial)
                    if nrm == 0:
                        continue
                    trial /= nrm
                    ft = f(trial)
                    if ft.value < fc.value:
                        c, fc, improved = trial, ft, True
            if not improved:
                break
    return c, fc


def lcd_subspace_upper(E_basis, L: float, n_starts: int = 16, seed: int = 0, *, search_cap: float | None = None,
                       grid_step: float | None = None, lattice_starts: bool = True, refine: int = 4) -> LcdEstimate:
    """Upper estimate of ``D(E, L) = inf{D(u, L) : u unit in E}``.

    ``E_basis`` holds orthonormal basis vectors as columns.  Candidate
    directions are ``n_starts`` random unit vectors (start ``i`` drawn from
    stream ``(seed, i)``), the basis vectors themselves and, with
    ``lattice_starts``, projections onto ``E`` of short integer vectors found
    by LLL.  The ``refine`` best candidates are improved by coordinate
    descent.  Ties are broken by smaller witness norm, then lexicographically
    on the witness, so the result does not depend on evaluation order.

    The returned witness is the point ``x = D * u`` of ``E`` realizing the
    estimate.
    """
    U = _orthonormal_columns(E_basis)
    D, m = U.shape
    if search_cap is None:
        search_cap = 16.0 * math.sqrt(D)
    if grid_step is None:
        grid_step = 1e-3 * search_cap

    def f(c):
        return lcd_vector(U @ c, L, search_cap, grid_step)

    starts = []
    for i in range(n_starts):
        g = make_rng(derive_seed(seed, i)).standard_normal(m)
        starts.append(g / np.linalg.norm(g))
    starts.extend(np.eye(m))
    if lattice_starts:
        for p in near_lattice_points(U):
            c = U.T @ p
            nc = np.linalg.norm(c)
            if nc > 1e-12:
                starts.append(c / nc)

    evaluated = [(f(c), c) for c in starts]
    evaluated.sort(key=lambda t: (t[0].value, tuple(np.round(U @ t[1], 12))))
    results = []
    for est, c in evaluated[: max(refine, 0)]:
        results.append(_descend(f, c, est)[::-1])
    results.extend(evaluated[max(refine, 0):])
    best_est, best_c = min(
        results, key=lambda t: (t[0].value, tuple(np.round(t[0].value * (U @ t[1]), 12)))
    )
    x = best_est.value * (U @ best_c)
    return LcdEstimate(best_est.value, x, best_est.witness_residual, grid_step, "subspace_upper", best_est.censored, L)
