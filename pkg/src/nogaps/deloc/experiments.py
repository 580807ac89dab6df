"""Seeded Monte Carlo drivers producing :class:`~nogaps.trials.TrialRecord` lists.

Each driver is a thin wrapper around a per-trial function of a single seed,
so the harness can run the same trials in a process pool.
"""

from __future__ import annotations

import functools
import math
from typing import Sequence

import numpy as np

from ..densela import (dist_to_colspan, eigenpairs, kernel_basis, operator_norm, realify_matrix,
                       realify_subspace, realify_vector, s_min)
from ..ensembles import EnsembleSpec, norm_ratio, sample_matrix
from ..errors import ParameterError
from ..rng import derive_seed, make_rng
from ..structure import L_preset, lcd_lower_bound, lcd_matrix2, lcd_subspace_upper, lcd_vector
from ..trials import TrialRecord, run_trials
from .audits import (decomposition_bound_audit, neg_second_moment_audit, reduction_audit, row_deletion_audit)
from .functionals import localization_norm, set_size


def eps_key(name: str, eps: float) -> str:
    return f"{name}@{eps:g}"


# ---------------------------------------------------------------------------
# eigenvector localization profiles


def deloc_trial(seed: int, spec: EnsembleSpec, eps_grid: tuple, eps: float, delta: float) -> tuple[dict, dict]:
    A = sample_matrix(spec, seed)
    eig = eigenpairs(A)
    norms = np.array([[localization_norm(eig.vectors[:, i], e) for e in eps_grid] for i in range(len(eig))])
    metrics = {eps_key("min_loc_norm", e): float(norms[:, j].min()) for j, e in enumerate(eps_grid)}
    at_eps = min(localization_norm(eig.vectors[:, i], eps) for i in range(len(eig)))
    metrics["min_loc_norm"] = at_eps
    metrics["max_sup_norm"] = float(np.abs(eig.vectors).max())
    metrics["max_residual"] = float(eig.residuals.max())
    metrics["norm_ratio"] = norm_ratio(A)
    bounded = metrics["norm_ratio"] <= spec.norm_bound_M
    loc = at_eps < delta
    flags = {"bounded": bounded, "loc": loc, "loc_and_bounded": loc and bounded,
             "defective": bool(eig.defective.any())}
    return metrics, flags


def deloc_experiment(spec: EnsembleSpec, eps: float, delta: float, trials: int, seed: int, *,
                     eps_grid: Sequence[float] = (), workers: int = 1, on_record=None) -> list[TrialRecord]:
    """Localization profile of the full spectrum for ``trials`` sampled matrices.

    Per trial: ``min_loc_norm`` is the smallest ``localization_norm(v, eps)``
    over all unit eigenvectors, ``loc`` flags ``Loc(A, eps, delta)`` and
    ``bounded`` flags ``||A|| <= M sqrt(n)``.
    """
    if spec.n_rows != spec.n_cols:
        raise ParameterError("eigenvector profiles need a square ensemble")
    grid = tuple(sorted(set(float(e) for e in eps_grid) | {float(eps)}))
    fn = functools.partial(deloc_trial, spec=spec, eps_grid=grid, eps=float(eps), delta=float(delta))
    return run_trials(fn, trials, seed, workers=workers, on_record=on_record)


# ---------------------------------------------------------------------------
# smallest singular value of a column-deleted shifted matrix


def smin_trial(seed: int, spec: EnsembleSpec, eps: float, lam0: complex) -> tuple[dict, dict]:
    A = sample_matrix(spec, seed)
    n = A.shape[0]
    k = set_size(eps, n)
    Ac = (A - lam0 * np.eye(n))[:, : n - k]
    s = s_min(Ac)
    ratio = norm_ratio(A)
    return {"smin_scaled": s / math.sqrt(n), "norm_ratio": ratio}, {"bounded": ratio <= spec.norm_bound_M}


def smin_experiment(spec: EnsembleSpec, eps: float, lam0: complex, trials: int, seed: int, *,
                    workers: int = 1, on_record=None) -> list[TrialRecord]:
    """``s_min((A - lam0)_{I^c}) / sqrt(n)`` with ``I`` the last ``ceil(eps n)`` columns.

    Records the metric ``smin_scaled`` and the flag ``bounded``
    (``||A|| <= M sqrt(n)``).
    """
    if spec.n_rows != spec.n_cols:
        raise ParameterError("smin experiment needs a square ensemble")
    k = set_size(eps, spec.n_cols)
    if not 1 <= k < spec.n_cols:
        raise ParameterError(f"ceil(eps*n) = {k} must lie in [1, n-1]")
    fn = functools.partial(smin_trial, spec=spec, eps=float(eps), lam0=complex(lam0))
    return run_trials(fn, trials, seed, workers=workers, on_record=on_record)


# ---------------------------------------------------------------------------
# distance from a random vector to a random subspace


def distance_trial(seed: int, spec: EnsembleSpec, eps: float, z_dist) -> tuple[dict, dict]:
    N = spec.n_rows
    n = N - set_size(eps, N)
    H = sample_matrix(spec.with_shape(N, n), derive_seed(seed, 0)) if n > 0 else np.zeros((N, 0), complex)
    Z = np.asarray(z_dist.sample(make_rng(derive_seed(seed, 1)), N), dtype=np.complex128)
    d = dist_to_colspan(Z, H) if n > 0 else float(np.linalg.norm(Z))
    scale = math.sqrt(eps * N)
    bounded = True if n == 0 else operator_norm(H) <= spec.norm_bound_M * math.sqrt(N)
    return {"dist_scaled": d / scale, "dist": d}, {"bounded": bounded}


def distance_experiment(spec: EnsembleSpec, eps: float, trials: int, seed: int, *, z_dist=None,
                        workers: int = 1, on_record=None) -> list[TrialRecord]:
    """``dist(Z, Im H) / sqrt(eps N)`` for ``H`` of size ``N x (N - ceil(eps N))``.

    ``spec.n_rows`` gives ``N``; the columns of ``H`` follow ``spec`` and ``Z``
    has i.i.d. coordinates from ``z_dist`` (default ``spec.entry_dist``).  The
    boundedness flag uses ``||H|| <= M sqrt(N)``.  Empirical tail curves over
    a grid of ``tau`` come from :func:`nogaps.harness.summarize`.
    """
    if not 0 < eps <= 1:
        raise ParameterError("eps must lie in (0, 1]")
    fn = functools.partial(distance_trial, spec=spec, eps=float(eps), z_dist=z_dist or spec.entry_dist)
    return run_trials(fn, trials, seed, workers=workers, on_record=on_record)


# ---------------------------------------------------------------------------
# arithmetic structure of kernels


def kernel_threshold(N: int, eps: float, c: float = 0.5) -> float:
    """``min(sqrt(N) exp(c / sqrt(eps)), eps N)``."""
    return min(math.sqrt(N) * math.exp(c / math.sqrt(eps)), eps * N)


def _kernel_lcd(B, L, lcd_seed, n_starts):
    basis = kernel_basis(B)
    if not basis:
        raise ParameterError("kernel is numerically trivial")
    E = realify_subspace(basis)
    return lcd_subspace_upper(E, L, n_starts=n_starts, seed=lcd_seed), len(basis)


def kernel_lcd_trial(seed: int, spec: EnsembleSpec, eps: float, L: float, c: float, c0: float,
                     n_starts: int) -> tuple[dict, dict]:
    N = spec.n_cols
    n = N - set_size(eps, N)
    B = sample_matrix(spec.with_shape(n, N), derive_seed(seed, 0))
    est, dim = _kernel_lcd(B, L, derive_seed(seed, 1), n_starts)
    thr = kernel_threshold(N, eps, c)
    metrics = {"lcd_upper": est.value, "lcd_over_sqrtN": est.value / math.sqrt(N), "threshold": thr,
               "kernel_dim": dim, "norm_ratio": norm_ratio(B)}
    flags = {"censored": est.censored, "exceeds_floor": est.value > c0 * math.sqrt(N),
             "exceeds_threshold": est.value > thr, "bounded": metrics["norm_ratio"] <= spec.norm_bound_M}
    return metrics, flags


def kernel_lcd_experiment(spec: EnsembleSpec, eps: float, trials: int, seed: int, *, L: float | None = None,
                          c: float = 0.5, c0: float = 0.5, n_starts: int = 16, workers: int = 1,
                          on_record=None) -> list[TrialRecord]:
    """Upper LCD estimate of the realified kernel of ``B`` (``n x N``, ``n = N - ceil(eps N)``).

    ``spec.n_cols`` gives ``N`` and ``L`` defaults to ``sqrt(eps N)``.  An
    upper estimate above a floor means structure is absent up to the search
    effort; a low value only means structure was not ruled out.
    """
    N = spec.n_cols
    if L is None:
        L = L_preset("kernel", eps=eps, N=N)
    if not 1 <= N - set_size(eps, N) < N:
        raise ParameterError("need 1 <= N - ceil(eps N) < N")
    fn = functools.partial(kernel_lcd_trial, spec=spec, eps=float(eps), L=float(L), c=float(c), c0=float(c0),
                           n_starts=int(n_starts))
    return run_trials(fn, trials, seed, workers=workers, on_record=on_record)


def planted_kernel_matrix(N: int, n: int, seed: int) -> np.ndarray:
    """Sign matrix (``n x N``) with rows projected orthogonally to ``(1, ..., 1)``,
    so that ``(1, ..., 1) / sqrt(N)`` lies in its kernel."""
    R = make_rng(seed).choice([-1.0, 1.0], size=(n, N))
    R -= R.mean(axis=1, keepdims=True)
    return R.astype(np.complex128)


def planted_kernel_control(N: int, eps: float, seed: int = 0, L: float | None = None, n_starts: int = 16):
    """LCD upper estimate for a kernel containing ``(1, ..., 1)/sqrt(N)``; it
    must not exceed ``sqrt(N)`` up to grid resolution."""
    n = N - set_size(eps, N)
    if L is None:
        L = L_preset("kernel", eps=eps, N=N)
    est, _ = _kernel_lcd(planted_kernel_matrix(N, n, seed), L, derive_seed(seed, 1), n_starts)
    return est


# ---------------------------------------------------------------------------
# randomized deterministic audits


def audit_trial(seed: int, n: int, eps: float = 0.25, delta: float = 0.1, M: float = 3.0) -> tuple[dict, dict]:
    """One instance of every deterministic audit at size ``n``."""
    rng = make_rng(seed)

    def cgauss(*shape):
        return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)

    tall = cgauss(n + max(1, n // 2), n)
    nsm = neg_second_moment_audit(tall)
    rows = row_deletion_audit(tall)
    A = cgauss(n + int(rng.integers(0, n // 2 + 1)), n)
    dec = decomposition_bound_audit(A, int(rng.integers(1, A.shape[0])))
    sq = cgauss(n, n) / math.sqrt(2.0)
    red = reduction_audit(sq, eps, delta, M)
    z, Bm = cgauss(n), cgauss(n, n)
    realify_err = max(float(np.abs(realify_vector(Bm @ z) - realify_matrix(Bm) @ realify_vector(z)).max()),
                      abs(np.linalg.norm(realify_vector(z)) - np.linalg.norm(z)))
    v = rng.standard_normal(n)
    V = rng.standard_normal((2, n))
    lcd_v = lcd_vector(v, 1.0).value
    lcd_V = lcd_matrix2(V, 1.0).value
    lcd_ok = lcd_v >= lcd_lower_bound(v) * (1 - 1e-9) and lcd_V >= lcd_lower_bound(V) * (1 - 1e-9)
    flags = {
        "neg_second_moment_ok": nsm.gap <= 1e-8,
        "row_deletion_ok": rows.violations == 0,
        "decomposition_ok": dec.holds,
        "reduction_ok": red.holds,
        "realify_ok": realify_err <= 1e-12 * max(1.0, float(np.abs(Bm).max()) * n),
        "lcd_lower_ok": bool(lcd_ok),
    }
    flags["audit_passed"] = all(flags.values())
    metrics = {"nsm_gap": nsm.gap, "decomposition_slack": dec.s_A - dec.bound, "realify_err": realify_err,
               "lcd_vector": lcd_v, "lcd_matrix2": lcd_V}
    return metrics, flags


def audit_experiment(n: int, trials: int, seed: int, *, eps: float = 0.25, delta: float = 0.1, M: float = 3.0,
                     workers: int = 1, on_record=None) -> list[TrialRecord]:
    """Randomized instances of the deterministic audits; ``audit_passed`` must hold on every record."""
    if n < 2:
        raise ParameterError("n must be at least 2")
    fn = functools.partial(audit_trial, n=int(n), eps=float(eps), delta=float(delta), M=float(M))
    return run_trials(fn, trials, seed, workers=workers, on_record=on_record)

