"""Concentration functions and Esseen-type small-ball bounds.

The concentration function of a random vector ``Z`` is

    L(Z, t) = sup_u P(||Z - u||_2 <= t),

with a closed ball.  For weighted sums of discrete variables it is computed
exactly by enumerating the law of the sum; otherwise it is estimated by Monte
Carlo with the sample points themselves as candidate centres, which can only
under-estimate the supremum.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Mapping, NamedTuple, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .errors import BudgetError, ParameterError, PreconditionError
from .rng import derive_seed, make_rng
from .structure.lcd import lcd_vector

ENUM_BUDGET = 2**20
MC_MIN_SAMPLES = 10_000
MC_MAX_DIM = 8
MC_SHARD = 1 << 15
MC_MAX_CENTERS = 4096


@dataclass(frozen=True)
class ConcentrationEstimate:
    """Value of ``L(Z, t)`` together with how it was obtained.

    Attributes
    ----------
    t : float
        Ball radius.
    value : float
        Estimated or exact concentration, in ``[0, 1]``.
    stderr : float
        Binomial standard error at the best centre (0 for exact results).
    method : str
        ``"exact_enum"``, ``"monte_carlo"`` or ``"closed_form"``.
    center_witness : ndarray
        A centre ``u`` attaining ``value``.
    lower_biased : bool
        Set when the supremum was taken over a finite candidate set.
    """

    t: float
    value: float
    stderr: float
    method: str
    center_witness: np.ndarray
    lower_biased: bool = False

    def __post_init__(self):
        if not (0.0 <= self.value <= 1.0):
            raise ParameterError(f"concentration value {self.value!r} outside [0, 1]")
        if self.t < 0 or self.stderr < 0:
            raise ParameterError("t and stderr must be non-negative")
        if self.method not in ("exact_enum", "monte_carlo", "closed_form"):
            raise ParameterError(f"unknown method {self.method!r}")
        if self.method == "exact_enum" and self.stderr != 0:
            raise ParameterError("exact estimates carry no standard error")


@dataclass(frozen=True)
class BoundParams:
    """Constants entering the small-ball bounds.

    ``C_const`` stands for the unnamed absolute constant of the bounds; ``p``
    and ``K`` describe the entry law (``sup_u P(|xi - u| < 1) <= 1 - p`` and
    ``|xi| <= K``).
    """

    L: float
    C_const: float = 1.0
    p: float = 0.5
    K: float = 1.0

    def __post_init__(self):
        if not self.L > 0:
            raise ParameterError("L must be positive")
        if not self.C_const > 0:
            raise ParameterError("C_const must be positive")
        if not 0 < self.p < 1:
            raise ParameterError("p must lie in (0, 1)")
        if not self.K > 0:
            raise ParameterError("K must be positive")


# ---------------------------------------------------------------------------
# exact enumeration


def _coord_atoms(atoms, N):
    """Normalize ``atoms`` to a list of ``(values, probs)`` arrays, one per coordinate."""
    if hasattr(atoms, "atoms"):
        atoms = [atoms] * N
    atoms = list(atoms)
    if len(atoms) != N:
        raise ParameterError(f"got atoms for {len(atoms)} coordinates but {N} weights")
    out = []
    for item in atoms:
        vals, probs = item.atoms() if hasattr(item, "atoms") else item
        vals = np.asarray(vals, dtype=float).ravel()
        probs = np.asarray(probs, dtype=float).ravel()
        if vals.shape != probs.shape or vals.size == 0:
            raise ParameterError("each coordinate needs matching non-empty values and probabilities")
        if np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-12:
            raise ParameterError("atom probabilities must be non-negative and sum to 1")
        out.append((vals, probs))
    return out


def _merge(vals, probs, tol):
    order = np.argsort(vals, kind="stable")
    vals, probs = vals[order], probs[order]
    keep = np.ones(vals.size, dtype=bool)
    keep[1:] = np.diff(vals) > tol
    groups = np.cumsum(keep) - 1
    return vals[keep], np.bincount(groups, weights=probs)


def sum_distribution(atoms, a) -> tuple[np.ndarray, np.ndarray]:
    """Exact law of ``sum_k a_k xi_k`` as sorted support points and masses.

    Points closer than ``1e-12`` (relative to the scale of the sum) are merged.
    """
    a = np.asarray(a, dtype=float).ravel()
    coords = _coord_atoms(atoms, a.size)
    total = math.prod(v.size for v, _ in coords)
    if total > ENUM_BUDGET:
        raise BudgetError(f"{total} outcomes exceed the enumeration budget {ENUM_BUDGET}")
    scale = sum(abs(ak) * np.abs(v).max() for ak, (v, _) in zip(a, coords))
    tol = 1e-12 * max(scale, 1.0)
    vals, probs = np.zeros(1), np.ones(1)
    for ak, (v, pv) in zip(a, coords):
        vals = (vals[:, None] + ak * v[None, :]).ravel()
        probs = (probs[:, None] * pv[None, :]).ravel()
        vals, probs = _merge(vals, probs, tol)
    return vals, probs


def _best_window(vals, probs, t, tol):
    """Largest mass of a closed interval of length ``2t``; the optimal
    interval can be taken to start at a support point."""
    cum = np.concatenate([[0.0], np.cumsum(probs)])
    right = np.searchsorted(vals, vals + 2.0 * t + tol, side="right")
    mass = cum[right] - cum[: vals.size]
    i = int(np.argmax(mass))
    return min(float(mass[i]), 1.0), float(vals[i] + t)


def exact_concentration_enum(atoms, a, t: float) -> ConcentrationEstimate:
    """Exact ``L(sum_k a_k xi_k, t)`` for independent discrete ``xi_k``.

    Parameters
    ----------
    atoms
        Either one object with an ``atoms()`` method (used for every
        coordinate) or a sequence with one entry per coordinate, each an
        object with ``atoms()`` or a ``(values, probs)`` pair.
    a : array_like
        Real weights.
    t : float
        Radius of the closed ball.

    Raises
    ------
    BudgetError
        If the product of the atom counts exceeds ``2**20``.
    """
    if t < 0:
        raise ParameterError("t must be non-negative")
    vals, probs = sum_distribution(atoms, a)
    tol = 1e-12 * max(float(np.abs(vals).max()), 1.0)
    value, center = _best_window(vals, probs, float(t), tol)
    return ConcentrationEstimate(float(t), value, 0.0, "exact_enum", np.array([center]))


def _window_curve(vals, probs, t_grid):
    """``_best_window`` values for every ``t`` in ``t_grid`` at once."""
    tol = 1e-12 * max(float(np.abs(vals).max()), 1.0)
    cum = np.concatenate([[0.0], np.cumsum(probs)])
    right = np.searchsorted(vals, vals[None, :] + 2.0 * np.asarray(t_grid)[:, None] + tol, side="right")
    return np.minimum((cum[right] - cum[None, : vals.size]).max(axis=1), 1.0)


def restriction_audit(atoms, a, t_grid, atol: float = 1e-12) -> int:
    """Count pairs ``(J, t)`` with ``L(sum_J, t) < L(sum_[N], t) - atol``.

    Adding independent terms cannot make a sum more concentrated, so for
    every subset ``J`` the concentration of the partial sum dominates that of
    the full sum.  The empty sum is the point mass at 0.  Laws of all
    ``2^N`` partial sums are built incrementally, one coordinate at a time.
    """
    a = np.asarray(a, dtype=float).ravel()
    N = a.size
    coords = _coord_atoms(atoms, N)
    if 2**N * max(v.size for v, _ in coords) > 64 * ENUM_BUDGET:
        raise BudgetError(f"{2**N} subsets exceed the restriction audit budget")
    t_grid = np.asarray([float(t) for t in t_grid])
    if t_grid.size == 0:
        return 0
    scale = sum(abs(ak) * np.abs(v).max() for ak, (v, _) in zip(a, coords))
    tol = 1e-12 * max(scale, 1.0)
    laws = [None] * (1 << N)
    laws[0] = (np.zeros(1), np.ones(1))
    for mask in range(1, 1 << N):
        j = mask.bit_length() - 1
        vals, probs = laws[mask ^ (1 << j)]
        v, pv = coords[j]
        laws[mask] = _merge((vals[:, None] + a[j] * v[None, :]).ravel(),
                            (probs[:, None] * pv[None, :]).ravel(), tol)
    full = _window_curve(*laws[-1], t_grid)
    violations = 0
    for mask in range(0, (1 << N) - 1):
        part = _window_curve(*laws[mask], t_grid)
        violations += int(np.sum(part < full - atol))
    return violations


# ---------------------------------------------------------------------------
# Monte Carlo


def weighted_sum_sampler(entry_dist, a) -> Callable:
    """Sampler of ``sum_k a_k xi_k`` with i.i.d. ``xi_k`` drawn from ``entry_dist``."""
    a = np.asarray(a)

    def sample(rng, size):
        return entry_dist.sample(rng, (size, a.size)) @ a

    return sample


def _draw(sampler, rng, size):
    draw = sampler.sample if hasattr(sampler, "sample") else sampler
    x = np.asarray(draw(rng, size))
    if x.ndim == 1:
        x = x[:, None]
    if np.iscomplexobj(x):
        # ||real(Z) - real(u)|| = ||Z - u||, so the realified law has the same concentration
        x = np.hstack([x.real, x.imag])
    return x.astype(float)


def concentration_mc(sampler, t: float, n_samples: int = 100_000, seed: int = 0,
                     *, max_centers: int = MC_MAX_CENTERS) -> ConcentrationEstimate:
    """Monte Carlo estimate of ``L(Z, t)``, biased low.

    Samples are drawn in fixed shards of ``2**15`` (shard ``s`` uses stream
    ``(seed, s)``), so the result depends only on ``seed`` and
    ``n_samples``.  Candidate centres are sample points; in one dimension
    every sample is a candidate and counts come from a sorted search, in
    higher dimension the first ``max_centers`` samples are candidates and
    counts come from a k-d tree over all samples.

    Parameters
    ----------
    sampler
        Callable ``(rng, size) -> array`` of shape ``(size,)`` or
        ``(size, k)``, or an object with such a ``sample`` method.  Complex
        samples are realified.
    """
    if n_samples < MC_MIN_SAMPLES:
        raise ParameterError(f"n_samples must be at least {MC_MIN_SAMPLES}")
    if t < 0:
        raise ParameterError("t must be non-negative")
    shards = []
    for s, start in enumerate(range(0, n_samples, MC_SHARD)):
        size = min(MC_SHARD, n_samples - start)
        shards.append(_draw(sampler, make_rng(derive_seed(seed, s)), size))
    X = np.vstack(shards)
    k = X.shape[1]
    if k > MC_MAX_DIM:
        raise BudgetError(f"dimension {k} exceeds the Monte Carlo limit {MC_MAX_DIM}")
    tol = 1e-12 * max(float(np.abs(X).max()), 1.0)
    if k == 1:
        x = np.sort(X[:, 0])
        counts = np.searchsorted(x, x + t + tol, side="right") - np.searchsorted(x, x - t - tol, side="left")
        i = int(np.argmax(counts))
        best, center = int(counts[i]), np.array([x[i]])
    else:
        centers = X[:max_centers]
        counts = np.asarray(cKDTree(X).query_ball_point(centers, r=t + tol, return_length=True))
        i = int(np.argmax(counts))
        best, center = int(counts[i]), centers[i].copy()
    value = best / n_samples
    stderr = math.sqrt(value * (1.0 - value) / n_samples)
    return ConcentrationEstimate(float(t), value, stderr, "monte_carlo", center, lower_biased=True)


# ---------------------------------------------------------------------------
# theoretical bounds


def lcd_threshold(p: float, m: int = 1) -> float:
    """Smallest admissible ``L`` for the small-ball bounds, ``sqrt(8 m / p)``."""
    return math.sqrt(8.0 * m / p)


def _inv(D):
    D = float(D)
    if not D > 0:
        raise ParameterError("LCD must be positive")
    return 0.0 if math.isinf(D) else 1.0 / D


def sbp_bound(kind: str, params: BoundParams, geometry: Mapping, t: float, *, check_threshold: bool = True) -> float:
    """Right-hand side of a small-ball bound, clamped to ``[0, 1]``.

    ``kind`` selects the bound and the keys read from ``geometry``:

    ``"sum"``
        ``C L / ||a|| * (t + 1/D)`` bounds ``L(sum a_k xi_k, t)``; needs ``D``
        and either ``a`` or ``norm_a``.
    ``"matrix_m"``
        ``(C L / sqrt(m))^m / det(V V^T)^(1/2) * (t + sqrt(m)/D)^m`` bounds
        ``L(V xi, t sqrt(m))``; needs ``V`` (``m x N``) and ``D``.
    ``"projection"``
        ``(C L / sqrt(m))^m * (t + sqrt(m)/D)^m`` bounds
        ``L(P_E xi, t sqrt(m))``; needs ``m`` and ``D``.

    ``D = inf`` is allowed.  With ``check_threshold`` the bounds are only
    evaluated for ``L >= sqrt(8 m / p)``, where they are proved.
    """
    if t < 0:
        raise ParameterError("t must be non-negative")
    C, L = params.C_const, params.L
    if kind == "sum":
        m = 1
        norm_a = geometry["norm_a"] if "norm_a" in geometry else float(np.linalg.norm(np.asarray(geometry["a"], float)))
        if not norm_a > 0:
            raise ParameterError("weight vector must be non-zero")
        scale_log = math.log(C * L / norm_a)
        base = t + _inv(geometry["D"])
        det_log = 0.0
    elif kind in ("matrix_m", "projection"):
        if kind == "matrix_m":
            V = np.atleast_2d(np.asarray(geometry["V"], dtype=float))
            m = V.shape[0]
            sign, logdet = np.linalg.slogdet(V @ V.T)
            if sign <= 0:
                raise ParameterError("V V^T must be non-singular")
            det_log = 0.5 * logdet
        else:
            m = int(geometry["m"])
            if m < 1:
                raise ParameterError("m must be a positive integer")
            det_log = 0.0
        scale_log = math.log(C * L / math.sqrt(m))
        base = t + math.sqrt(m) * _inv(geometry["D"])
    else:
        raise ParameterError(f"unknown bound kind {kind!r}")
    if check_threshold and L < lcd_threshold(params.p, m) * (1 - 1e-12):
        raise ParameterError(
            f"L = {L:g} is below the admissible threshold sqrt(8*m/p) = {lcd_threshold(params.p, m):g}"
        )
    if base == 0.0:
        return 0.0
    log_val = m * (scale_log + math.log(base)) - det_log
    return 1.0 if log_val >= 0 else math.exp(log_val)


class DominationAudit(NamedTuple):
    fitted_C: float
    violations: int


def bound_domination_audit(family: Sequence, params: BoundParams, t_grid: Sequence[float], *, atoms=None,
                           C_step: float = 0.01, lcd_kwargs: Mapping | None = None) -> DominationAudit:
    """Fit the constant of the bound for sums against exact concentration.

    For every weight vector ``a`` in ``family`` and ``t`` in ``t_grid`` the
    exact ``L(sum a_k xi_k, t)`` is compared with ``C L/||a|| (t + 1/D(a, L))``.
    ``fitted_C`` is the smallest multiple of ``C_step`` (at least ``C_step``)
    for which the bound dominates everywhere; ``violations`` counts the
    points where the bound with ``params.C_const`` falls below the exact value.

    ``atoms`` defaults to symmetric signs.  ``D(a, L)`` comes from
    :func:`nogaps.structure.lcd_vector` (censored estimates use the cap).
    """
    if atoms is None:
        atoms = (np.array([-1.0, 1.0]), np.array([0.5, 0.5]))
    lcd_kwargs = dict(lcd_kwargs or {})
    t_grid = [float(t) for t in t_grid]
    need = 0.0
    violations = 0
    for a in family:
        a = np.asarray(a, dtype=float).ravel()
        if not t_grid:
            continue
        D = lcd_vector(a, params.L, **lcd_kwargs).value
        coords = [atoms] * a.size
        for t in t_grid:
            exact = exact_concentration_enum(coords, a, t).value
            # the unclamped bound is linear in C
            raw = params.L / np.linalg.norm(a) * (t + 1.0 / D)
            need = max(need, exact / raw)
            if min(params.C_const * raw, 1.0) < exact - 1e-12:
                violations += 1
    fitted = C_step * max(1, math.ceil(need / C_step - 1e-9))
    return DominationAudit(float(fitted), int(violations))


def tensorization_audit(per_coord_estimates: Sequence[Sequence[ConcentrationEstimate]],
                        joint_estimate: ConcentrationEstimate, t: float, t0: float,
                        M: float | None = None, rtol: float = 1e-9) -> float:
    """Smallest ``C`` with ``L(Z, t sqrt(n)) <= [C M (t + t0)]^n`` at the given ``t``.

    ``per_coord_estimates[j]`` is a curve of estimates of ``L(Z_j, s)``;
    ``n`` is the number of curves and ``joint_estimate`` must be taken at
    radius ``t sqrt(n)``.  When ``M`` is omitted it is fitted as the least
    value with ``L(Z_j, s) <= M (s + t0)`` on every curve.

    Raises
    ------
    PreconditionError
        If a supplied ``M`` does not dominate every curve.
    """
    n = len(per_coord_estimates)
    if n == 0:
        raise ParameterError("need at least one coordinate")
    if t < 0 or t0 < 0 or t + t0 == 0:
        raise ParameterError("need t, t0 >= 0 with t + t0 > 0")
    if not math.isclose(joint_estimate.t, t * math.sqrt(n), rel_tol=1e-9, abs_tol=1e-12):
        raise ParameterError(f"joint estimate radius {joint_estimate.t} differs from t*sqrt(n) = {t * math.sqrt(n)}")
    ratios = [e.value / (e.t + t0) for curve in per_coord_estimates for e in curve if e.t + t0 > 0]
    if M is None:
        M = max(ratios) if ratios else 0.0
        if not M > 0:
            raise PreconditionError("cannot fit a positive M from the per-coordinate curves")
    else:
        worst = max(ratios, default=0.0)
        if worst > M * (1 + rtol):
            raise PreconditionError(f"per-coordinate premise fails: L(Z_j, s)/(s + t0) reaches {worst:g} > M = {M:g}")
    return float(joint_estimate.value ** (1.0 / n) / (M * (t + t0)))


def simple_bound_audit(vectors: Sequence, c: float = 0.05, c_prime: float = 0.1, atoms=None) -> int:
    """Count unit vectors ``a`` with ``L(sum a_k xi_k, c) > 1 - c_prime`` (exact)."""
    if atoms is None:
        atoms = (np.array([-1.0, 1.0]), np.array([0.5, 0.5]))
    bad = 0
    for a in vectors:
        a = np.asarray(a, dtype=float).ravel()
        if abs(np.linalg.norm(a) - 1.0) > 1e-10:
            raise ParameterError("simple bound audit expects unit vectors")
        if exact_concentration_enum([atoms] * a.size, a, c).value > 1.0 - c_prime:
            bad += 1
    return bad


def smallball_trial(seed: int, atoms, t_grid: tuple, L: float, C: float, N_max: int = 12, c: float = 0.05,
                    c_prime: float = 0.1, check_restriction: bool = True) -> tuple[dict, dict]:
    """One random unit weight vector (length uniform in ``[2, N_max]``) checked
    against the sum bound, the simple bound and the restriction property.

    ``needed_C`` is the least constant making the bound dominate the exact
    concentration at every ``t`` in ``t_grid``.
    """
    rng = make_rng(seed)
    N = int(rng.integers(2, N_max + 1))
    a = rng.standard_normal(N)
    a /= np.linalg.norm(a)
    D = lcd_vector(a, L).value
    coords = [atoms] * N
    needed = 0.0
    for t in t_grid:
        exact = exact_concentration_enum(coords, a, t).value
        needed = max(needed, exact / (L * (t + 1.0 / D)))
    simple = exact_concentration_enum(coords, a, c).value
    metrics = {"N": N, "lcd": D, "needed_C": needed, "simple_value": simple}
    flags = {"bound_ok": needed <= C * (1 + 1e-12), "simple_ok": simple <= 1.0 - c_prime}
    if check_restriction:
        flags["restriction_ok"] = restriction_audit(coords, a, t_grid) == 0
    return metrics, flags
