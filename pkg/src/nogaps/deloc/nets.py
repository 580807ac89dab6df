"""Covering nets: a disc of spectral parameters and cardinality bounds for
nets of vector level sets."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ParameterError


@dataclass(frozen=True)
class DiscNet:
    """A finite set whose ``mesh``-neighbourhood covers ``{|z| <= M sqrt(n)}``."""

    centers: np.ndarray
    mesh: float
    cardinality: int
    M: float
    delta: float
    n: int

    @property
    def radius(self) -> float:
        return self.M * math.sqrt(self.n)

    def nearest(self, z: complex) -> complex:
        return complex(self.centers[int(np.argmin(np.abs(self.centers - z)))])

    def covering_failures(self, n_probes: int = 10_000, seed: int = 0) -> int:
        """Number of uniform probes of the disc farther than ``mesh`` from every centre."""
        rng = np.random.default_rng(seed)
        r = self.radius * np.sqrt(rng.random(n_probes))
        z = r * np.exp(2j * np.pi * rng.random(n_probes))
        d = np.abs(z[:, None] - self.centers[None, :]).min(axis=1)
        return int(np.sum(d > self.mesh * (1 + 1e-12)))


def disc_net(M: float, n: int, delta: float) -> DiscNet:
    """``(2 M delta sqrt(n))``-net of the disc of radius ``M sqrt(n)``.

    Centres form a hexagonal lattice of spacing ``rho sqrt(3)``, whose
    covering radius is exactly ``rho = 2 M delta sqrt(n)``; only lattice points
    within ``R + rho`` of the origin are kept.  When ``rho >= R`` the origin
    alone suffices.  The cardinality is about ``0.3 (1 + 2 delta)^2 / delta^2``,
    below ``5 / delta^2``.
    """
    if not 0 < delta <= 1:
        raise ParameterError("delta must lie in (0, 1]")
    if not M >= 1:
        raise ParameterError("M must be at least 1")
    if n < 1:
        raise ParameterError("n must be a positive integer")
    R = M * math.sqrt(n)
    rho = 2.0 * M * delta * math.sqrt(n)
    if rho >= R:
        centers = np.zeros(1, dtype=complex)
    else:
        s = rho * math.sqrt(3.0)
        h = s * math.sqrt(3.0) / 2.0
        reach = R + rho
        rows = int(math.ceil(reach / h)) + 1
        cols = int(math.ceil(reach / s)) + 1
        j, k = np.meshgrid(np.arange(-rows, rows + 1), np.arange(-cols, cols + 1), indexing="ij")
        pts = (k + 0.5 * (j % 2)) * s + 1j * (j * h)
        pts = pts.ravel()
        centers = pts[np.abs(pts) <= reach]
    return DiscNet(centers, rho, int(centers.size), float(M), float(delta), int(n))


def levelset_gamma(D: float, L: float) -> float:
    """``gamma = (L/D) sqrt(log_+(D/L))``."""
    if not (D > 0 and L > 0):
        raise ParameterError("D and L must be positive")
    return (L / D) * math.sqrt(math.log(max(D / L, 1.0)))


def levelset_d0(D: float, N: int, delta: float, L: float, C: float = 1.0) -> float:
    """Correlation threshold ``d0 = C delta max(gamma, sqrt(N)/D)``."""
    return C * delta * max(levelset_gamma(D, L), math.sqrt(N) / D)


def log_levelset_net_bound(case: str, D: float, d: float, N: int, delta: float, L: float, C: float = 1.0) -> float:
    """Natural logarithm of the level-set net cardinality bound.

    ``case="complex"`` (needs ``d >= d0``)::

        delta^-N  gamma^-(2 delta N + 1)  (C D / sqrt N)^(2N - delta N)  d^(N - delta N - 1)

    ``case="real"`` (needs ``d <= d0``)::

        delta^-(delta N)  gamma^-(2 delta N + 1)  (C D / sqrt N)^(N - delta N + 1)

    Raises
    ------
    ParameterError
        For ``gamma = 0`` (``D <= L``), parameters out of range, or a value of
        ``d`` on the wrong side of ``d0``.
    """
    if not 0 < delta < 1:
        raise ParameterError("delta must lie in (0, 1)")
    if not 0 <= d <= 1:
        raise ParameterError("d must lie in [0, 1]")
    if N < 1 or not C > 0:
        raise ParameterError("N must be positive and C positive")
    gamma = levelset_gamma(D, L)
    if gamma == 0.0:
        raise ParameterError("gamma = 0 since D <= L (log_+ vanishes); the bound is undefined")
    d0 = levelset_d0(D, N, delta, L, C)
    log_scale = math.log(C * D / math.sqrt(N))
    dN = delta * N
    if case == "complex":
        if d < d0:
            raise ParameterError(f"complex case needs d >= d0 = {d0:.6g}, got d = {d:.6g}")
        if d == 0.0:
            raise ParameterError("complex case is undefined at d = 0")
        return (-N * math.log(delta) - (2 * dN + 1) * math.log(gamma)
                + (2 * N - dN) * log_scale + (N - dN - 1) * math.log(d))
    if case == "real":
        if d > d0:
            raise ParameterError(f"real case needs d <= d0 = {d0:.6g}, got d = {d:.6g}")
        return -dN * math.log(delta) - (2 * dN + 1) * math.log(gamma) + (N - dN + 1) * log_scale
    raise ParameterError(f"unknown case {case!r}; use 'complex' or 'real'")


def _exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def levelset_net_bound(case: str, D: float, d: float, N: int, delta: float, L: float, C: float = 1.0) -> float:
    """Level-set net cardinality bound (``inf`` past the float range)."""
    return _exp(log_levelset_net_bound(case, D, d, N, delta, L, C))


def compressible_net_bound(N: int, c0: float, c1: float, C: float = 1.0, *, log: bool = False) -> float:
    """Cardinality bound ``(C / (c0 c1^2))^(c0 N)`` for a net of compressible vectors."""
    if not (0 < c0 < 1 and 0 < c1 < 1 and C > 0 and N >= 1):
        raise ParameterError("need 0 < c0, c1 < 1, C > 0 and N >= 1")
    val = c0 * N * math.log(C / (c0 * c1 * c1))
    return val if log else _exp(val)
