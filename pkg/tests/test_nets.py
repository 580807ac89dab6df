import math

import mpmath
import numpy as np
import pytest

from nogaps.deloc import compressible_net_bound, disc_net, levelset_d0, levelset_gamma, levelset_net_bound
from nogaps.deloc.nets import log_levelset_net_bound
from nogaps.errors import ParameterError

mpmath.mp.dps = 50


def oracle_levelset(case, D, d, N, delta, L, C=1.0):
    """Direct high-precision product of the powers (no logarithm bookkeeping)."""
    D, d, delta, L, C = (mpmath.mpf(x) for x in (D, d, delta, L, C))
    gamma = (L / D) * mpmath.sqrt(mpmath.log(D / L))
    scale = C * D / mpmath.sqrt(N)
    if case == "complex":
        return delta ** (-N) * gamma ** (-(2 * delta * N + 1)) * scale ** (2 * N - delta * N) * d ** (N - delta * N - 1)
    return delta ** (-(delta * N)) * gamma ** (-(2 * delta * N + 1)) * scale ** (N - delta * N + 1)


@pytest.mark.parametrize("delta", [1.0, 0.5, 0.1, 0.02])
def test_disc_net_cardinality_and_cover(delta):
    net = disc_net(2.0, 16, delta)
    assert net.cardinality <= math.ceil(5 / delta**2)
    assert net.mesh == pytest.approx(2 * 2.0 * delta * 4)
    assert net.covering_failures(10_000, seed=1) == 0


def test_disc_net_examples():
    assert disc_net(1.0, 1, 1.0).cardinality == 1
    net = disc_net(1.0, 1, 0.5)
    assert net.cardinality <= 20 and net.mesh == pytest.approx(1.0)
    assert net.covering_failures(10_000) == 0


def test_disc_net_nearest():
    net = disc_net(1.5, 4, 0.1)
    z = 1.3 - 0.7j
    c = net.nearest(z)
    assert abs(c - z) == pytest.approx(np.abs(net.centers - z).min())
    assert abs(c - z) <= net.mesh


def test_disc_net_rejects_bad_parameters():
    with pytest.raises(ParameterError):
        disc_net(0.5, 4, 0.1)
    with pytest.raises(ParameterError):
        disc_net(1.0, 4, 0.0)


def test_gamma_guard():
    assert levelset_gamma(5.0, 5.0) == 0.0
    with pytest.raises(ParameterError, match="gamma"):
        levelset_net_bound("complex", 5.0, 1.0, 100, 0.1, 5.0)


def test_complex_example_matches_oracle():
    N = 100
    val = levelset_net_bound("complex", 10 * math.sqrt(N), 1.0, N, 0.1, math.sqrt(N))
    assert 0 < val < math.inf
    assert val == pytest.approx(float(oracle_levelset("complex", 10 * math.sqrt(N), 1.0, N, 0.1, math.sqrt(N))),
                                rel=1e-10)


def test_real_case_ignores_d():
    args = (10 * math.sqrt(100), 100, 0.1, math.sqrt(100))
    a = levelset_net_bound("real", args[0], 0.0, *args[1:])
    d0 = levelset_d0(args[0], 100, 0.1, args[2])
    b = levelset_net_bound("real", args[0], d0 / 2, *args[1:])
    assert a == b


def test_case_mismatch_names_d0():
    with pytest.raises(ParameterError, match="d0"):
        levelset_net_bound("complex", 100.0, 1e-6, 100, 0.1, 10.0)
    with pytest.raises(ParameterError, match="d0"):
        levelset_net_bound("real", 100.0, 1.0, 100, 0.1, 10.0)


def _tuples():
    rng = np.random.default_rng(77)
    out = []
    while len(out) < 20:
        N = int(rng.integers(4, 400))
        L = float(rng.uniform(0.5, 3.0)) * math.sqrt(N) ** 0.5
        D = L * float(rng.uniform(1.5, 60.0))
        delta = float(rng.uniform(0.01, 0.5))
        C = float(rng.uniform(0.5, 4.0))
        d0 = levelset_d0(D, N, delta, L, C)
        if len(out) % 2 == 0 and d0 < 1:
            out.append(("complex", D, float(rng.uniform(d0, 1.0)), N, delta, L, C))
        elif len(out) % 2 == 1:
            out.append(("real", D, float(rng.uniform(0, min(d0, 1.0))), N, delta, L, C))
    return out


@pytest.mark.parametrize("params", _tuples())
def test_levelset_bound_matches_oracle(params):
    ours = log_levelset_net_bound(*params)
    oracle = mpmath.log(oracle_levelset(*params))
    assert ours == pytest.approx(float(oracle), rel=1e-10, abs=1e-9)
    val = levelset_net_bound(*params)
    if math.isfinite(val):
        assert val == pytest.approx(float(mpmath.e ** oracle), rel=1e-9)
    else:
        assert oracle > mpmath.log(mpmath.mpf(np.finfo(float).max))


def test_compressible_net_bound():
    val = compressible_net_bound(100, 0.1, 0.5, C=2.0)
    assert val == pytest.approx((2.0 / (0.1 * 0.25)) ** 10)
    assert compressible_net_bound(100, 0.1, 0.5, C=2.0, log=True) == pytest.approx(10 * math.log(80.0))
    assert compressible_net_bound(10**6, 0.5, 0.1) == math.inf
