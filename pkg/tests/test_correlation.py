import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nogaps.errors import BudgetError, NormalizationError, ParameterError
from nogaps.structure import cauchy_binet_audit, compress_class, rc_correlation, sm_set, small_count

from conftest import complex_gaussian


def brute_d(z, delta):
    """Exhaustive d(z) by the 2 x 2 Gram determinant formula."""
    z = np.asarray(z, dtype=complex)
    N = z.size
    k = math.floor(delta * N + 1e-12)
    order = sorted(range(N), key=lambda j: (-abs(z[j]), j))
    small = sorted(order[k:])
    best = 0.0
    for J in itertools.combinations(small, k):
        x, y = z.real[list(J)], z.imag[list(J)]
        det = (x @ x) * (y @ y) - (x @ y) ** 2
        best = max(best, math.sqrt(max(det, 0.0)))
    return best


def test_sm_set_examples():
    np.testing.assert_array_equal(sm_set([0.9, 0.1, 0.05, 0.02], 0.25), [1, 2, 3])
    np.testing.assert_array_equal(sm_set(np.ones(4) * 0.5j, 0.25), [1, 2, 3])
    with pytest.raises(ParameterError):
        sm_set(np.ones(3), 0.2)


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), N=st.integers(2, 40), delta=st.floats(0.01, 0.99))
def test_sm_set_size_and_order(seed, N, delta):
    k = small_count(N, delta)
    if not 1 <= k < N:
        return
    z = complex_gaussian(np.random.default_rng(seed), N)
    small = sm_set(z, delta)
    assert small.size == N - k
    large = np.setdiff1d(np.arange(N), small)
    assert np.abs(z[large]).min() >= np.abs(z[small]).max()


def test_essentially_real_vector_has_zero_correlation(rng):
    x = rng.standard_normal(8)
    assert rc_correlation(x + 1j * x, 0.5).d_value == pytest.approx(0.0, abs=1e-12)


def test_disjoint_supports():
    z = np.zeros(6, dtype=complex)
    z[3] = 0.3
    z[4] = 0.2j
    z[0], z[1] = 2.0, 1.5j  # the two largest coordinates leave sm(z)
    res = rc_correlation(z, 2 / 6 + 1e-9)
    assert res.d_value == pytest.approx(0.3 * 0.2)
    assert set(res.witness_subset) == {3, 4}
    assert set(res.witness_subset) <= set(res.small_set)


@pytest.mark.parametrize("seed", range(20))
def test_exact_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    N = int(rng.integers(5, 11))
    delta = float(rng.uniform(0.2, 0.5))
    if small_count(N, delta) < 2:
        delta = 2.0 / N
    z = complex_gaussian(rng, N)
    z /= np.linalg.norm(z)
    res = rc_correlation(z, delta)
    assert res.d_value == pytest.approx(brute_d(z, delta), abs=1e-12)
    assert 0.0 <= res.d_value <= 1.0


def test_greedy_below_exact(rng):
    for _ in range(200):
        z = complex_gaussian(rng, 10)
        assert rc_correlation(z, 0.2, "greedy").d_value <= rc_correlation(z, 0.2, "exact").d_value + 1e-12


def test_exact_budget():
    with pytest.raises(BudgetError, match="greedy"):
        rc_correlation(np.arange(1, 61) * (1 + 0.5j), 0.2)
    res = rc_correlation(np.arange(1, 61) * (1 + 0.5j) + 1j * np.sin(np.arange(60)), 0.2, "greedy")
    assert res.method == "greedy"


def test_compress_class_examples():
    assert compress_class(np.eye(8)[0], 0.25, 0.1) == ("compressible", 0.0)
    N = 8
    cls, dist = compress_class(np.ones(N) / math.sqrt(N), 0.25, 0.5)
    assert dist == pytest.approx(math.sqrt(0.75))
    assert cls == "incompressible"
    with pytest.raises(NormalizationError):
        compress_class(np.ones(3), 0.25, 0.5)


@pytest.mark.parametrize("seed", range(10))
def test_compress_distance_matches_support_enumeration(seed):
    rng = np.random.default_rng(seed)
    N = int(rng.integers(4, 13))
    z = complex_gaussian(rng, N)
    z /= np.linalg.norm(z)
    c0 = float(rng.uniform(0.1, 0.6))
    s = math.floor(c0 * N + 1e-12)
    oracle = min(np.linalg.norm(np.delete(z, list(S))) for S in itertools.combinations(range(N), s))
    assert compress_class(z, c0, 0.5)[1] == pytest.approx(oracle, abs=1e-12)


def test_cauchy_binet_trivial_and_random(rng):
    x = rng.standard_normal(10)
    res = cauchy_binet_audit(x + 1j * x, 0.2)
    assert res.holds and res.lhs == pytest.approx(0.0, abs=1e-20) and res.rhs == pytest.approx(0.0, abs=1e-20)
    for _ in range(20):
        res = cauchy_binet_audit(complex_gaussian(rng, 10), 0.2)
        assert res.holds and res.lhs >= res.rhs > 0
        # for pairs the two counting conventions coincide
        assert res.rhs_printed_count == pytest.approx(res.rhs)


def test_cauchy_binet_disjoint_supports():
    z = np.array([0.5, 0.0, 0.3, 0.0, 0.1, 0.0, 0.0, 0.0]) + 1j * np.array([0, 0.4, 0, 0.2, 0, 0.05, 0, 0])
    assert cauchy_binet_audit(z, 0.25).holds


def test_cauchy_binet_averaging_identity(rng):
    # sum over k-subsets of det(V_J V_J^T) equals C(N0-2, k-2) det(V_I V_I^T)
    z = complex_gaussian(rng, 9)
    delta = 3 / 9 + 1e-9
    I = sm_set(z, delta)
    V = np.vstack([z.real, z.imag])
    total = sum(np.linalg.det(V[:, J] @ V[:, J].T) for J in itertools.combinations(I, 3))
    det_I = np.linalg.det(V[:, I] @ V[:, I].T)
    assert total == pytest.approx(math.comb(I.size - 2, 1) * det_I, rel=1e-10)


@pytest.mark.parametrize("N,k", [(8, 3), (10, 4)])
def test_overcounted_variant_fails_beyond_pairs(rng, N, k):
    failures = 0
    for _ in range(100):
        res = cauchy_binet_audit(complex_gaussian(rng, N), k / N + 1e-9)
        assert res.holds
        failures += res.lhs < res.rhs_printed_count
    assert failures > 0


def test_small_set_smaller_than_subset_size_raises():
    with pytest.raises(ParameterError):
        rc_correlation(np.arange(1, 7) + 1j, 4 / 6 + 1e-9)
