import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nogaps.errors import ParameterError
from nogaps.structure import (L_preset, lcd_lower_bound, lcd_matrix2, lcd_subspace_upper, lcd_vector, lll_reduce,
                              near_lattice_points)


def _qualifies(x, L):
    """Independent statement of the LCD condition for a single point ``x``."""
    nrm = math.sqrt(sum(c * c for c in x))
    dist = math.sqrt(sum((c - round(c)) ** 2 for c in x))
    return dist < L * math.sqrt(max(math.log(nrm / L), 0.0)) if nrm > 0 else False


def brute_lcd_vector(v, L, cap, step=1e-5):
    for theta in np.arange(step, cap, step):
        if _qualifies(theta * np.asarray(v), L):
            return theta
    return cap


def brute_lcd_matrix2(V, L, cap, step=2e-3, n_ang=4000):
    V = np.asarray(V, dtype=float)
    phis = np.linspace(0, np.pi, n_ang, endpoint=False)
    dirs = np.column_stack([np.cos(phis), np.sin(phis)])
    for r in np.arange(step, cap, step):
        for u in dirs:
            if _qualifies((r * u) @ V, L):
                return r
    return cap


def test_unit_coordinate_vector():
    est = lcd_vector(np.eye(4)[0], L=1.0, search_cap=10.0)
    assert est.value == pytest.approx(1.0, abs=1e-3)
    assert not est.censored
    assert est.kind == "vector"


def test_diagonal_vector_matches_brute_force():
    v = np.ones(2) / math.sqrt(2)
    est = lcd_vector(v, L=0.5, search_cap=10.0)
    oracle = brute_lcd_vector(v, 0.5, 10.0)
    assert est.value == pytest.approx(oracle, abs=1e-3)
    # the multiplier sqrt(2) reaching (1, 1) also qualifies, so it bounds the LCD above
    assert _qualifies(math.sqrt(2) * v, 0.5)
    assert est.value <= math.sqrt(2)


@pytest.mark.parametrize("seed", range(6))
def test_random_vectors_match_brute_force(seed):
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(3)
    v /= np.linalg.norm(v)
    est = lcd_vector(v, L=0.7, search_cap=8.0, grid_step=1e-3)
    assert est.value == pytest.approx(brute_lcd_vector(v, 0.7, 8.0), abs=2e-3)


def test_small_sup_norm_forces_large_lcd(rng):
    v = rng.uniform(-0.1, 0.1, 300)
    v[0] = 0.1
    assert lcd_vector(v, 1.0).value >= 5.0 - 1e-9


def test_witness_residual_satisfies_condition(rng):
    v = rng.standard_normal(5)
    est = lcd_vector(v, 1.0)
    x = est.value * v
    assert est.witness_residual == pytest.approx(np.linalg.norm(x - np.rint(x)))
    assert _qualifies(x, 1.0)


def test_censored_when_nothing_qualifies():
    v = np.array([1.0, math.sqrt(2)]) / math.sqrt(3)
    est = lcd_vector(v, L=0.5, search_cap=1.0)
    assert est.censored and est.value == 1.0
    assert brute_lcd_vector(v, 0.5, 1.0, step=1e-4) == 1.0


def test_censored_value_never_below_proven_bound():
    v = np.array([0.004, -0.003])
    est = lcd_vector(v, L=1.0, search_cap=10.0)
    assert est.censored
    # both L/||v|| and 1/(2||v||_inf) are proven lower bounds
    assert est.value == pytest.approx(max(1.0 / np.linalg.norm(v), lcd_lower_bound(v)))
    est2 = lcd_matrix2(np.vstack([v, v]), L=1.0, search_cap=10.0)
    assert est2.censored and est2.value >= lcd_lower_bound(np.vstack([v, v]))


def test_zero_vector_rejected():
    with pytest.raises(ParameterError):
        lcd_vector(np.zeros(3), 1.0)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), s=st.floats(0.5, 4.0))
def test_scale_covariance(seed, s):
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(4)
    v /= np.linalg.norm(v)
    step = 1e-4
    a = lcd_vector(v, 1.0, search_cap=20.0, grid_step=step).value
    b = lcd_vector(s * v, 1.0, search_cap=20.0 / s, grid_step=step / s).value
    assert b * s == pytest.approx(a, abs=2 * step)


def test_matrix_identity_rows_match_brute_force():
    V = np.eye(2)
    est = lcd_matrix2(V, L=0.9, search_cap=10.0, grid_step=0.01)
    oracle = brute_lcd_matrix2(V, 0.9, 1.2, step=1e-3, n_ang=360)
    assert est.value == pytest.approx(oracle, abs=2e-2)
    assert est.value <= 1.0 + 2e-2


def test_matrix_small_columns_force_large_lcd(rng):
    V = rng.uniform(-0.03, 0.03, (2, 200))
    V[:, 0] = [0.03, 0.04]
    assert lcd_matrix2(V, 1.0).value >= 10.0 - 1e-9


def test_matrix_equal_rows_reduce_to_vector():
    v = np.array([0.6, 0.8, 0.0])
    V = np.vstack([v, v])
    # theta = (t, t) / sqrt(2) * r maps to r * sqrt(2) * v, so D(V) = D(v) / sqrt(2)
    vec = lcd_vector(v, 1.0, search_cap=10.0).value
    mat = lcd_matrix2(V, 1.0, search_cap=10.0, grid_step=0.005).value
    assert mat == pytest.approx(vec / math.sqrt(2), abs=0.01)
    assert mat == pytest.approx(brute_lcd_matrix2(V, 1.0, 8.0, step=5e-3, n_ang=720), abs=0.01)


def test_matrix_witness_norm():
    V = np.array([[0.3, 0.1, 0.5], [0.2, -0.4, 0.1]])
    est = lcd_matrix2(V, 1.0)
    assert est.value == pytest.approx(np.linalg.norm(est.witness), rel=1e-12)
    assert _qualifies(est.witness @ V, 1.0)


def test_subspace_one_dimensional():
    est = lcd_subspace_upper(np.eye(4)[:, :1], L=1.0, n_starts=4)
    assert est.value == pytest.approx(1.0, abs=1e-3)
    assert est.kind == "subspace_upper"


def test_subspace_with_all_ones_direction(rng):
    N = 9
    ones = np.ones(N) / math.sqrt(N)
    other = rng.standard_normal(N)
    other -= other @ ones * ones
    other /= np.linalg.norm(other)
    est = lcd_subspace_upper(np.column_stack([other, ones]), L=1.0, n_starts=8, seed=3)
    assert est.value <= math.sqrt(N) + 1e-2


def test_full_plane():
    assert lcd_subspace_upper(np.eye(2), L=1.0).value <= 1.0 + 1e-2


def test_subspace_rejects_bad_basis():
    with pytest.raises(ParameterError):
        lcd_subspace_upper(np.zeros((3, 0)), 1.0)
    with pytest.raises(ParameterError):
        lcd_subspace_upper(np.array([[1.0, 1.0], [0.0, 1.0]]), 1.0)


def test_subspace_is_deterministic(rng):
    Q, _ = np.linalg.qr(rng.standard_normal((8, 3)))
    a = lcd_subspace_upper(Q, 1.5, n_starts=5, seed=9)
    b = lcd_subspace_upper(Q, 1.5, n_starts=5, seed=9)
    assert a.value == b.value
    np.testing.assert_array_equal(a.witness, b.witness)


def test_lower_bound_formula():
    assert lcd_lower_bound(np.array([0.5, -0.1, 0.2])) == pytest.approx(1.0)
    V = np.array([[0.06, 0.1, 0.0], [0.08, 0.0, -0.1]])
    assert lcd_lower_bound(V) == pytest.approx(5.0)
    with pytest.raises(ParameterError):
        lcd_lower_bound(np.zeros(3))


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 30))
def test_lcd_exceeds_lower_bound(seed, n):
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n)
    assert lcd_vector(v, 1.0).value >= lcd_lower_bound(v) * (1 - 1e-9)


def test_presets():
    assert L_preset("sums", p=0.5) == pytest.approx(4.0)
    assert L_preset("kernel", eps=0.25, N=24) == pytest.approx(math.sqrt(6))
    assert L_preset("correlation", p=0.25) == pytest.approx(8.0)
    with pytest.raises(ParameterError):
        L_preset("nope")


def test_lll_reduces_and_finds_short_vectors(rng):
    B = np.array([[1.0, 0.0], [1000.0, 1.0]])
    R = lll_reduce(B)
    assert np.max(np.linalg.norm(R, axis=1)) < 2.0
    Q, _ = np.linalg.qr(np.column_stack([np.ones(6), rng.standard_normal(6)]))
    pts = near_lattice_points(Q)
    assert all(np.allclose(p, np.rint(p)) for p in pts)
