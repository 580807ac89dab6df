import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nogaps.deloc import (decomposition_bound_audit, deloc_profile, deloc_report, distance_experiment,
                          interior_threshold, kernel_lcd_experiment, loc_event, localization_norm,
                          neg_second_moment_audit, planted_kernel_control, plus_lower_bound_violations,
                          reduction_audit, row_deletion_audit, set_size, smin_experiment, split_spectral_subspaces)
from nogaps.deloc.experiments import audit_trial, deloc_trial
from nogaps.ensembles import EnsembleSpec, Gaussian, SymmetricSign, point_mass
from nogaps.errors import NormalizationError, ParameterError, SingularityError
from nogaps.harness.stats import summarize

from conftest import complex_gaussian


def brute_localization(v, eps):
    n = v.size
    k = math.ceil(eps * n - 1e-9)
    return min(np.linalg.norm(v[list(I)]) for r in range(k, n + 1) for I in itertools.combinations(range(n), r))


def test_localization_examples():
    assert localization_norm(np.ones(4) / 2, 0.25) == pytest.approx(0.5)
    assert localization_norm(np.eye(4)[0], 0.25) == 0.0
    with pytest.raises(NormalizationError):
        localization_norm(np.ones(4), 0.25)


@pytest.mark.parametrize("seed", range(10))
def test_localization_matches_subset_enumeration(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 11))
    v = complex_gaussian(rng, n)
    v /= np.linalg.norm(v)
    for eps in (0.1, 0.3, 0.5):
        assert localization_norm(v, eps) == brute_localization(v, eps) or \
            abs(localization_norm(v, eps) - brute_localization(v, eps)) <= 1e-15


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 40))
def test_localization_monotone(seed, n):
    v = complex_gaussian(np.random.default_rng(seed), n)
    v /= np.linalg.norm(v)
    curve = [localization_norm(v, e) for e in np.linspace(1.0 / n, 1.0, 12)]
    assert all(a <= b + 1e-15 for a, b in zip(curve, curve[1:]))
    assert curve[-1] == pytest.approx(1.0)


def test_set_size_rounding():
    assert set_size(0.125, 64) == 8
    assert set_size(0.3, 10) == 3
    assert set_size(0.31, 10) == 4


def test_loc_event_examples():
    reports = deloc_profile(np.eye(4), [0.25])
    assert loc_event(reports, 0.25, 0.5)
    uniform = [deloc_report(np.ones(4) / 2, [0.25])]
    assert not loc_event(uniform, 0.25, 0.4)
    assert not loc_event(reports, 0.25, 0.0)
    with pytest.raises(ParameterError):
        loc_event([], 0.25, 0.1)


def test_deloc_report_fields(rng):
    A = complex_gaussian(rng, 12, 12)
    reps = deloc_profile(A, [0.5, 0.1, 0.25])
    assert len(reps) == 12
    for r in reps:
        masses = [m for _, m in r.localization_curve]
        assert masses == sorted(masses) and masses[-1] <= 1.0
        assert r.sup_norm <= 1.0 and r.min_mass(0.25) == masses[1]


def test_reduction_identity_certified():
    res = reduction_audit(np.eye(4), 0.25, 0.1, 1.1)
    assert res.verdict == "certified"
    assert res.s_min <= 8 * 1.1 * 0.1 * 2 + 1e-12
    assert res.bound == pytest.approx(8 * 1.1 * 0.1 * 2)


def test_reduction_not_applicable_and_unbounded():
    # cyclic shift: distinct eigenvalues, Fourier eigenvectors with |v_j| = 1/2
    P = np.roll(np.eye(4), 1, axis=1)
    res = reduction_audit(P, 0.25, 0.1, 1.1)
    assert res.verdict == "not_applicable" and res.holds
    assert reduction_audit(10 * np.eye(4), 0.25, 0.1, 1.1).verdict == "skipped_unbounded"
    with pytest.raises(ParameterError):
        reduction_audit(np.eye(4), 0.25, 0.7, 1.1)


def test_reduction_random_gaussian(rng):
    for _ in range(50):
        A = complex_gaussian(rng, 32, 32) / math.sqrt(2)
        res = reduction_audit(A, 0.25, 1e-3, 3.0)
        assert res.holds and res.verdict == "not_applicable"


def test_second_moment_examples(rng):
    r = neg_second_moment_audit(np.eye(2))
    assert (r.lhs, r.rhs) == (pytest.approx(2.0), pytest.approx(2.0))
    r = neg_second_moment_audit(np.diag([2.0, 1.0]))
    assert (r.lhs, r.rhs) == (pytest.approx(1.25), pytest.approx(1.25))
    assert neg_second_moment_audit(complex_gaussian(rng, 7, 4)).gap <= 1e-8
    with pytest.raises(SingularityError):
        neg_second_moment_audit(np.array([[1.0, 2.0], [2.0, 4.0], [0.0, 0.0]]))


def test_row_deletion(rng):
    for _ in range(20):
        assert row_deletion_audit(complex_gaussian(rng, 7, 4)).violations == 0


def test_split_examples(rng):
    sp = split_spectral_subspaces(np.diag([3.0, 0.1]), 1.0)
    assert sp.minus_dim == 1 and sp.plus_dim == 1
    assert abs(abs(sp.minus_basis[1, 0]) - 1.0) < 1e-12
    assert split_spectral_subspaces(np.diag([3.0, 2.0]), 0.5).minus_dim == 0
    B = complex_gaussian(rng, 5, 8)
    sp = split_spectral_subspaces(B, 1.5)
    assert sp.minus_dim + sp.plus_dim == 8
    W = np.hstack([sp.minus_basis, sp.plus_basis])
    np.testing.assert_allclose(W.conj().T @ W, np.eye(8), atol=1e-12)
    assert plus_lower_bound_violations(B, sp, 100) == 0


def test_decomposition_examples():
    for A in (np.eye(2), np.diag([2.0, 1.0])):
        res = decomposition_bound_audit(A, 1)
        assert res.holds
        assert res.bound == pytest.approx(0.25)
    with pytest.raises(ParameterError):
        decomposition_bound_audit(np.eye(2), 1, threshold=5.0)
    with pytest.raises(ParameterError):
        decomposition_bound_audit(np.eye(3), 0)


def test_decomposition_random(rng):
    for _ in range(100):
        n = int(rng.integers(2, 13))
        A = complex_gaussian(rng, n + int(rng.integers(0, 4)), n)
        row = int(rng.integers(1, A.shape[0]))
        B = A[:row]
        s = np.sort(np.concatenate([np.linalg.svd(B, compute_uv=False), np.zeros(max(0, n - row))]))
        thr = float(rng.uniform(s[0], s[-1])) if s[-1] > s[0] else None
        if thr is not None and (thr <= 0 or np.all(s <= thr) or np.all(s > thr)):
            thr = interior_threshold(B)
        assert decomposition_bound_audit(A, row, thr).holds


def test_smin_zero_ensemble():
    spec = EnsembleSpec(6, 6, point_mass(0.0))
    recs = smin_experiment(spec, 0.5, 0.3 + 0.4j, 3, seed=1)
    assert all(r.metrics["smin_scaled"] * math.sqrt(6) == pytest.approx(0.5) for r in recs)
    recs = smin_experiment(spec, 0.5, 0.0, 1, seed=1)
    assert recs[0].metrics["smin_scaled"] == 0.0


def test_smin_reproducible_and_calibrated():
    spec = EnsembleSpec(64, 64, Gaussian())
    a = smin_experiment(spec, 0.125, 0, 1, seed=3)
    b = smin_experiment(spec, 0.125, 0, 1, seed=3)
    assert a[0].metrics == b[0].metrics and a[0].flags == b[0].flags
    recs = smin_experiment(spec, 0.125, 0, 50, seed=10)
    med = float(np.median([r.metrics["smin_scaled"] for r in recs]))
    assert 0.01 <= med <= 0.2


def test_distance_empty_subspace():
    spec = EnsembleSpec(5, 5, Gaussian())
    for r in distance_experiment(spec, 1.0, 3, seed=2):
        assert r.metrics["dist"] == pytest.approx(r.metrics["dist_scaled"] * math.sqrt(5))
        assert r.flags["bounded"]


def test_distance_tail_curve():
    recs = distance_experiment(EnsembleSpec(40, 40, Gaussian()), 0.2, 60, seed=3)
    curve = summarize(recs, "dist_scaled", np.linspace(0.1, 3, 12)).empirical_prob
    assert curve == sorted(curve)
    sign = distance_experiment(EnsembleSpec(40, 40, SymmetricSign()), 0.2, 200, seed=4)
    assert summarize(sign, "dist_scaled", [0.01]).empirical_prob[0] <= 0.05


def test_kernel_experiment_edges():
    spec = EnsembleSpec(24, 24, SymmetricSign())
    assert kernel_lcd_experiment(spec, 0.25, 0, seed=0) == []
    recs = kernel_lcd_experiment(spec, 0.25, 1, seed=0, n_starts=4)
    assert recs[0].metrics["kernel_dim"] == 6
    assert recs[0].metrics["lcd_upper"] > 0.5 * math.sqrt(24)


def test_planted_kernel_control():
    est = planted_kernel_control(24, 0.25, seed=0)
    assert est.value <= math.sqrt(24) + 1e-2


def test_deloc_trial_metrics():
    spec = EnsembleSpec(16, 16, Gaussian())
    metrics, flags = deloc_trial(1, spec, (0.125, 0.5), 0.125, 1e-3)
    assert metrics["min_loc_norm@0.125"] == metrics["min_loc_norm"]
    assert metrics["min_loc_norm@0.125"] <= metrics["min_loc_norm@0.5"]
    assert flags["loc_and_bounded"] == (flags["loc"] and flags["bounded"])


def test_audit_trials_pass():
    for seed in range(10):
        _, flags = audit_trial(seed, 8)
        assert flags["audit_passed"], flags
