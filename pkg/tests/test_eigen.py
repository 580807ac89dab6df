import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nogaps.densela import eigenpairs, hessenberg, operator_norm, schur
from nogaps.errors import ShapeError

from conftest import complex_gaussian


def test_identity():
    res = eigenpairs(np.eye(2))
    np.testing.assert_allclose(res.values, [1, 1])
    np.testing.assert_allclose(np.linalg.norm(res.vectors, axis=0), 1.0)


def test_jordan_block_is_flagged():
    res = eigenpairs(np.array([[0.0, 1.0], [0.0, 0.0]]))
    np.testing.assert_allclose(res.values, [0, 0], atol=1e-12)
    assert res.defective.all()
    for _, v in res.pairs:
        assert abs(abs(v[0]) - 1.0) < 1e-8


def test_real_matrix_conjugate_pairs(rng):
    A = rng.standard_normal((6, 6))
    res = eigenpairs(A, tol=1e-10)
    for lam in res.values:
        assert np.min(np.abs(res.values - np.conj(lam))) <= 1e-10 * operator_norm(A)
    assert np.all(res.residuals <= 1e-10 * operator_norm(A))


def test_hessenberg_and_schur(rng):
    A = complex_gaussian(rng, 9, 9)
    H, Q = hessenberg(A)
    assert np.allclose(np.tril(H, -2), 0)
    np.testing.assert_allclose(Q.conj().T @ A @ Q, H, atol=1e-12 * 10 * operator_norm(A))
    T, Z = schur(A)
    assert np.allclose(np.tril(T, -1), 0, atol=1e-12 * operator_norm(A))
    np.testing.assert_allclose(Z @ T @ Z.conj().T, A, atol=1e-11 * operator_norm(A))


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 24))
def test_eigen_residuals_and_spectrum(seed, n):
    rng = np.random.default_rng(seed)
    A = complex_gaussian(rng, n, n)
    res = eigenpairs(A, tol=1e-8)
    assert len(res) == n
    assert np.all(res.residuals <= 1e-8 * operator_norm(A))
    np.testing.assert_allclose(np.linalg.norm(res.vectors, axis=0), 1.0, atol=1e-12)
    # compare spectra with LAPACK through a sorted matching
    ref = np.linalg.eigvals(A)
    for lam in res.values:
        assert np.min(np.abs(ref - lam)) <= 1e-8 * max(1.0, operator_norm(A))


def test_symmetric_sign_matrix_128(rng):
    A = rng.choice([-1.0, 1.0], size=(128, 128))
    res = eigenpairs(A)
    assert np.all(res.residuals <= 1e-8 * operator_norm(A))


def test_zero_matrix_and_shape_errors():
    res = eigenpairs(np.zeros((3, 3)))
    np.testing.assert_array_equal(res.values, 0)
    with pytest.raises(ShapeError):
        eigenpairs(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        eigenpairs(np.eye(2), tol=0)
