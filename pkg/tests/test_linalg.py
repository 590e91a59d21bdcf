"""Matrix primitives: definiteness tests, rank factors, stability, roots."""

import numpy as np
import pytest

from leechsolve.errors import DefinitenessError, DimensionError
from leechsolve.linalg import (
    as_cmatrix,
    herm,
    hermitian_posdef_check,
    is_schur_stable,
    minimal_rank_factor,
    singular_extremes,
    spectral_norm,
    sqrtm_posdef,
)


def random_complex(rng, rows, cols):
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


class TestPosdefCheck:
    def test_identity_is_pd(self):
        assert hermitian_posdef_check(np.eye(2), tol=1e-10)

    def test_zero_is_not_strictly_positive(self):
        assert not hermitian_posdef_check(np.array([[0.0]]), tol=1e-10)

    def test_two_by_two_with_known_eigenvalues(self):
        # eigenvalues 1 and 3
        assert hermitian_posdef_check(np.array([[2.0, 1.0], [1.0, 2.0]]), tol=1e-10)

    def test_non_square_raises(self):
        with pytest.raises(DimensionError):
            hermitian_posdef_check(np.zeros((2, 3)))

    def test_non_hermitian_fails(self):
        assert not hermitian_posdef_check(np.array([[1.0, 1.0], [0.0, 1.0]]))

    def test_sum_of_pd_is_pd(self):
        rng = np.random.default_rng(0)
        for _ in range(8):
            F = random_complex(rng, 3, 3)
            G = random_complex(rng, 3, 3)
            M = F @ F.conj().T + 0.1 * np.eye(3)
            N = G @ G.conj().T + 0.1 * np.eye(3)
            assert hermitian_posdef_check(M)
            assert hermitian_posdef_check(N)
            assert hermitian_posdef_check(M + N)

    def test_empty_matrix_is_pd(self):
        assert hermitian_posdef_check(np.zeros((0, 0)))


class TestMinimalRankFactor:
    def test_diagonal_rank_one(self):
        F = minimal_rank_factor(np.diag([0.0, 1.0]))
        assert F.shape == (2, 1)
        np.testing.assert_allclose(F @ F.conj().T, np.diag([0.0, 1.0]), atol=1e-12)

    def test_zero_matrix_gives_empty_factor(self):
        F = minimal_rank_factor(np.zeros((3, 3)))
        assert F.shape == (3, 0)

    def test_reconstruction_of_random_gram(self):
        rng = np.random.default_rng(1)
        F0 = random_complex(rng, 4, 2)
        M = F0 @ F0.conj().T
        F = minimal_rank_factor(M)
        assert F.shape == (4, 2)
        np.testing.assert_allclose(F @ F.conj().T, M, atol=1e-10)

    def test_indefinite_raises(self):
        with pytest.raises(DefinitenessError):
            minimal_rank_factor(np.diag([1.0, -1.0]))

    def test_columns_ordered_by_decreasing_weight(self):
        F = minimal_rank_factor(np.diag([1.0, 9.0, 4.0]))
        norms = np.linalg.norm(F, axis=0)
        assert np.all(np.diff(norms) <= 0)
        np.testing.assert_allclose(norms, [3.0, 2.0, 1.0], atol=1e-12)


class TestSchurStable:
    def test_zero_matrix(self):
        assert is_schur_stable(np.zeros((3, 3)))

    def test_eigenvalue_on_circle(self):
        assert not is_schur_stable(np.array([[1.0]]))

    def test_defective_triangular(self):
        # non-normal but rho = 0.9
        assert is_schur_stable(np.array([[0.9, 1.0], [0.0, 0.9]]))

    def test_unstable(self):
        assert not is_schur_stable(np.array([[1.2, 0.0], [0.0, 0.1]]))

    def test_empty(self):
        assert is_schur_stable(np.zeros((0, 0)))

    def test_unitary_similarity_invariance(self):
        rng = np.random.default_rng(2)
        A = np.array([[0.7, 0.4], [0.0, -0.6]], dtype=complex)
        for _ in range(6):
            U, _ = np.linalg.qr(random_complex(rng, 2, 2))
            assert is_schur_stable(U @ A @ U.conj().T)

    def test_non_square_raises(self):
        with pytest.raises(DimensionError):
            is_schur_stable(np.zeros((2, 3)))


class TestRootsAndNorms:
    def test_sqrtm_posdef_squares_back(self):
        rng = np.random.default_rng(3)
        F = random_complex(rng, 4, 4)
        M = herm(F @ F.conj().T + 0.5 * np.eye(4))
        S = sqrtm_posdef(M)
        np.testing.assert_allclose(S @ S, M, atol=1e-11)
        np.testing.assert_allclose(S, S.conj().T, atol=1e-12)

    def test_sqrtm_rejects_non_pd(self):
        with pytest.raises(DefinitenessError):
            sqrtm_posdef(np.diag([1.0, -0.5]))

    def test_spectral_norm_matches_svd(self):
        rng = np.random.default_rng(4)
        for shape in ((3, 5), (5, 3), (4, 4)):
            M = random_complex(rng, *shape)
            assert spectral_norm(M) == pytest.approx(np.linalg.norm(M, 2), rel=1e-10)

    def test_singular_extremes_match_svd(self):
        rng = np.random.default_rng(5)
        M = random_complex(rng, 5, 3)
        smin, smax = singular_extremes(M)
        sv = np.linalg.svd(M, compute_uv=False)
        assert smax == pytest.approx(sv[0], rel=1e-10)
        assert smin == pytest.approx(sv[-1], rel=1e-8, abs=1e-12)

    def test_as_cmatrix_rejects_nan(self):
        with pytest.raises(DimensionError):
            as_cmatrix(np.array([[np.nan]]), "M")
