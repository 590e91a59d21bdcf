"""State-space realizations: evaluation, algebra, inversion, norms."""

import numpy as np
import pytest

from leechsolve.errors import DimensionError, NotInvertibleError, StabilityError
from leechsolve.generate import random_stable_matrix
from leechsolve.realization import (
    Realization,
    add,
    constant,
    evaluate,
    hconcat,
    hinf_norm_estimate,
    identity,
    inverse,
    product,
    taylor_blocks,
    vconcat,
    zeros,
)
from tests.conftest import circle_points, interior_points


def _random_realization(seed, out_dim, in_dim, n=3):
    rng = np.random.default_rng(seed)
    A = random_stable_matrix(rng, n)
    B = rng.standard_normal((n, in_dim)) + 1j * rng.standard_normal((n, in_dim))
    C = rng.standard_normal((out_dim, n)) + 1j * rng.standard_normal((out_dim, n))
    D = rng.standard_normal((out_dim, in_dim)) + 1j * rng.standard_normal((out_dim, in_dim))
    return Realization(A, B, C, D)


class TestEvaluate:
    def test_at_origin_gives_constant_term(self):
        F = _random_realization(1, 2, 3)
        np.testing.assert_allclose(evaluate(F, 0.0), F.D)

    def test_static_realization_is_constant(self):
        D = np.array([[1.0, 2.0]])
        F = constant(D)
        assert F.state_dim == 0
        np.testing.assert_allclose(evaluate(F, 0.7 + 0.1j), D)

    def test_scalar_geometric_series(self):
        # a = 0.5, b = c = 1, d = 0 gives F(z) = z / (1 - z/2); F(0.5) = 2/3
        F = Realization(np.array([[0.5]]), np.array([[1.0]]),
                        np.array([[1.0]]), np.array([[0.0]]))
        assert evaluate(F, 0.5)[0, 0] == pytest.approx(2.0 / 3.0, abs=1e-14)

    def test_taylor_blocks_of_scalar(self):
        F = Realization(np.array([[0.0]]), np.array([[1.0]]),
                        np.array([[0.5]]), np.array([[1.0]]))
        blocks = taylor_blocks(F, 3)
        np.testing.assert_allclose([b[0, 0] for b in blocks], [1.0, 0.5, 0.0])

    def test_taylor_series_sums_to_value(self):
        F = _random_realization(2, 2, 2)
        z = 0.3 - 0.2j
        blocks = taylor_blocks(F, 120)
        series = sum(b * z**j for j, b in enumerate(blocks))
        np.testing.assert_allclose(series, evaluate(F, z), atol=1e-12)


class TestAlgebra:
    @pytest.mark.parametrize("op,pointwise", [
        (add, lambda x, y: x + y),
        (product, lambda x, y: x @ y),
    ])
    def test_binary_ops_pointwise(self, op, pointwise):
        F = _random_realization(3, 2, 2)
        G = _random_realization(4, 2, 2)
        H = op(F, G)
        for z in list(circle_points(16)) + list(interior_points(16)):
            np.testing.assert_allclose(
                evaluate(H, z), pointwise(evaluate(F, z), evaluate(G, z)), atol=1e-10)

    def test_concatenations_pointwise(self):
        F = _random_realization(5, 2, 3)
        H = vconcat(_random_realization(7, 1, 3), F)
        W = hconcat(F, _random_realization(8, 2, 1))
        for z in interior_points(8):
            Fz = evaluate(F, z)
            assert evaluate(H, z).shape == (3, 3)
            np.testing.assert_allclose(evaluate(H, z)[1:], Fz, atol=1e-10)
            np.testing.assert_allclose(evaluate(W, z)[:, :3], Fz, atol=1e-10)

    def test_identity_is_neutral(self):
        F = _random_realization(9, 2, 2)
        H = product(F, identity(2))
        for z in interior_points(8):
            np.testing.assert_allclose(evaluate(H, z), evaluate(F, z), atol=1e-12)

    def test_zeros_annihilates(self):
        Z = zeros(2, 3)
        np.testing.assert_allclose(evaluate(Z, 0.4), np.zeros((2, 3)))

    def test_sum_at_origin(self):
        F = _random_realization(10, 2, 2)
        G = _random_realization(11, 2, 2)
        np.testing.assert_allclose(evaluate(add(F, G), 0.0), F.D + G.D)

    def test_dimension_mismatch_raises(self):
        with pytest.raises(DimensionError):
            add(_random_realization(1, 2, 2), _random_realization(2, 3, 2))
        with pytest.raises(DimensionError):
            product(_random_realization(1, 2, 2), _random_realization(2, 3, 2))


class TestInverse:
    def test_constant_inverse(self):
        D = np.array([[2.0, 0.0], [1.0, 4.0]])
        G = inverse(constant(D))
        np.testing.assert_allclose(evaluate(G, 0.3), np.linalg.inv(D), atol=1e-14)

    def test_pointwise_inverse(self):
        F = _random_realization(12, 3, 3)
        # make D well conditioned
        F = Realization(F.A, F.B, F.C, F.D + 4 * np.eye(3))
        G = inverse(F)
        for z in interior_points(12):
            np.testing.assert_allclose(
                evaluate(F, z) @ evaluate(G, z), np.eye(3), atol=1e-9)

    def test_double_inverse_round_trip(self):
        F = _random_realization(13, 2, 2)
        F = Realization(F.A, F.B, F.C, F.D + 3 * np.eye(2))
        H = inverse(inverse(F))
        for z in interior_points(8):
            np.testing.assert_allclose(evaluate(H, z), evaluate(F, z), atol=1e-9)

    def test_singular_constant_term_raises(self):
        F = _random_realization(14, 2, 2)
        F = Realization(F.A, F.B, F.C, np.zeros((2, 2)))
        with pytest.raises(NotInvertibleError):
            inverse(F)


class TestNorm:
    def test_constant_norm(self):
        D = np.array([[3.0, 0.0], [0.0, 1.0]])
        assert hinf_norm_estimate(constant(D)) == pytest.approx(3.0, abs=1e-12)

    def test_shift_has_norm_one(self):
        # F(z) = z
        F = Realization(np.array([[0.0]]), np.array([[1.0]]),
                        np.array([[1.0]]), np.array([[0.0]]))
        assert hinf_norm_estimate(F) == pytest.approx(1.0, abs=1e-12)

    def test_scalar_peak_on_circle(self):
        # F(z) = 1 + z peaks at z = 1 with value 2
        F = Realization(np.array([[0.0]]), np.array([[1.0]]),
                        np.array([[1.0]]), np.array([[1.0]]))
        assert hinf_norm_estimate(F, grid=512) == pytest.approx(2.0, rel=1e-3)

    def test_unstable_raises(self):
        F = Realization(np.array([[1.5]]), np.array([[1.0]]),
                        np.array([[1.0]]), np.array([[0.0]]))
        with pytest.raises(StabilityError):
            hinf_norm_estimate(F)


class TestTruncateBlocks:
    def test_block_count(self):
        F = _random_realization(15, 2, 3)
        blocks = taylor_blocks(F, 7)
        assert len(blocks) == 7
        assert all(b.shape == (2, 3) for b in blocks)
