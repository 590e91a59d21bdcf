"""Instance generator: determinism, kinds, dimension control, contractions."""

import numpy as np
import pytest

from leechsolve.core import solve, validate
from leechsolve.errors import InfeasibleError
from leechsolve.generate import random_contraction, random_problem
from leechsolve.realization import evaluate, hinf_norm_estimate
from leechsolve.toeplitz import OracleContext


class TestRandomProblem:
    def test_deterministic_per_seed(self):
        a, meta_a = random_problem(90)
        b, meta_b = random_problem(90)
        for name in ("A", "B1", "B2", "C", "D1", "D2"):
            assert np.array_equal(getattr(a, name), getattr(b, name))
        assert meta_a == meta_b

    def test_different_seeds_differ(self):
        a, _ = random_problem(91)
        b, _ = random_problem(92)
        assert not np.array_equal(a.A, b.A)

    def test_feasible_kind_solves(self):
        data, meta = random_problem(93)
        assert meta["margin_estimate"] > 0.0
        derived = solve(data)
        assert derived.margins["gap_min_eig"] > 0.0

    def test_infeasible_kind_fails(self):
        data, meta = random_problem(94, kind="infeasible")
        assert meta["margin_estimate"] < 0.0
        with pytest.raises(InfeasibleError):
            solve(data)

    def test_kernel_kind_zeroes_numerator(self):
        data, _ = random_problem(95, kind="kernel")
        assert not data.B2.any() and not data.D2.any()

    def test_corona_kind_structure(self):
        data, _ = random_problem(96, kind="corona")
        assert data.q == data.m
        assert not data.B2.any()
        np.testing.assert_allclose(data.D2, np.eye(data.m), atol=0.0)
        # corona scaling makes the truncated Gram matrix of G exceed I
        ctx = OracleContext(data, 80)
        assert ctx.margin > 1.0

    def test_requested_dimensions(self):
        data, meta = random_problem(97, dims=(3, 2, 3, 1))
        assert (data.n, data.m, data.p, data.q) == (3, 2, 3, 1)
        assert meta["dims"] == {"n": 3, "m": 2, "p": 3, "q": 1}

    def test_closed_loop_band_filter(self):
        _, meta = random_problem(98, closed_loop_band=(0.60, 0.93))
        assert 0.60 <= meta["closed_loop_radius"] <= 0.93

    def test_validation_always_passes(self):
        for seed in (90, 93, 95, 96):
            data, _ = random_problem(seed, kind="kernel" if seed == 95 else "feasible")
            assert validate(data).ok

    def test_meta_records_draw(self):
        _, meta = random_problem(99)
        assert meta["seed"] == 99
        assert meta["kind"] == "feasible"
        assert meta["attempt"] >= 1


class TestRandomContraction:
    def test_norm_bound(self):
        Y = random_contraction(1, 2, 3)
        assert hinf_norm_estimate(Y) <= 0.9 + 1e-9

    def test_constant_only(self):
        Y = random_contraction(2, 2, 2, constant_only=True)
        assert Y.state_dim == 0
        assert np.linalg.norm(evaluate(Y, 0.5), 2) == pytest.approx(0.9, abs=1e-12)

    def test_empty_sizes(self):
        Y = random_contraction(3, 0, 2)
        assert (Y.out_dim, Y.in_dim) == (0, 2)

    def test_deterministic(self):
        a = random_contraction(4, 2, 2)
        b = random_contraction(4, 2, 2)
        assert np.array_equal(a.D, b.D) and np.array_equal(a.C, b.C)

    def test_custom_bound(self):
        Y = random_contraction(5, 1, 1, norm_bound=0.5)
        assert hinf_norm_estimate(Y) <= 0.5 + 1e-9
