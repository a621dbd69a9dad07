import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sparse_ar1 import (
    Ar1Params,
    TimeGrid,
    TridiagSym,
    ValidationError,
    build_covariance,
    build_cross_covariance,
    build_precision,
    rho_pow,
)
from sparse_ar1.core import BandLowerBi, mean_vector, one_minus_rho_pow2

from conftest import random_grid, random_params


class TestValidation:
    @pytest.mark.parametrize("rho", [1.0, -1.0, 1.5, float("nan"), float("inf")])
    def test_rho_out_of_range(self, rho):
        with pytest.raises(ValidationError, match=r"\|rho\| < 1"):
            Ar1Params(rho, 1.0)

    @pytest.mark.parametrize("sigma", [0.0, -1.0, float("nan")])
    def test_sigma_not_positive(self, sigma):
        with pytest.raises(ValidationError, match="sigma"):
            Ar1Params(0.5, sigma)

    def test_rho_zero_accepted(self):
        q = build_precision(Ar1Params(0.0, 2.0), [0, 3, 4, 10])
        np.testing.assert_array_equal(q.diag, 0.25)
        np.testing.assert_array_equal(q.offdiag, 0.0)

    @pytest.mark.parametrize("times", [[1, 1], [3, 2], [], [[1, 2]], [1.5, 2.0]])
    def test_bad_grids(self, times):
        with pytest.raises(ValidationError):
            TimeGrid(times)

    def test_integral_floats_accepted(self):
        assert TimeGrid([1.0, 4.0]).times.dtype == np.int64

    def test_tridiag_invariants(self):
        with pytest.raises(ValidationError, match="offdiag"):
            TridiagSym([1.0, 1.0], [0.1, 0.2])
        with pytest.raises(ValidationError, match="positive"):
            TridiagSym([1.0, 0.0], [0.1])
        with pytest.raises(ValidationError):
            BandLowerBi([1.0, -1.0], [0.0])

    def test_mean_vector(self):
        np.testing.assert_array_equal(mean_vector(2.5, 3), [2.5, 2.5, 2.5])
        np.testing.assert_array_equal(mean_vector([1, 2], 2), [1.0, 2.0])
        with pytest.raises(ValidationError, match="length"):
            mean_vector([1.0, 2.0], 3)

    def test_json_round_trip(self):
        q = build_precision(Ar1Params(0.3, 1.7), [0, 2, 7, 8])
        back = TridiagSym.from_json(q.to_json())
        np.testing.assert_array_equal(back.diag, q.diag)
        np.testing.assert_array_equal(back.offdiag, q.offdiag)
        with pytest.raises(ValidationError, match="dim"):
            TridiagSym.from_json({"dim": 5, "diag": [1.0], "offdiag": []})


class TestRhoPow:
    def test_zero_exponent(self):
        assert rho_pow(0.5, 0) == 1.0

    def test_negative_base_odd(self):
        assert rho_pow(-0.5, 3) == -0.125

    def test_large_exponent_matches_high_precision(self):
        mpmath.mp.dps = 50
        expected = float(mpmath.exp(500 * mpmath.log(mpmath.mpf("0.9"))))
        assert rho_pow(0.9, 500) == pytest.approx(expected, rel=1e-12)

    def test_underflow_is_zero(self):
        assert rho_pow(0.5, 10**6) == 0.0
        assert rho_pow(-0.5, 10**6 + 1) == 0.0

    def test_one_minus_near_unit_rho(self):
        rho = 1.0 - 1e-12
        mpmath.mp.dps = 50
        expected = float(1 - mpmath.mpf(rho) ** 2)
        assert one_minus_rho_pow2(rho, 1) == pytest.approx(expected, rel=1e-9)

    def test_array_exponents(self):
        np.testing.assert_allclose(rho_pow(-0.5, np.array([0, 1, 2])), [1.0, -0.5, 0.25])


class TestBuildPrecision:
    def test_unit_gap_fixture(self):
        q = build_precision(Ar1Params(0.5, 1.0), [1, 2, 3])
        np.testing.assert_allclose(q.diag, [1.0, 1.25, 1.0], rtol=0, atol=1e-15)
        np.testing.assert_allclose(q.offdiag, [-0.5, -0.5], rtol=0, atol=1e-15)

    def test_gap_two(self):
        # inverse of (1/0.75) [[1, 0.25], [0.25, 1]]
        q = build_precision(Ar1Params(0.5, 1.0), [1, 3])
        np.testing.assert_allclose(q.diag, [0.8, 0.8], rtol=1e-15)
        np.testing.assert_allclose(q.offdiag, [-0.2], rtol=1e-15)

    def test_single_point(self):
        q = build_precision(Ar1Params(0.7, 2.0), [1])
        assert q.dim == 1
        assert q.diag[0] == pytest.approx(0.1275, rel=1e-15)
        assert q.offdiag.size == 0

    def test_matches_paper_ratio_form(self, rng):
        # the interior diagonal is computed as r_i + rho^(2 g_{i-1}) r_{i-1};
        # compare with the undivided ratio written out in full
        for _ in range(50):
            params = random_params(rng, rho_max=0.9, sigma_range=(1.0, 1.0))
            grid = random_grid(rng, int(rng.integers(3, 30)), max_gap=10)
            q = build_precision(params, grid)
            rho, g = params.rho, grid.gaps
            c = 1 - rho**2
            interior = c * (1 - rho ** (2 * (g[:-1] + g[1:]))) / (
                (1 - rho ** (2 * g[:-1])) * (1 - rho ** (2 * g[1:]))
            )
            np.testing.assert_allclose(q.diag[1:-1], interior, rtol=1e-11)
            np.testing.assert_allclose(q.diag[0], c / (1 - rho ** (2 * g[0])), rtol=1e-12)
            np.testing.assert_allclose(q.diag[-1], c / (1 - rho ** (2 * g[-1])), rtol=1e-12)
            np.testing.assert_allclose(q.offdiag, -c * rho**g / (1 - rho ** (2 * g)), rtol=1e-11)

    def test_inverts_covariance(self, rng):
        for _ in range(40):
            params = random_params(rng)
            grid = random_grid(rng, int(rng.integers(1, 120)))
            q = build_precision(params, grid).to_dense()
            sigma = build_covariance(params, grid)
            np.testing.assert_allclose(q @ sigma, np.eye(grid.m), rtol=0, atol=1e-8)

    def test_reduced_system(self, rng):
        # Sigma Q = I restricted to the tridiagonal unknowns, scaled by sigma^2
        for _ in range(40):
            params = random_params(rng)
            grid = random_grid(rng, int(rng.integers(2, 60)))
            q = build_precision(params, grid)
            s2, rho, g = params.sigma**2, params.rho, grid.gaps
            d, o = q.diag * s2, q.offdiag * s2
            c = 1 - rho**2
            assert abs(d[0] + rho ** g[0] * o[0] - c) < 1e-12
            assert abs(rho ** g[0] * d[0] + o[0]) < 1e-12
            for k in range(1, grid.m - 1):
                assert abs(rho ** g[k - 1] * o[k - 1] + d[k] + rho ** g[k] * o[k] - c) < 1e-12
                assert abs(rho ** (g[k - 1] + g[k]) * o[k - 1] + rho ** g[k] * d[k] + o[k]) < 1e-12
            assert abs(rho ** g[-1] * o[-1] + d[-1] - c) < 1e-12

    def test_large_gap_independence_limit(self):
        params = Ar1Params(0.5, 3.0)
        q = build_precision(params, [0, 5000, 10000])
        np.testing.assert_allclose(q.diag, 0.75 / 9.0, rtol=1e-15)
        np.testing.assert_array_equal(q.offdiag, 0.0)

    def test_near_unit_rho_stays_positive(self):
        q = build_precision(Ar1Params(1 - 1e-10, 1.0), [0, 1, 3, 1000])
        assert np.all(np.isfinite(q.diag)) and np.all(q.diag > 0)

    def test_linear_memory(self):
        q = build_precision(Ar1Params(0.5, 1.0), np.arange(100_000))
        assert q.diag.nbytes + q.offdiag.nbytes < 2 * 8 * 100_000


grids = st.lists(st.integers(1, 40), min_size=0, max_size=25).map(
    lambda gaps: TimeGrid(np.concatenate([[0], np.cumsum(gaps)]).astype(np.int64))
)
rhos = st.floats(-0.95, 0.95, allow_nan=False)


@settings(max_examples=100, deadline=None)
@given(rho=rhos, grid=grids)
def test_sign_symmetry(rho, grid):
    a = build_precision(Ar1Params(rho, 1.3), grid)
    b = build_precision(Ar1Params(-rho, 1.3), grid)
    np.testing.assert_array_equal(a.diag, b.diag)
    odd = grid.gaps % 2 == 1
    np.testing.assert_array_equal(b.offdiag[odd], -a.offdiag[odd])
    np.testing.assert_array_equal(b.offdiag[~odd], a.offdiag[~odd])


@settings(max_examples=100, deadline=None)
@given(rho=rhos, grid=grids, c=st.floats(0.1, 10.0))
def test_scale_rule(rho, grid, c):
    a = build_precision(Ar1Params(rho, 1.0), grid)
    b = build_precision(Ar1Params(rho, c), grid)
    np.testing.assert_allclose(b.diag, a.diag / c**2, rtol=1e-14)
    np.testing.assert_allclose(b.offdiag, a.offdiag / c**2, rtol=1e-14, atol=1e-300)
    sa = build_covariance(Ar1Params(rho, 1.0), grid)
    sb = build_covariance(Ar1Params(rho, c), grid)
    np.testing.assert_allclose(sb, sa * c**2, rtol=1e-14, atol=1e-300)


@settings(max_examples=60, deadline=None)
@given(rho=rhos, n=st.integers(2, 50), sigma=st.floats(0.1, 10.0))
def test_unit_gap_grid_reproduces_regular_precision(rho, n, sigma):
    q = build_precision(Ar1Params(rho, sigma), np.arange(n))
    expected = np.full(n, 1 + rho**2)
    expected[[0, -1]] = 1.0
    np.testing.assert_allclose(q.diag * sigma**2, expected, rtol=0, atol=1e-15)
    np.testing.assert_allclose(q.offdiag * sigma**2, -rho, rtol=0, atol=1e-15)


class TestCovariance:
    def test_gap_two(self):
        s = build_covariance(Ar1Params(0.5, 1.0), [1, 3])
        np.testing.assert_allclose(s, [[4 / 3, 1 / 3], [1 / 3, 4 / 3]], rtol=1e-15)

    def test_single_point(self):
        s = build_covariance(Ar1Params(-0.3, 2.0), [7])
        np.testing.assert_allclose(s, [[4.0 / 0.91]], rtol=1e-15)

    def test_entrywise(self):
        times = (2, 5, 6)
        s = build_covariance(Ar1Params(0.6, 1.0), times)
        for i, a in enumerate(times):
            for j, b in enumerate(times):
                assert s[i, j] == pytest.approx(0.6 ** abs(a - b) / (1 - 0.36), rel=1e-14)
        np.testing.assert_array_equal(s, s.T)

    def test_cap(self):
        with pytest.raises(ValidationError, match="cap"):
            build_covariance(Ar1Params(0.5), np.arange(11), cap=10)
        assert build_covariance(Ar1Params(0.5), np.arange(11), cap=11).shape == (11, 11)

    def test_cross(self):
        p = Ar1Params(0.5, 1.0)
        np.testing.assert_allclose(build_cross_covariance(p, [2], [1, 3]), [[2 / 3, 2 / 3]], rtol=1e-15)
        np.testing.assert_allclose(
            build_cross_covariance(p, [10], [1]), [[0.5**9 / 0.75]], rtol=1e-15
        )
        grid = [0, 3, 4]
        np.testing.assert_array_equal(build_cross_covariance(p, grid, grid), build_covariance(p, grid))

    def test_cross_cap(self):
        with pytest.raises(ValidationError, match="cap"):
            build_cross_covariance(Ar1Params(0.5), [0], np.arange(20), cap=10)


def test_stationary_variance():
    p = Ar1Params(0.4, 2.0)
    assert p.marginal_variance == pytest.approx(4.0 / (1 - 0.16))
    assert math.isclose(build_covariance(p, [0])[0, 0], p.marginal_variance)
