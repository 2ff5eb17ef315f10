"""Tests for smooth Orlicz functions and generalized Luxemburg norms.

Expected values come from independent oracles computed in this file:
scipy.integrate.quad for normalization constants (benign widths), mpmath
exponential integrals for the log-space evaluation (thin widths), dense
grid scans for one-dimensional Luxemburg infima, and closed-form p-norms
for power families.
"""

import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from smoothnorm.errors import ParameterError
from smoothnorm.orlicz import (
    OrliczFamily,
    check_lemma1_bounds,
    luxemburg_norm,
    make_orlicz,
    orlicz_eval,
)

# Frozen from the quad oracle below: 1.5 / int_0.5^1 exp(-1/(s-0.5)) ds.
SCALE_HALF_ONE = 79.92697483562232


def quad_scale(a, b, margin=0.5):
    """Independent normalization oracle: (1+margin)/int_a^b exp(-1/(s-a))."""
    val, err = quad(lambda s: math.exp(-1.0 / (s - a)) if s > a else 0.0,
                    a, b, epsabs=1e-14, epsrel=1e-12, limit=200)
    assert err < 1e-12
    return (1.0 + margin) / val


class TestMakeOrlicz:
    def test_value_at_exceed_threshold_is_one_plus_margin(self):
        f = make_orlicz(0.5, 1.0)
        assert f(1.0) == 1.5

    def test_flat_region_exact_zero(self):
        f = make_orlicz(0.5, 1.0)
        assert f(0.0) == 0.0
        assert f(0.25) == 0.0
        assert f(0.5) == 0.0
        assert orlicz_eval(f, 0.3, order=1) == 0.0
        assert orlicz_eval(f, 0.5, order=2) == 0.0

    def test_scale_against_quad_oracle(self):
        f = make_orlicz(0.5, 1.0)
        np.testing.assert_allclose(f.scale, quad_scale(0.5, 1.0), rtol=1e-10)
        np.testing.assert_allclose(f.scale, SCALE_HALF_ONE, rtol=1e-12)
        g = make_orlicz(1.0, 2.0)
        np.testing.assert_allclose(g.scale, quad_scale(1.0, 2.0), rtol=1e-10)

    def test_value_against_quad_oracle_midpoints(self):
        f = make_orlicz(0.5, 1.0)
        for t in [0.6, 0.75, 0.9, 1.3, 2.0]:
            ref, err = quad(lambda s: math.exp(-1.0 / (s - 0.5)), 0.5, t,
                            epsabs=1e-15, epsrel=1e-13, limit=200)
            np.testing.assert_allclose(f(t), quad_scale(0.5, 1.0) * ref,
                                       rtol=1e-9)

    def test_thin_width_against_mpmath_oracle(self):
        """Widths ~1e-3 underflow direct quadrature; the log-space route
        must still match arbitrary-precision exponential integrals."""
        mp.mp.dps = 60
        a, b = 0.94, 0.9412
        f = make_orlicz(a, b)

        def mp_value(t):
            g = lambda x: mp.mpf(x) * mp.expint(2, 1 / mp.mpf(x))
            return float(mp.mpf(1.5) * g(t - a) / g(b - a))

        for t in [0.9403, 0.9406, 0.941, 0.9412, 0.95, 1.0]:
            np.testing.assert_allclose(f(t), mp_value(t), rtol=1e-10)

    def test_cached_per_threshold_pair(self):
        assert make_orlicz(0.5, 1.0) is make_orlicz(0.5, 1.0)

    def test_bad_thresholds_rejected(self):
        with pytest.raises(ParameterError):
            make_orlicz(1.0, 0.5)
        with pytest.raises(ParameterError):
            make_orlicz(0.0, 1.0)
        with pytest.raises(ParameterError):
            make_orlicz(0.5, 1.0, exceed_margin=0.0)

    def test_unbounded_growth(self):
        f = make_orlicz(0.5, 1.0)
        ts = np.array([1.0, 2.0, 5.0, 10.0, 100.0, 1000.0])
        vals = f(ts)
        assert np.all(np.diff(vals) > 0)
        assert vals[-1] > 1e4


class TestOrliczEval:
    def test_closed_form_first_derivative(self):
        f = make_orlicz(1.0, 2.0)
        expected = f.scale * math.exp(-1.0 / 0.5)
        np.testing.assert_allclose(orlicz_eval(f, 1.5, order=1), expected,
                                   rtol=1e-12)

    def test_first_derivative_vs_central_difference(self):
        f = make_orlicz(1.0, 2.0)
        h = 1e-6
        for t in [1.2, 1.5, 1.9, 2.5]:
            fd = (f(t + h) - f(t - h)) / (2.0 * h)
            assert abs(orlicz_eval(f, t, order=1) - fd) <= 1e-7 * max(1, fd)

    def test_second_derivative_vs_central_difference(self):
        f = make_orlicz(1.0, 2.0)
        h = 1e-5
        for t in [1.3, 1.5, 2.0]:
            fd = (f(t + h) - 2.0 * f(t) + f(t - h)) / h**2
            np.testing.assert_allclose(orlicz_eval(f, t, order=2), fd,
                                       rtol=1e-5)

    def test_convexity_second_derivative_nonnegative(self):
        f = make_orlicz(0.5, 1.0)
        ts = np.linspace(0.0, 3.0, 301)
        assert np.all(f(ts, order=2) >= 0.0)

    def test_negative_t_rejected(self):
        f = make_orlicz(0.5, 1.0)
        with pytest.raises(ParameterError):
            orlicz_eval(f, -0.1)

    def test_bad_order_rejected(self):
        f = make_orlicz(0.5, 1.0)
        with pytest.raises(ParameterError):
            orlicz_eval(f, 1.0, order=3)


def power_family(p, size):
    fn = lambda s: np.asarray(s, dtype=float) ** p
    return OrliczFamily([fn] * size)


class TestLuxemburgNorm:
    def test_power_family_is_p_norm(self):
        """phi_t(s) = s^p gives the plain p-norm, the closed-form anchor."""
        rng = np.random.default_rng(42)
        for p in (1.0, 2.0, 4.0):
            for dim in (1, 3, 8, 16):
                fam = power_family(p, dim)
                for _ in range(10):
                    c = rng.standard_normal(dim)
                    expected = np.sum(np.abs(c) ** p) ** (1.0 / p)
                    got = luxemburg_norm(fam, c)
                    np.testing.assert_allclose(got, expected, rtol=1e-9)

    def test_frozen_power_example(self):
        fam = power_family(2.0, 2)
        np.testing.assert_allclose(luxemburg_norm(fam, [3.0, 4.0]), 5.0,
                                   rtol=1e-9)

    def test_zero_vector(self):
        fam = power_family(2.0, 3)
        assert luxemburg_norm(fam, [0.0, 0.0, 0.0]) == 0.0

    def test_single_coordinate_grid_oracle(self):
        """1-d family phi = bump(1/1.1, 1): the norm solves phi(1/rho) = 1,
        rho in (1, 1.1).  Oracle: dense grid scan of the feasibility set."""
        f = make_orlicz(1.0 / 1.1, 1.0)
        fam = OrliczFamily([f])
        got = luxemburg_norm(fam, [1.0])
        rhos = np.linspace(1.0, 1.1, 100001)
        feas = f(1.0 / rhos) <= 1.0
        oracle = rhos[np.argmax(feas)]  # first feasible rho on the grid
        assert 1.0 < got < 1.1
        assert abs(got - oracle) <= 2e-5
        np.testing.assert_allclose(f(1.0 / got), 1.0, rtol=1e-6)

    def test_certified_feasibility_exact(self):
        """Modular at the returned value is <= 1 with no tolerance."""
        rng = np.random.default_rng(7)
        f = make_orlicz(0.5, 1.0)
        for dim in (1, 4, 9):
            fam = OrliczFamily([f] * dim)
            for _ in range(20):
                c = rng.standard_normal(dim) * rng.uniform(0.1, 10)
                res = luxemburg_norm(fam, c, full_output=True)
                assert fam.modular(np.abs(c) / res.value) <= 1.0
                assert res.modular_at_value <= 1.0
                assert fam.modular(np.abs(c) / res.lo) > 1.0

    def test_monotone_in_coordinates(self):
        rng = np.random.default_rng(3)
        f = make_orlicz(0.8, 1.2)
        fam = OrliczFamily([f] * 5)
        for _ in range(50):
            c = np.abs(rng.standard_normal(5))
            bigger = c + np.abs(rng.standard_normal(5)) * 0.5
            assert (luxemburg_norm(fam, c)
                    <= luxemburg_norm(fam, bigger) * (1 + 1e-9))

    def test_shape_mismatch_rejected(self):
        fam = power_family(2.0, 3)
        with pytest.raises(ParameterError):
            luxemburg_norm(fam, [1.0, 2.0])

    def test_empty_family_rejected(self):
        with pytest.raises(ParameterError):
            OrliczFamily([])


@st.composite
def vectors(draw, dim):
    vals = st.floats(min_value=-50.0, max_value=50.0,
                     allow_nan=False, allow_infinity=False)
    return np.asarray(draw(st.lists(vals, min_size=dim, max_size=dim)))


class TestLuxemburgNormAxioms:
    """Norm axioms as randomized properties at bracket precision."""

    @settings(max_examples=40, deadline=None)
    @given(c=vectors(4), lam=st.floats(min_value=-8.0, max_value=8.0,
                                       allow_nan=False))
    def test_homogeneity(self, c, lam):
        fam = OrliczFamily([make_orlicz(0.7, 1.3)] * 4)
        a = luxemburg_norm(fam, lam * c)
        b = abs(lam) * luxemburg_norm(fam, c)
        assert abs(a - b) <= 1e-9 * max(a, b, 1e-6)

    @settings(max_examples=40, deadline=None)
    @given(u=vectors(4), v=vectors(4))
    def test_triangle(self, u, v):
        fam = OrliczFamily([make_orlicz(0.7, 1.3)] * 4)
        lhs = luxemburg_norm(fam, u + v)
        rhs = luxemburg_norm(fam, u) + luxemburg_norm(fam, v)
        assert lhs <= rhs + 1e-9 * max(rhs, 1.0)


class TestLemma1Bounds:
    def test_bump_family_pinches_sup_norm(self):
        """phi(alpha) = 0, phi(beta) = 1.5 >= 1 forces
        alpha*||c||_phi <= ||c||_inf <= beta*||c||_phi."""
        rng = np.random.default_rng(11)
        alpha, beta = 0.5, 1.0
        fam = OrliczFamily([make_orlicz(alpha, beta)] * 6)
        vecs = [rng.standard_normal(6) * rng.uniform(0.01, 100)
                for _ in range(200)]
        report = check_lemma1_bounds(fam, alpha, beta, vecs)
        assert report.passed
        assert report.checked == 200

    def test_one_dimensional_known_value(self):
        alpha, beta = 1.0, 2.0
        fam = OrliczFamily([make_orlicz(alpha, beta)])
        report = check_lemma1_bounds(fam, alpha, beta, [np.array([3.0])])
        assert report.passed

    def test_precondition_violations_rejected(self):
        fam = OrliczFamily([make_orlicz(0.5, 1.0)])
        with pytest.raises(ParameterError):
            check_lemma1_bounds(fam, 0.7, 1.0, [])  # phi(0.7) != 0
        with pytest.raises(ParameterError):
            check_lemma1_bounds(fam, 0.5, 0.9, [])  # phi(0.9) < 1
        with pytest.raises(ParameterError):
            check_lemma1_bounds(fam, 1.0, 0.5, [])
