"""Tests for model spaces.

Oracles implemented here: brute-force subset maxima for lorentz_predual,
permutation maxima for lorentz, exhaustive disjoint selections for lap
modulars, and direct Hoelder pairings for duality checks.
"""

import itertools

import numpy as np
import pytest

from smoothnorm.errors import ParameterError
from smoothnorm.orlicz import make_orlicz
from smoothnorm.spaces import (
    dual_extreme_points,
    euclidean_space,
    find_norming_support,
    lap_space,
    lorentz_predual_space,
    lorentz_space,
    norming_functional,
    proj,
    space_norm,
    sup_space,
    support,
    orlicz_space,
)

GEOM3 = [1.0, 0.5, 0.25]
GEOM4 = [1.0, 0.5, 0.25, 0.125]


def predual_norm_oracle(w, y):
    """max over k and k-subsets of sum_sigma |y_i| / W_k, brute force."""
    w = np.asarray(w, float)
    y = np.abs(np.asarray(y, float))
    wsums = np.cumsum(w)
    best = 0.0
    for k in range(1, y.size + 1):
        for combo in itertools.combinations(range(y.size), k):
            best = max(best, y[list(combo)].sum() / wsums[k - 1])
    return best


def lorentz_norm_oracle(w, x):
    """max over injective assignments of sum_j w_j |x_{a_j}|."""
    w = np.asarray(w, float)
    x = np.abs(np.asarray(x, float))
    best = 0.0
    for perm in itertools.permutations(range(x.size)):
        best = max(best, float(np.dot(w, x[list(perm)])))
    return best


def lap_modular_oracle(sets, p, z):
    """max over disjoint selections B_n subset A_n of
    sum_n sum_{k in B_n} |z_k|^{p_n}; brute force over per-index choices
    (each index picks one containing set or none).  Powers come from one
    broadcast table so the scalar and vectorized ** paths agree."""
    z = np.abs(np.asarray(z, float))
    table = np.full((len(sets), z.size), np.nan)
    for n, s in enumerate(sets):
        table[n, list(s)] = p[n]
    with np.errstate(invalid="ignore"):
        powers = z[None, :] ** table
    choices = []
    for k in range(z.size):
        opts = [None] + [n for n, s in enumerate(sets) if k in s]
        choices.append(opts)
    best = -np.inf
    for assign in itertools.product(*choices):
        terms = np.zeros(z.size)
        for k, n in enumerate(assign):
            if n is not None:
                terms[k] = powers[n, k]
        best = max(best, float(np.sum(terms)))
    return best


class TestSupAndEuclidean:
    def test_sup_norm(self):
        X = sup_space(3)
        assert X.norm([1.0, -2.0, 0.5]) == 2.0
        assert X.dual_norm([1.0, -2.0, 0.5]) == 3.5

    def test_euclidean_self_dual(self):
        X = euclidean_space(2)
        np.testing.assert_allclose(X.norm([3.0, 4.0]), 5.0)
        np.testing.assert_allclose(X.dual_norm([3.0, 4.0]), 5.0)


class TestLorentzPredual:
    def test_frozen_example(self):
        X = lorentz_predual_space(GEOM3)
        np.testing.assert_allclose(X.norm([1.0, 1.0, 0.0]), 4.0 / 3.0,
                                   rtol=1e-15)

    def test_against_brute_force(self):
        rng = np.random.default_rng(42)
        X = lorentz_predual_space(GEOM4)
        for _ in range(100):
            y = rng.standard_normal(4)
            np.testing.assert_allclose(X.norm(y),
                                       predual_norm_oracle(GEOM4, y),
                                       rtol=1e-12)

    def test_weight_validation(self):
        with pytest.raises(ParameterError):
            lorentz_predual_space([0.5, 0.25])
        with pytest.raises(ParameterError):
            lorentz_predual_space([1.0, -0.5])


class TestLorentz:
    def test_sorted_weight_pairing(self):
        X = lorentz_space(GEOM3)
        # |x| ranked (3, 2, 1) -> 3 + 0.5*2 + 0.25*1
        np.testing.assert_allclose(X.norm([2.0, -3.0, 1.0]), 4.25)

    def test_against_permutation_oracle(self):
        rng = np.random.default_rng(5)
        X = lorentz_space(GEOM4)
        for _ in range(50):
            x = rng.standard_normal(4)
            np.testing.assert_allclose(X.norm(x),
                                       lorentz_norm_oracle(GEOM4, x),
                                       rtol=1e-12)

    def test_duality_with_predual(self):
        """|<h, y>| <= ||h||_d * ||y||_{d*} and the pairing is sharp over
        dual extreme points."""
        rng = np.random.default_rng(9)
        d = lorentz_space(GEOM4)
        dstar = lorentz_predual_space(GEOM4)
        ext = dual_extreme_points(dstar)  # d(w,1)-ball vertices
        for _ in range(50):
            y = rng.standard_normal(4)
            ny = dstar.norm(y)
            for _ in range(10):
                h = rng.standard_normal(4)
                h /= d.norm(h)
                assert abs(np.dot(h, y)) <= ny * (1 + 1e-9)
            np.testing.assert_allclose(np.max(ext @ y), ny, rtol=1e-12)


class TestLap:
    def test_frozen_two_level_example(self):
        X = lap_space([[0], [1, 2]], [1.0, 2.0], dim=3)
        np.testing.assert_allclose(X.norm([0.0, 1.0, 1.0]), np.sqrt(2.0),
                                   rtol=1e-9)

    def test_frozen_overlap_example(self):
        X = lap_space([[0, 1], [1, 2]], [1.0, 2.0], dim=3)
        np.testing.assert_allclose(X.norm([0.0, 0.5, 0.0]), 0.5, rtol=1e-9)

    def test_modular_equals_brute_force(self):
        """Per-index best exponent equals the max over disjoint
        selections, exactly (same floats, same summation order)."""
        rng = np.random.default_rng(21)
        for _ in range(30):
            dim = int(rng.integers(2, 7))
            nsets = int(rng.integers(1, 4))
            sets = []
            for _ in range(nsets):
                size = int(rng.integers(1, dim + 1))
                sets.append(sorted(rng.choice(dim, size=size,
                                              replace=False).tolist()))
            covered = sorted(set(itertools.chain.from_iterable(sets)))
            missing = [k for k in range(dim) if k not in covered]
            if missing:
                sets.append(missing)
            sets.sort(key=lambda s: min(s))
            p = np.sort(rng.uniform(1.0, 3.0, size=len(sets)))
            X = lap_space(sets, p, dim=dim)
            z = rng.standard_normal(dim) * 2.0
            assert X.lap_modular(z) == lap_modular_oracle(X.sets, p, z)

    def test_validation(self):
        with pytest.raises(ParameterError):
            lap_space([[0]], [1.0], dim=2)  # does not cover
        with pytest.raises(ParameterError):
            lap_space([[0], [1]], [2.0, 1.0], dim=2)  # not nondecreasing
        with pytest.raises(ParameterError):
            lap_space([[0], [1]], [0.5, 1.0], dim=2)  # p < 1


class TestNormAxioms:
    """Homogeneity and triangle inequality per kind at 1e-9."""

    def spaces(self):
        return [
            sup_space(5),
            euclidean_space(5),
            lorentz_space([1.0, 0.5, 0.25, 0.125, 0.0625]),
            lorentz_predual_space([1.0, 0.5, 0.25, 0.125, 0.0625]),
            lap_space([[0, 1], [1, 2, 3], [3, 4]], [1.0, 1.5, 2.0], dim=5),
            orlicz_space(make_orlicz(0.7, 1.4), 5),
        ]

    def test_homogeneity_and_triangle(self):
        rng = np.random.default_rng(12)
        for X in self.spaces():
            cheap = X.kind not in ("lap", "orlicz_hM")
            n = 1000 if cheap else 100
            for _ in range(n):
                u = rng.standard_normal(5)
                v = rng.standard_normal(5)
                lam = rng.uniform(-4, 4)
                nu, nv = X.norm(u), X.norm(v)
                assert abs(X.norm(lam * u) - abs(lam) * nu) <= 1e-9 * max(
                    nu, 1.0)
                assert X.norm(u + v) <= nu + nv + 1e-9 * max(nu + nv, 1.0)

    def test_monotone_unconditional(self):
        rng = np.random.default_rng(13)
        for X in self.spaces():
            assert X.monotone_unconditional
            for _ in range(40):
                x = rng.standard_normal(5)
                signs = rng.choice([-1.0, 1.0], size=5)
                assert abs(X.norm(x * signs) - X.norm(x)) <= 1e-9 * max(
                    X.norm(x), 1.0)
                sigma = rng.choice(5, size=3, replace=False)
                assert X.norm(proj(x, sigma)) <= X.norm(x) * (1 + 1e-9)


class TestProjections:
    def test_proj_zeroes_complement(self):
        out = proj([1.0, 2.0, 3.0], [0, 2])
        np.testing.assert_array_equal(out, [1.0, 0.0, 3.0])

    def test_out_of_range_rejected(self):
        with pytest.raises(ParameterError):
            proj([1.0, 2.0], [2])

    def test_support(self):
        np.testing.assert_array_equal(support([0.0, 1.0, 0.0, -2.0]), [1, 3])


class TestNormingSupport:
    def test_predual_frozen_example(self):
        X = lorentz_predual_space(GEOM3)
        y = np.array([0.75, 0.75, 0.0])
        np.testing.assert_allclose(X.norm(y), 1.0, rtol=1e-15)
        sigma = find_norming_support(X, y)
        np.testing.assert_array_equal(sigma, [0, 1])
        np.testing.assert_allclose(X.norm(proj(y, sigma)), 1.0, rtol=1e-12)

    def test_predual_random_unit_vectors(self):
        rng = np.random.default_rng(3)
        X = lorentz_predual_space(GEOM4)
        for _ in range(100):
            y = rng.standard_normal(4)
            y /= X.norm(y)
            sigma = find_norming_support(X, y)
            assert sigma is not None
            assert abs(X.norm(proj(y, sigma)) - 1.0) <= 1e-9

    def test_sup_returns_peak_coordinate(self):
        X = sup_space(3)
        sigma = find_norming_support(X, [0.2, -1.0, 0.5])
        np.testing.assert_array_equal(sigma, [1])

    def test_euclidean_needs_full_support(self):
        X = euclidean_space(3)
        y = np.array([3.0, 4.0, 0.0]) / 5.0
        sigma = find_norming_support(X, y)
        np.testing.assert_array_equal(sigma, [0, 1])

    def test_unnormalized_rejected(self):
        X = sup_space(2)
        with pytest.raises(ParameterError):
            find_norming_support(X, [2.0, 0.0])


class TestNormingFunctional:
    def test_all_closed_form_kinds(self):
        rng = np.random.default_rng(77)
        cases = [
            sup_space(4),
            euclidean_space(4),
            lorentz_space(GEOM4),
            lorentz_predual_space(GEOM4),
        ]
        for X in cases:
            for _ in range(50):
                x = rng.standard_normal(4)
                f = norming_functional(X, x)
                np.testing.assert_allclose(np.dot(f, x), X.norm(x),
                                           rtol=1e-12)
                np.testing.assert_allclose(X.dual_norm(f), 1.0, rtol=1e-12)

    def test_lap_gradient_functional(self):
        X = lap_space([[0], [1, 2]], [1.0, 2.0], dim=3)
        rng = np.random.default_rng(78)
        for _ in range(100):
            x = rng.standard_normal(3) * 10.0 ** rng.integers(-2, 3)
            f = norming_functional(X, x)
            np.testing.assert_allclose(np.dot(f, x), X.norm(x), rtol=1e-12)
            # dual feasibility: bisection slack only
            y = rng.standard_normal(3)
            assert np.dot(f, y) <= X.norm(y) * (1.0 + 1e-8)

    def test_lap_functional_support_and_basis(self):
        X = lap_space([[0], [1, 2]], [1.0, 2.0], dim=3)
        f = norming_functional(X, [3.0, 0.0, 1.0])
        assert f[1] == 0.0
        np.testing.assert_array_equal(
            norming_functional(X, [0.0, -2.0, 0.0]), [0.0, -1.0, 0.0])

    def test_unsupported_kind_rejected(self):
        from smoothnorm.orlicz import make_orlicz

        X = orlicz_space(make_orlicz(0.5, 1.0), dim=2)
        with pytest.raises(ParameterError):
            norming_functional(X, [1.0, 0.0])


class TestDualExtremePoints:
    def test_sup_gives_signed_units(self):
        pts = dual_extreme_points(sup_space(3))
        assert pts.shape == (6, 3)
        assert {tuple(p) for p in pts} == {
            (1, 0, 0), (0, 1, 0), (0, 0, 1),
            (-1, 0, 0), (0, -1, 0), (0, 0, -1)}

    def test_predual_patterns_have_unit_dual_norm(self):
        X = lorentz_predual_space(GEOM4)
        pts = dual_extreme_points(X)
        assert pts.shape[0] == 8 + 24 + 32 + 16
        for f in pts:
            np.testing.assert_allclose(X.dual_norm(f), 1.0, rtol=1e-12)

    def test_sharpness(self):
        """The norm equals the max pairing against the enumerated dual
        extreme points."""
        rng = np.random.default_rng(8)
        for X in (sup_space(4), lorentz_predual_space(GEOM4)):
            pts = dual_extreme_points(X)
            for _ in range(50):
                x = rng.standard_normal(4)
                np.testing.assert_allclose(np.max(pts @ x), X.norm(x),
                                           rtol=1e-12)

    def test_non_polyhedral_rejected(self):
        with pytest.raises(ParameterError):
            dual_extreme_points(euclidean_space(3))
