import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from blochlab.bloch import seminorm
from blochlab.sampling import ball_points, sphere_directions
from blochlab.testfuncs import (
    BetaFunction,
    GammaFunction,
    SeriesError,
    beta,
    beta_poly,
    build_g,
    constants,
    default_grid,
    gamma,
    gamma_compact_sup,
    gamma_poly,
)
from blochlab.weights import NormalWeight, WeightError

# frozen values for nu(t) = 1 - t^2 on [0, 0.999]
C1_STD = 0.95303
C2_STD = 1.44070
C3_STD = 1.54027
R1_UNIT_STD = 0.76430
R1_HALF_STD = 0.5**0.5


@pytest.fixture(scope="module")
def g_std(std):
    return build_g(std)


@pytest.fixture(scope="module")
def consts_std(g_std):
    return constants(g_std)


@pytest.fixture(scope="module")
def g_sqrt(sqrt_weight):
    return build_g(sqrt_weight)


def half_standard():
    return NormalWeight(
        evaluate=lambda t: 0.5 * (1.0 - t) * (1.0 + t),
        evaluate_gap=lambda g: 0.5 * g * (2.0 - g),
        delta=1.0 / 3.0,
        exponent_a=0.5,
        exponent_b=1.5,
        integral_divergent=True,
        name="half",
    )


class TestSeries:
    def test_exponents(self, g_std):
        assert g_std.k0 == 0
        assert [n for _, n, _ in g_std.terms[:4]] == [3, 7, 15, 31]
        # 1 - r_k^2 = 2^-k gives n_k = floor(1 / (1 - sqrt(1 - 2^-k)))
        for k, n, r in g_std.terms:
            assert r == pytest.approx(np.sqrt(1.0 - 2.0**-k), abs=1e-12)
            assert n == int(np.floor(1.0 / (1.0 - r)))

    def test_k0_shift(self):
        g = build_g(half_standard())
        assert g.k0 == 1
        assert g.terms[0][0] == 2

    def test_tail_and_kmax(self, g_std):
        assert g_std.k_max >= 8
        assert g_std.tail_bound < 1e-9

    def test_value_at_origin(self, g_std):
        assert g_std(0.0) == pytest.approx(1.0, abs=0)
        assert g_std.antiderivative(0.0) == 0.0

    def test_antiderivative_leading_terms(self, g_std):
        lead = g_std.coefficients / (g_std.exponents + 1)
        assert lead[:3] == pytest.approx([0.5, 0.5, 0.5])

    def test_antiderivative_matches_trapezoid(self, g_std):
        t = np.linspace(0.0, 0.9, 200_001)
        vals = g_std(t).real
        assert np.trapezoid(vals, t) == pytest.approx(float(g_std.antiderivative(0.9).real), rel=1e-8)

    def test_monotone_on_interval(self, g_std):
        t = np.linspace(0.0, g_std.eval_radius_max, 5000)
        assert np.all(np.diff(g_std(t).real) > 0)

    @given(r=st.floats(0.0, 0.999), theta=st.floats(0.0, 2 * np.pi))
    def test_modulus_bound(self, g_std, r, theta):
        z = r * np.exp(1j * theta)
        assert abs(g_std(z)) <= g_std(r).real * (1 + 1e-12)

    def test_domain_guard(self, g_std):
        with pytest.raises(SeriesError):
            g_std(0.9995)

    def test_small_kmax_rejected(self, std):
        with pytest.raises(SeriesError):
            build_g(std, k_max=5)
        with pytest.raises(SeriesError):
            build_g(std, k_max=8)

    def test_bad_radius(self, std):
        with pytest.raises(SeriesError):
            build_g(std, eval_radius_max=1.0)

    def test_non_normal_weight_rejected(self):
        bumpy = NormalWeight(
            evaluate=lambda t: (1.0 - t * t) * (1.0 + 0.5 * np.sin(40 * t)),
            delta=0.0,
            exponent_a=0.5,
            exponent_b=1.5,
            integral_divergent=True,
        )
        with pytest.raises(WeightError):
            build_g(bumpy)

    def test_summary(self, g_std):
        s = g_std.summary(3)
        assert s["terms"] == [[1, 3], [2, 7], [3, 15]]


class TestConstants:
    def test_standard_values(self, consts_std):
        assert consts_std.C1 == pytest.approx(C1_STD, abs=1e-4)
        assert consts_std.C2 == pytest.approx(C2_STD, abs=1e-4)
        assert consts_std.C3 == pytest.approx(C3_STD, abs=1e-4)
        assert consts_std.r1_unit_integral == pytest.approx(R1_UNIT_STD, abs=1e-4)
        assert consts_std.r1_half_weight == pytest.approx(R1_HALF_STD, abs=1e-9)

    def test_ordering(self, consts_std, g_sqrt):
        for c in (consts_std, constants(g_sqrt)):
            assert c.C1 <= 1.0 <= c.C2
            assert c.C3 >= 1.0

    def test_r1_by_trapezoid(self, g_std, consts_std):
        r1 = consts_std.r1_unit_integral
        t = np.linspace(0.0, r1, 1_000_001)
        assert np.trapezoid(g_std(t).real, t) == pytest.approx(1.0, abs=1e-9)

    def test_bounds_on_fine_grid(self, std, g_std, consts_std):
        t = np.linspace(0.0, g_std.eval_radius_max, 1_000_001)
        ng = std(t) * g_std(t).real
        assert ng.min() >= consts_std.C1 - 1e-12
        assert ng.max() <= consts_std.C2 + 1e-12
        # a grid maximum is a lower bound, so the refined constant should be close above it
        assert consts_std.C2 - ng.max() < 1e-6

    def test_ratio_bound_on_fine_grid(self, g_std, consts_std):
        r = np.linspace(consts_std.r1_unit_integral, g_std.eval_radius_max, 200_001)
        ratio = g_std.antiderivative(r).real / g_std.antiderivative(r**2).real
        assert ratio.max() <= consts_std.C3 + 1e-12

    def test_grid(self):
        grid = default_grid(0.999, 512)
        assert grid[0] == 0.0 and grid[-1] == 0.999
        assert np.all(np.diff(grid) > 0)

    def test_grid_out_of_range(self, g_std):
        with pytest.raises(SeriesError):
            constants(g_std, grid=[0.0, 0.5, 0.9999])

    def test_to_dict(self, consts_std):
        assert set(consts_std.to_dict()) == {
            "C1", "C2", "C3", "r1_unit_integral", "r1_half_weight", "grid_size"
        }


class TestBeta:
    def test_vanishes_at_zero_w(self, g_std):
        z = ball_points(np.random.default_rng(0), 20, 2)
        assert np.all(beta(g_std, np.zeros(2), z) == 0)

    def test_vanishes_orthogonal(self, g_std):
        w = np.array([0.6, 0.3j])
        z = 0.5 * np.array([[0.3j, 0.6]]) / np.linalg.norm(w)
        assert abs(beta(g_std, w, z)[0]) < 1e-15

    def test_gradient_by_differences(self, g_std, rng):
        f = BetaFunction(g_std, np.array([0.5 + 0.2j, -0.4]))
        z = 0.6 * ball_points(rng, 10, 2)
        h = 1e-6
        for k in range(2):
            e = np.zeros(2)
            e[k] = h
            fd = (f(z + e) - f(z - e)) / (2 * h)
            assert np.allclose(f.gradient(z)[:, k], fd, atol=1e-7)

    def test_radial_identity(self, g_std, rng):
        f = BetaFunction(g_std, np.array([0.3, 0.7j, 0.2]))
        z = 0.9 * ball_points(rng, 30, 3)
        assert np.allclose(f.radial(z), np.sum(z * f.gradient(z), axis=1))

    def test_norm_bounded_by_c2(self, std, g_std, consts_std, rng, quick_sampler):
        for w in sphere_directions(rng, 3, 2) * np.array([[0.5], [0.9], [0.99]]):
            est = seminorm(BetaFunction(g_std, w), std, "gradient", quick_sampler).value
            assert est <= consts_std.C2 * 1.02

    def test_polynomial_truncation(self, g_std, rng):
        w = 0.9 * sphere_directions(rng, 1, 2)[0]
        p = beta_poly(g_std, w)
        z = 0.5 * ball_points(rng, 50, 2)
        assert p.degree <= 16
        assert np.allclose(p(z), beta(g_std, w, z), atol=1e-10)


class TestGamma:
    @given(t=st.floats(0.05, 0.999))
    def test_value_at_w(self, g_std, t):
        w = np.array([t, 0.0]) * np.exp(0.3j)
        assert gamma(g_std, w, w[None, :])[0] == pytest.approx(
            float(g_std.antiderivative(t * t).real), rel=1e-12
        )

    def test_orthogonal(self, g_std):
        w = np.array([0.0, 0.7])
        assert gamma(g_std, w, np.array([[0.8, 0.0]]))[0] == 0

    def test_zero_w_rejected(self, g_std):
        with pytest.raises(ValueError):
            GammaFunction(g_std, np.zeros(3))

    def test_normalizer(self, g_std):
        f = GammaFunction(g_std, np.array([0.6, 0.0]))
        assert f.normalizer == pytest.approx(float(g_std.antiderivative(0.36).real))

    def test_norm_bounded(self, std, g_std, consts_std, rng, quick_sampler):
        for r in (0.5, 0.9, 0.99):
            w = r * sphere_directions(rng, 1, 2)[0]
            est = seminorm(GammaFunction(g_std, w), std, "gradient", quick_sampler).value
            assert est <= 2 * consts_std.C2 * 1.02

    @pytest.mark.parametrize("w_norm", [0.3, 0.9, 0.99])
    def test_compact_sup_closed_form(self, g_std, rng, w_norm):
        w = w_norm * sphere_directions(rng, 1, 2)[0]
        z = ball_points(rng, 20_000, 2, radius=0.5)
        sampled = np.max(np.abs(gamma(g_std, w, z)))
        exact = gamma_compact_sup(g_std, w_norm)
        assert sampled <= exact * (1 + 1e-12)
        assert abs(gamma(g_std, w, 0.5 * w[None, :] / w_norm)[0]) == pytest.approx(exact, rel=1e-12)

    def test_compact_sup_decreases(self, g_std):
        vals = [gamma_compact_sup(g_std, r) for r in (0.9, 0.95, 0.99, 0.999)]
        assert np.all(np.diff(vals) < 0)

    def test_polynomial_truncation(self, g_std, rng):
        w = 0.8 * sphere_directions(rng, 1, 2)[0]
        p = gamma_poly(g_std, w)
        z = 0.4 * ball_points(rng, 50, 2)
        assert np.allclose(p(z), gamma(g_std, w, z), atol=1e-9)
