import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from blochlab.cesaro import (
    CriterionReport,
    OperatorSpec,
    RestrictionPlan,
    apply_exact,
    apply_quadrature,
    boundary_profile,
    classify_boundedness,
    classify_compactness,
    counterexample_map,
    counterexample_points,
    criterion_quantity,
    default_dictionary,
    epsnet_probe,
    greedy_net,
    norm_lower_bound,
    operator_bound_check,
    pairwise_distances,
    proof_chain_check,
    radial_identity_check,
    sup_quantity,
    weak_factorization_check,
)
from blochlab.holo import (
    DimensionError,
    OrthonormalSystem,
    PolyFunction,
    SelfMap,
    random_poly,
    random_self_map,
)
from blochlab.sampling import ball_points
from blochlab.testfuncs import build_g, constants

Z = PolyFunction.coordinate
# sup (1 - r^2) r over [0, 1): the atanh factor only exceeds 1 where the product is smaller
B4_IDENTITY_Z = 2.0 / (3.0 * np.sqrt(3.0))


def spec_of(psi, phi, w, v=None):
    return OperatorSpec(psi, phi, w, w if v is None else v)


@pytest.fixture(scope="module")
def scalar_spec(std):
    # psi = z^2, phi = identity on C: C f(z) = int_0^1 f(tz) 2 t z^2 dt
    return spec_of(Z(1, 0) ** 2, SelfMap.identity(1), std)


@pytest.fixture(scope="module")
def plane_spec(std):
    return spec_of(Z(2, 0), SelfMap.identity(2), std)


class TestEvaluation:
    def test_closed_form(self, scalar_spec):
        cf = apply_exact(scalar_spec, Z(1, 0))
        assert cf.allclose(PolyFunction.monomial((3,), 2.0 / 3.0))

    def test_quadrature_value(self, scalar_spec):
        assert apply_quadrature(scalar_spec, Z(1, 0), np.array([0.5])) == pytest.approx(1.0 / 12.0, abs=1e-12)

    def test_constant_psi(self, std):
        spec = spec_of(PolyFunction.constant(2, 4.0), SelfMap.identity(2), std)
        assert apply_exact(spec, Z(2, 1) + 1.0).allclose(PolyFunction.zero(2))

    def test_unit_function(self, std, rng):
        psi = random_poly(2, 4, 5, rng)
        phi = random_self_map(2, 2, 3, rng)
        cf = apply_exact(spec_of(psi, phi, std), PolyFunction.constant(2, 1.0))
        assert cf.allclose(psi - psi.constant_term)

    @given(seed=st.integers(0, 2**31))
    def test_linear_in_f(self, std, seed):
        rng = np.random.default_rng(seed)
        spec = spec_of(random_poly(2, 3, 3, rng), random_self_map(2, 2, 3, rng), std)
        f, g = random_poly(2, 3, 3, rng), random_poly(2, 3, 3, rng)
        c = complex(*rng.standard_normal(2))
        lhs = apply_exact(spec, f + g * c)
        assert lhs.allclose(apply_exact(spec, f) + apply_exact(spec, g) * c, rtol=1e-10, atol=1e-12)

    @given(seed=st.integers(0, 2**31), m=st.integers(1, 3))
    def test_radial_identity(self, std, seed, m):
        rng = np.random.default_rng(seed)
        spec = spec_of(random_poly(m, 4, 4, rng), random_self_map(m, 3, 3, rng), std)
        report = radial_identity_check(spec, random_poly(m, 4, 4, rng), samples=30, seed=seed)
        assert report.coefficient_match
        assert report.passed, report.worst_relative_error

    @given(seed=st.integers(0, 2**31))
    def test_two_paths(self, std, seed):
        rng = np.random.default_rng(seed)
        spec = spec_of(random_poly(2, 3, 3, rng), random_self_map(2, 2, 3, rng), std)
        f = random_poly(2, 3, 3, rng)
        z = ball_points(rng, 20, 2)
        assert np.allclose(apply_quadrature(spec, f, z), apply_exact(spec, f)(z), rtol=0, atol=1e-6)

    def test_quadrature_rejects_boundary(self, plane_spec):
        with pytest.raises(ValueError):
            apply_quadrature(plane_spec, Z(2, 0), np.array([1.0, 0.0]))

    def test_dimension_mismatch(self, std):
        with pytest.raises(DimensionError):
            spec_of(Z(2, 0), SelfMap.identity(3), std)


class TestCriteria:
    def test_b4_identity(self, std, quick_sampler):
        spec = spec_of(Z(1, 0), SelfMap.identity(1), std)
        assert sup_quantity(spec, "B4", sampler=quick_sampler).value == pytest.approx(B4_IDENTITY_Z, rel=1e-8)

    def test_sup_against_grid(self, std, rng):
        psi = Z(2, 0) * Z(2, 1) + Z(2, 0)
        phi = SelfMap.linear([[0.6, 0.3], [0.0, 0.7]])
        spec = spec_of(psi, phi, std)
        est = sup_quantity(spec, "B4").value
        grid = criterion_quantity(spec, "B4", ball_points(rng, 1_000_000, 2))
        assert est >= grid.max() * 0.98
        assert est <= grid.max() * 1.02

    def test_b1_standard_is_b4(self, std, rng):
        spec = spec_of(random_poly(3, 3, 4, rng), random_self_map(3, 2, 3, rng), std)
        y = ball_points(rng, 100, 3)
        b4 = criterion_quantity(spec, "B4", y)
        assert np.allclose(criterion_quantity(spec, "B1", y, 3), b4)
        assert np.allclose(criterion_quantity(spec, "B2", y, [0, 1, 2]), b4)
        assert np.allclose(criterion_quantity(spec, "B3", y, 3), b4)

    def test_b1_section(self, std, rng):
        spec = spec_of(random_poly(3, 3, 4, rng), random_self_map(3, 2, 3, rng), std)
        x = OrthonormalSystem.random(3, 2, rng)
        y = ball_points(rng, 50, 2)
        # evaluating on a section is evaluating B4 at the embedded points
        assert np.allclose(criterion_quantity(spec, "B1", y, x), criterion_quantity(spec, "B4", x.embed(y)))

    def test_b3_monotone_in_k(self, std, rng):
        spec = spec_of(random_poly(3, 3, 4, rng), SelfMap.identity(3), std)
        y = ball_points(rng, 200, 3)
        vals = [criterion_quantity(spec, "B3", y, k) for k in (1, 2, 3)]
        assert np.all(vals[0] <= vals[1] + 1e-15) and np.all(vals[1] <= vals[2] + 1e-15)

    @pytest.mark.parametrize(
        "kind, restriction",
        [("B1", None), ("B2", 2), ("B2", [5]), ("B3", 0), ("B3", [1]), ("B4", 1), ("B5", None)],
    )
    def test_bad_restrictions(self, plane_spec, kind, restriction):
        with pytest.raises(ValueError):
            criterion_quantity(plane_spec, kind, np.zeros(2), restriction)

    def test_points_outside(self, plane_spec):
        with pytest.raises(ValueError):
            criterion_quantity(plane_spec, "B4", np.array([1.0, 0.0]))


class TestOperatorNorms:
    def test_bound_holds(self, std, plane_spec, quick_sampler):
        m_est = sup_quantity(plane_spec, "B1", 2, quick_sampler)
        for f in (Z(2, 0), Z(2, 1) ** 3, Z(2, 0) * Z(2, 1) + 1.0):
            check = operator_bound_check(plane_spec, f, m_est, quick_sampler)
            assert check.passed, check

    def test_lower_bound_below_m(self, std, quick_sampler):
        spec = spec_of(Z(2, 0) + Z(2, 1) ** 2, SelfMap.linear([[0.5, 0.2], [0.1, 0.6]]), std)
        series = build_g(std)
        m_est = sup_quantity(spec, "B1", 2, quick_sampler)
        lb = norm_lower_bound(spec, default_dictionary(spec, series, m_est.witness[None, :]), quick_sampler)
        assert 0 < lb.value <= m_est.value * (1 + 1e-6)

    def test_empty_dictionary(self, plane_spec):
        with pytest.raises(ValueError):
            norm_lower_bound(plane_spec, [])


class TestClassifiers:
    def test_image_inside_smaller_ball(self, std, quick_sampler):
        spec = spec_of(Z(2, 0), SelfMap.linear(0.9 * np.eye(2)), std)
        report = classify_compactness(spec, quick_sampler)
        assert report.verdicts["compact"] == "compact"

    def test_identity(self, plane_spec, quick_sampler):
        report = classify_compactness(plane_spec, quick_sampler)
        assert report.verdicts["compact"] == "compact-consistent"
        assert report.decay is not None

    def test_zero_operator(self, std, quick_sampler):
        spec = spec_of(PolyFunction.constant(2, 1.0), SelfMap.identity(2), std)
        assert classify_compactness(spec, quick_sampler).verdicts["compact"].startswith("compact (proved")

    def test_convergent_domain_weight(self, std, sqrt_weight, quick_sampler):
        spec = spec_of(Z(2, 0), SelfMap.identity(2), sqrt_weight, std)
        assert classify_compactness(spec, quick_sampler).verdicts["compact"] == "compact"

    def test_boundedness(self, plane_spec, quick_sampler):
        report = classify_boundedness(plane_spec, quick_sampler)
        assert report.verdicts["bounded"] == "bounded"
        assert report.verdicts["psi_little_bloch"] == "yes"
        assert report.verdicts["little_to_little_bounded"] == "bounded"
        assert report.quantities["B1"] == pytest.approx(report.quantities["B4"], rel=1e-3)
        assert {"B2[0]", "B2[1]", "B2[0, 1]", "B3(k=1)", "B3(k=2)"} <= set(report.quantities)

    def test_restriction_plan(self):
        b1, b2, b3 = RestrictionPlan().resolve(3)
        assert b1 == 3
        assert b2 == ((0,), (1,), (2,), (0, 1, 2))
        assert b3 == (1, 2, 3)

    def test_boundary_profile_thresholds(self, std):
        spec = spec_of(Z(2, 0), SelfMap.linear(0.9 * np.eye(2)), std)
        profile = boundary_profile(spec)
        # no image point reaches 1 - 2^-j once that exceeds 0.9
        assert profile.radii[-1] <= 0.9

    def test_report_json(self, plane_spec, quick_sampler):
        report = classify_compactness(plane_spec, quick_sampler)
        data = json.loads(report.to_json())
        assert data["quantity_kind"] == "B4"
        assert data["verdicts"] == report.verdicts
        x = OrthonormalSystem.standard(2, [0])
        assert CriterionReport("B1", x, report.sup_estimate, None, {}, {}).to_dict()["restriction"] == {
            "orthonormal_system": [[[1.0, 0.0], [0.0, 0.0]]]
        }


class TestProbes:
    @pytest.mark.parametrize("m", [4, 8, 16])
    def test_counterexample(self, m):
        phi = counterexample_map(m)
        pts = counterexample_points(m)
        img = phi(pts)
        assert np.allclose(img, np.eye(m) / 4, atol=1e-15)
        for _, _, d in pairwise_distances(img):
            assert d == pytest.approx(np.sqrt(2) / 4, abs=1e-12)
        assert epsnet_probe(phi, 0.5, 0.3, samples=0, points=pts).size == m

    def test_volumetric_bound(self):
        # disjoint eps/2-balls around net points fit in the (r + eps/2)-ball of R^4
        net = epsnet_probe(SelfMap.identity(2), 0.5, 0.25, samples=20_000)
        assert net.size <= ((0.5 + 0.125) / 0.125) ** 4

    def test_greedy_net_covers(self, rng):
        pts = rng.standard_normal((500, 3))
        idx = greedy_net(pts, 0.8)
        d = np.linalg.norm(pts[:, None, :] - pts[idx][None, :, :], axis=2).min(axis=1)
        assert d.max() <= 0.8
        centers = pts[idx]
        sep = np.linalg.norm(centers[:, None] - centers[None], axis=2) + np.eye(len(idx)) * 10
        assert sep.min() > 0.8

    def test_bad_eps(self):
        with pytest.raises(ValueError):
            epsnet_probe(SelfMap.identity(2), 0.5, 1.5)


class TestChecks:
    def test_factorization(self, std, rng):
        spec = spec_of(random_poly(2, 3, 3, rng), random_self_map(2, 2, 3, rng), std)
        report = weak_factorization_check(spec, random_poly(2, 3, 4, rng), k=3)
        assert report.passed and report.dim_y == 3

    def test_proof_chain(self, std, plane_spec):
        series = build_g(std)
        report = proof_chain_check(plane_spec, series, constants(series), samples=500)
        assert report.passed and report.checked == 500

    def test_proof_chain_vacuous(self, std):
        series = build_g(std)
        spec = spec_of(Z(2, 0), SelfMap.linear(0.5 * np.eye(2)), std)
        report = proof_chain_check(spec, series, constants(series), samples=10, max_draws=1000)
        assert report.passed and report.checked == 0

    def test_proof_chain_needs_matching_series(self, std, sqrt_weight):
        series = build_g(sqrt_weight)
        spec = spec_of(Z(2, 0), SelfMap.identity(2), std)
        with pytest.raises(ValueError):
            proof_chain_check(spec, series, constants(series))
