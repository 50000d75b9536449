import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from blochlab.holo import PolyFunction, random_poly
from blochlab.moebius import MoebiusMap, SingularityError, _apply, apply, invariant_gradient, pseudohyperbolic
from blochlab.sampling import ball_points

points = st.integers(0, 2**32 - 1).map(lambda s: ball_points(np.random.default_rng(s), 2, 3, radius=0.99))


def test_zero_center_is_minus_identity():
    z = np.array([0.1 + 0.2j, -0.3])
    assert np.allclose(apply(np.zeros(2), z), -z)


def test_origin_maps_to_center():
    a = np.array([0.3, 0.2j])
    assert np.allclose(apply(a, np.zeros(2)), a)


def test_scalar_value():
    assert apply(np.array([0.5]), np.array([0.25]))[0] == pytest.approx(0.2857142857142857)


@given(points)
def test_involution_and_exchange(pair):
    a, z = pair
    phi = MoebiusMap(a)
    assert np.allclose(phi(phi(z)), z, atol=1e-10)
    assert np.allclose(phi(a), 0, atol=1e-12)
    assert np.linalg.norm(phi(z)) < 1


def test_s_identity():
    phi = MoebiusMap(np.array([0.6, 0.3j]))
    assert phi.s**2 + np.linalg.norm(phi.center) ** 2 == pytest.approx(1.0, abs=1e-12)


def test_center_outside_rejected():
    with pytest.raises(ValueError):
        MoebiusMap(np.array([1.0, 0.0]))


def test_singularity_guard():
    with pytest.raises(SingularityError):
        _apply(np.array([0.5]), np.array([2.0]))


def test_invariant_gradient_constant():
    assert invariant_gradient(PolyFunction.constant(2, 1.0), np.array([0.3, 0.1])) == 0.0


def test_invariant_gradient_scalar_identity():
    z = np.array([[0.3], [0.7j], [-0.95]])
    got = invariant_gradient(PolyFunction.coordinate(1, 0), z)
    assert np.allclose(got, 1 - np.abs(z[:, 0]) ** 2, atol=1e-9)


@given(st.integers(0, 2**32 - 1))
def test_invariant_gradient_matches_exact_derivative(seed):
    # D phi_z(0) = -(s^2 P_z + s Q_z), so grad(f o phi_z)(0) = -(s^2 P + s Q)^T grad f(z)
    rng = np.random.default_rng(seed)
    f = random_poly(3, 4, 6, rng)
    z = ball_points(rng, 1, 3, radius=0.95)[0]
    n2 = np.vdot(z, z).real
    s = np.sqrt(1 - n2)
    p = np.outer(z, z.conj()) / n2
    d = s * s * p + s * (np.eye(3) - p)
    exact = np.linalg.norm(d.T @ f.gradient(z))
    assert invariant_gradient(f, z) == pytest.approx(exact, rel=1e-7, abs=1e-9)


def test_invariant_gradient_at_origin():
    f = random_poly(2, 3, 5, np.random.default_rng(1))
    assert invariant_gradient(f, np.zeros(2)) == pytest.approx(np.linalg.norm(f.gradient(np.zeros(2))), abs=1e-9)


def test_pseudohyperbolic_values():
    assert pseudohyperbolic(np.array([0.5]), np.array([0.0])) == pytest.approx(0.5)
    z = np.array([0.2, 0.1j])
    assert pseudohyperbolic(z, z) == pytest.approx(0.0, abs=1e-7)


@given(points)
def test_pseudohyperbolic_symmetric_and_dominates(pair):
    z, w = pair
    r = pseudohyperbolic(z, w)
    assert r == pytest.approx(pseudohyperbolic(w, z), abs=1e-14)
    assert 0 <= r < 1
    assert 0.5 * np.linalg.norm(z - w) <= r + 1e-10
