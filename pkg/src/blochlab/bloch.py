"""Bloch-type semi-norms, little-Bloch decay profiles and the growth/restriction checks.

Functions are duck-typed: anything with ``dim``, ``__call__``, ``gradient``
and ``radial`` evaluated on (N, dim) arrays works, which covers
:class:`~blochlab.holo.PolyFunction` and the test functions in
:mod:`blochlab.testfuncs`.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import moebius
from .holo import OrthonormalSystem, PolyFunction, restrict
from .sampling import SamplerConfig, SupremumEstimate, ball_points, maximize, sphere_directions
from .weights import EDGE, NormalWeight, integral_reciprocal_many

VARIANTS = ("gradient", "radial", "affine", "invariant")

LITTLE_BLOCH_RATIO = 1e-3
LITTLE_BLOCH_TAIL = 4
# alternative decay signal: fitted power of (1 - r) over the last shells
LITTLE_BLOCH_EXPONENT = 0.25


class UnsupportedVariantError(ValueError):
    pass


def pointwise(f, mu: NormalWeight, variant: str, z) -> np.ndarray:
    """The quantity whose supremum defines the semi-norm of ``variant``."""
    z = np.asarray(z, dtype=complex).reshape(-1, f.dim)
    r = np.linalg.norm(z, axis=1)
    if variant == "gradient":
        return mu(r) * np.linalg.norm(f.gradient(z), axis=1)
    if variant == "radial":
        return mu(r) * np.abs(f.radial(z))
    if variant == "affine":
        # derivative of lambda -> f(lambda x) is Rf(z)/||z|| at z = lambda x;
        # at the origin the sup over unit x is ||grad f(0)||
        out = np.empty(len(z))
        inner = r > 0
        out[inner] = mu(r[inner]) * np.abs(f.radial(z[inner])) / r[inner]
        if np.any(~inner):
            out[~inner] = mu(0.0) * np.linalg.norm(f.gradient(z[~inner]), axis=1)
        return out
    if variant == "invariant":
        if not mu.is_standard:
            raise UnsupportedVariantError("the invariant norm is only defined for mu(t) = 1 - t^2")
        return moebius.invariant_gradient(f, z)
    raise UnsupportedVariantError(f"unknown variant {variant!r}")


def seminorm(
    f,
    mu: NormalWeight,
    variant: str = "radial",
    sampler: SamplerConfig | None = None,
    extra_points=None,
) -> SupremumEstimate:
    """sup over the ball of the ``variant`` quantity (a sampled lower bound)."""
    if variant == "invariant" and not mu.is_standard:
        raise UnsupportedVariantError("the invariant norm is only defined for mu(t) = 1 - t^2")
    if variant not in VARIANTS:
        raise UnsupportedVariantError(f"unknown variant {variant!r}")
    return maximize(lambda z: pointwise(f, mu, variant, z), f.dim, sampler, extra_points)


def bloch_norm(f, mu: NormalWeight, variant: str = "radial", sampler: SamplerConfig | None = None) -> float:
    """|f(0)| + semi-norm."""
    f0 = abs(complex(f(np.zeros(f.dim))))
    return f0 + seminorm(f, mu, variant, sampler).value


@dataclass(frozen=True)
class NormChain:
    radial: float
    gradient: float
    affine: float
    f0: float

    @property
    def norms(self) -> dict[str, float]:
        return {
            "radial": self.f0 + self.radial,
            "gradient": self.f0 + self.gradient,
            "affine": self.f0 + self.affine,
        }


def norm_chain(f, mu: NormalWeight, sampler: SamplerConfig | None = None) -> NormChain:
    """The radial, gradient and affine semi-norms, sharing witnesses between the searches.

    Every evaluated point is a valid lower bound, so the gradient search is
    seeded with the radial and affine witnesses (the gradient quantity
    dominates both pointwise).
    """
    rad = seminorm(f, mu, "radial", sampler)
    aff = seminorm(f, mu, "affine", sampler, extra_points=rad.witness)
    grad = seminorm(f, mu, "gradient", sampler, extra_points=np.stack([rad.witness, aff.witness]))
    f0 = abs(complex(f(np.zeros(f.dim))))
    return NormChain(rad.value, grad.value, aff.value, f0)


@dataclass(frozen=True)
class DecayProfile:
    radii: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if len(self.radii) != len(self.values):
            raise ValueError("radii and values differ in length")
        if np.any(np.diff(self.radii) <= 0):
            raise ValueError("radii must be strictly increasing")

    @property
    def peak(self) -> float:
        return float(np.max(self.values, initial=0.0))

    def tail_exponent(self, count: int = LITTLE_BLOCH_TAIL) -> float:
        """Fitted c in value ~ (1 - r)^c over the last ``count`` shells."""
        gaps = 1.0 - self.radii[-count:]
        vals = self.values[-count:]
        if np.any(vals <= 0):
            return np.inf
        return float(np.polyfit(np.log(gaps), np.log(vals), 1)[0])

    def tends_to_zero(self) -> bool:
        """Finite stand-in for a limit of zero at the boundary.

        Zero profiles pass. Otherwise the last ``LITTLE_BLOCH_TAIL`` values must
        be non-increasing and either the final value is below 1e-3 of the peak
        or the tail decays like a positive power of (1 - r).
        """
        peak = self.peak
        if peak == 0.0:
            return True
        tail = self.values[-LITTLE_BLOCH_TAIL:]
        if np.any(np.diff(tail) > 1e-12 * peak):
            return False
        if self.values[-1] < LITTLE_BLOCH_RATIO * peak:
            return True
        return self.tail_exponent() >= LITTLE_BLOCH_EXPONENT

    def to_csv(self, path) -> None:
        with open(Path(path), "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["radius", "value"])
            for r, v in zip(self.radii, self.values):
                w.writerow([repr(float(r)), repr(float(v))])

    def to_dict(self) -> dict:
        return {"radii": [float(r) for r in self.radii], "values": [float(v) for v in self.values]}


def default_radii(count: int = 19) -> np.ndarray:
    return np.minimum(1.0 - 2.0 ** -np.arange(1, count + 1), 1.0 - EDGE)


def decay_profile(
    f,
    mu: NormalWeight,
    radii=None,
    variant: str = "radial",
    directions: int = 512,
    seed: int = 0,
) -> DecayProfile:
    """Per-shell maxima of the ``variant`` quantity over random directions."""
    radii = default_radii() if radii is None else np.asarray(radii, dtype=float)
    if np.any(radii < 0) or np.any(radii > 1.0 - EDGE):
        raise ValueError("radii must lie in [0, 1 - EDGE]")
    rng = np.random.default_rng(seed)
    u = sphere_directions(rng, directions, f.dim)
    values = np.array([np.max(pointwise(f, mu, variant, r * u)) for r in radii])
    return DecayProfile(radii, values)


def in_little_bloch(f, mu: NormalWeight, **kwargs) -> bool:
    return decay_profile(f, mu, **kwargs).tends_to_zero()


@dataclass(frozen=True)
class GrowthReport:
    passed: bool
    worst_slack: float
    witness: np.ndarray
    seminorm: float
    refined: bool


def growth_check(
    f,
    mu: NormalWeight,
    samples: int = 1000,
    sampler: SamplerConfig | None = None,
    seed: int = 0,
    tol: float = 1e-8,
) -> GrowthReport:
    """Check |f(z)| <= |f(0)| + int_0^{||z||} dt/mu * (gradient semi-norm) on random points.

    The bound is stated with the gradient semi-norm: with the radial one it
    fails already for f(z) = z. A violation triggers one refinement of the
    semi-norm seeded at the offending points before it is reported.
    """
    rng = np.random.default_rng(seed)
    half = samples // 2
    z = np.concatenate([
        ball_points(rng, samples - half, f.dim),
        (1.0 - 1e-3 * rng.random(half))[:, None] * sphere_directions(rng, half, f.dim),
    ])
    f0 = abs(complex(f(np.zeros(f.dim))))
    integral = integral_reciprocal_many(mu, np.linalg.norm(z, axis=1))
    lhs = np.abs(f(z))
    est = seminorm(f, mu, "gradient", sampler)
    slack = f0 + integral * est.value + tol - lhs
    refined = False
    if np.any(slack < 0):
        refined = True
        bad = z[slack < 0]
        est = seminorm(f, mu, "gradient", sampler, extra_points=bad)
        slack = f0 + integral * est.value + tol - lhs
    i = int(np.argmin(slack))
    return GrowthReport(bool(slack[i] >= 0), float(slack[i]), z[i], est.value, refined)


@dataclass(frozen=True)
class RestrictionReport:
    passed: bool
    direct: float
    restricted: float
    ratio: float
    systems: int


def restriction_sup_check(
    f: PolyFunction,
    mu: NormalWeight,
    k: int = 2,
    systems: int = 64,
    sampler: SamplerConfig | None = None,
    seed: int = 0,
    tolerance: float = 0.05,
    include: list[OrthonormalSystem] | None = None,
) -> RestrictionReport:
    """Compare the gradient semi-norm with the best one over restrictions to k-dim sections.

    Restrictions can only see part of the ball, so their supremum must not
    exceed the direct one (beyond ``tolerance``) and should come within
    ``tolerance`` of it from below.
    """
    if not 2 <= k <= f.dim:
        raise ValueError("need 2 <= k <= dim")
    rng = np.random.default_rng(seed)
    direct = seminorm(f, mu, "gradient", sampler).value
    pool = list(include or []) + [OrthonormalSystem.random(f.dim, k, rng) for _ in range(systems)]
    best = 0.0
    for x in pool:
        best = max(best, seminorm(restrict(f, x), mu, "gradient", sampler).value)
    ratio = best / direct if direct > 0 else 1.0
    passed = (1.0 - tolerance) <= ratio <= (1.0 + tolerance)
    return RestrictionReport(passed, direct, best, ratio, len(pool))
