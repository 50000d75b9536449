"""The extended Cesaro composition operator C_{psi,phi} f(z) = int_0^1 f(phi(tz)) R psi(tz) dt/t.

Besides the two evaluation routes (exact homogeneous decomposition and
adaptive quadrature) this module computes the criterion quantities B1-B4,
their sampled suprema M, and the boundedness/compactness classifiers built
on them.

Norm conventions: the codomain norm of C f is the radial one,
|Cf(0)| + sup mu |R(Cf)|, and the domain norm of f is the gradient one.
The pointwise estimate |f(w)| <= max{1, int_0^||w|| dt/nu} ||f|| holds for
the gradient norm but not for the radial norm (f(z) = z breaks it), so the
operator bound ||Cf|| <= M ||f|| only holds with this pairing.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np
from scipy.integrate import quad_vec

from .bloch import DecayProfile, decay_profile, seminorm
from .holo import (
    DEFAULT_DEGREE_CAP,
    DimensionError,
    OrthonormalSystem,
    PolyFunction,
    SelfMap,
    compose,
    homogeneous_parts,
    random_poly,
    restrict,
)
from .sampling import SamplerConfig, SupremumEstimate, ball_points, maximize, sphere_directions
from .testfuncs import GSeries, TestConstants, beta_poly, gamma_poly
from .weights import EDGE, NormalWeight, check_normality, integral_reciprocal_many

KINDS = ("B1", "B2", "B3", "B4")
COMPACT_RATIO = 1e-3
COMPACT_TAIL = 4
# j = 1..19 puts the last shell at 1 - 2^-19, just inside the 1e-6 edge guard
PROFILE_SHELLS = 19

Restriction = Union[None, int, Sequence[int], OrthonormalSystem]


class QuadratureError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class OperatorSpec:
    psi: PolyFunction
    phi: SelfMap
    nu: NormalWeight
    mu: NormalWeight

    def __post_init__(self):
        if self.psi.dim != self.phi.dim:
            raise DimensionError(f"psi on C^{self.psi.dim}, phi on C^{self.phi.dim}")
        for name, w in (("nu", self.nu), ("mu", self.mu)):
            if not check_normality(w).passed:
                raise ValueError(f"weight {name} ({w.name}) failed the normality checks")

    @property
    def dim(self) -> int:
        return self.psi.dim

    @property
    def radial_psi(self) -> PolyFunction:
        return self.psi.radial_poly()


# -- evaluation ---------------------------------------------------------------


def apply_exact(spec: OperatorSpec, f: PolyFunction, degree_cap: int = DEFAULT_DEGREE_CAP) -> PolyFunction:
    """C f = sum_{n >= 1} P_n / n where h = (f o phi) R psi = sum P_n."""
    h = compose(f, spec.phi, degree_cap) * spec.radial_psi
    parts = homogeneous_parts(h)
    if parts and parts[0].coeffs:
        raise ArithmeticError("degree-0 part of (f o phi) R psi should vanish")
    out = PolyFunction.zero(spec.dim)
    for n, p in enumerate(parts[1:], start=1):
        out = out + p / n
    return out


def apply_quadrature(spec: OperatorSpec, f: PolyFunction, z, tol: float = 1e-9) -> np.ndarray:
    """int_0^1 f(phi(tz)) R psi(tz) dt/t by adaptive Gauss-Kronrod, vectorized over the rows of z.

    The integrand is continuous on (0, 1] with a finite limit at t = 0; the
    rule never samples the endpoint, so no value is needed there.
    """
    z = np.asarray(z, dtype=complex)
    single = z.ndim == 1
    pts = z.reshape(-1, spec.dim)
    if np.any(np.linalg.norm(pts, axis=1) >= 1.0):
        raise ValueError("points must lie in the open unit ball")
    rpsi = spec.radial_psi

    def integrand(t):
        tz = t * pts
        v = f(spec.phi(tz)) * rpsi(tz) / t
        return np.concatenate([v.real, v.imag])

    val, err = quad_vec(integrand, 0.0, 1.0, epsabs=tol, epsrel=0.0, norm="max", limit=400)
    if not err <= tol:
        raise QuadratureError(f"quadrature error estimate {err:.3e} above {tol:.1e}")
    out = val[: len(pts)] + 1j * val[len(pts):]
    return out[0] if single else out


@dataclass(frozen=True)
class IdentityReport:
    passed: bool
    coefficient_match: bool
    worst_relative_error: float
    witness: np.ndarray


def radial_identity_check(
    spec: OperatorSpec,
    f: PolyFunction,
    samples: int = 100,
    seed: int = 0,
    rtol: float = 1e-8,
    image: PolyFunction | None = None,
) -> IdentityReport:
    """R(Cf) = (f o phi) R psi, coefficient-wise and at sample points.

    Pointwise errors are relative to max(|rhs|, 1e-6 * coefficient mass of the
    rhs) so that near-zeros of the rhs do not turn rounding into failures.
    """
    cf = apply_exact(spec, f) if image is None else image
    lhs_poly = cf.radial_poly()
    rhs_poly = compose(f, spec.phi) * spec.radial_psi
    coeff_ok = lhs_poly.allclose(rhs_poly)
    rng = np.random.default_rng(seed)
    z = ball_points(rng, samples, spec.dim)
    lhs = cf.radial(z)
    rhs = f(spec.phi(z)) * spec.psi.radial(z)
    mass = sum(abs(c) for c in rhs_poly.coeffs.values())
    err = np.abs(lhs - rhs) / np.maximum(np.abs(rhs), max(1e-6 * mass, 1e-300))
    i = int(np.argmax(err)) if len(err) else 0
    worst = float(err[i]) if len(err) else 0.0
    return IdentityReport(bool(coeff_ok and worst <= rtol), coeff_ok, worst, z[i] if len(z) else z)


# -- criterion quantities -----------------------------------------------------


def _criterion(spec: OperatorSpec, kind: str, restriction: Restriction):
    """(dimension, objective) for the criterion ``kind`` under ``restriction``."""
    if kind not in KINDS:
        raise ValueError(f"unknown criterion {kind!r}")
    m = spec.dim
    if kind in ("B1", "B2"):
        if restriction is None:
            raise ValueError(f"{kind} needs a restriction")
        if kind == "B1":
            if isinstance(restriction, OrthonormalSystem):
                x = restriction
            elif isinstance(restriction, (int, np.integer)):
                x = OrthonormalSystem.standard(m, range(int(restriction)))
            else:
                raise ValueError("B1 takes an orthonormal system or a leading dimension")
        else:
            if isinstance(restriction, OrthonormalSystem) or isinstance(restriction, (int, np.integer)):
                raise ValueError("B2 takes a set of coordinate indices")
            idx = sorted(set(int(i) for i in restriction))
            if not idx or idx[0] < 0 or idx[-1] >= m:
                raise ValueError(f"coordinate subset {restriction} out of range for C^{m}")
            x = OrthonormalSystem.standard(m, idx)
        if x.ambient_dim != m:
            raise DimensionError("restriction lives in another ambient space")
        psi_r = restrict(spec.psi, x)

        def objective(y):
            y = np.asarray(y, dtype=complex).reshape(-1, x.order)
            w = np.linalg.norm(spec.phi(x.embed(y)), axis=1)
            return _product(spec, np.linalg.norm(y, axis=1), psi_r.radial(y), w)

        return x.order, objective

    if kind == "B3":
        if not isinstance(restriction, (int, np.integer)) or not 1 <= restriction <= m:
            raise ValueError("B3 takes a truncation order 1 <= k <= m")
        k = int(restriction)

        def objective(y):
            y = np.asarray(y, dtype=complex).reshape(-1, m)
            w = np.linalg.norm(spec.phi(y)[:, :k], axis=1)
            return _product(spec, np.linalg.norm(y, axis=1), spec.psi.radial(y), w)

        return m, objective

    if restriction is not None:
        raise ValueError("B4 takes no restriction")

    def objective(y):
        y = np.asarray(y, dtype=complex).reshape(-1, m)
        w = np.linalg.norm(spec.phi(y), axis=1)
        return _product(spec, np.linalg.norm(y, axis=1), spec.psi.radial(y), w)

    return m, objective


def _product(spec: OperatorSpec, r, rpsi, w_norm) -> np.ndarray:
    w_norm = np.minimum(w_norm, 1.0 - 1e-15)
    return spec.mu(r) * np.abs(rpsi) * np.maximum(1.0, integral_reciprocal_many(spec.nu, w_norm))


def criterion_quantity(spec: OperatorSpec, kind: str, y, restriction: Restriction = None):
    """mu(y) |R psi_r(y)| max{1, int_0^{||phi_r(y)||} dt/nu}, vectorized over rows of y."""
    dim, objective = _criterion(spec, kind, restriction)
    y = np.asarray(y, dtype=complex)
    if y.shape[-1] != dim:
        raise DimensionError(f"{kind} points live in C^{dim}")
    if np.any(np.linalg.norm(y.reshape(-1, dim), axis=1) >= 1.0):
        raise ValueError("points must lie in the open unit ball")
    out = objective(y)
    return out[0] if y.ndim == 1 else out


def sup_quantity(
    spec: OperatorSpec,
    kind: str = "B4",
    restriction: Restriction = None,
    sampler: SamplerConfig | None = None,
    extra_points=None,
) -> SupremumEstimate:
    dim, objective = _criterion(spec, kind, restriction)
    return maximize(objective, dim, sampler, extra_points)


# -- operator norms -----------------------------------------------------------


def image_norm(spec: OperatorSpec, f: PolyFunction, sampler: SamplerConfig | None = None,
               image: PolyFunction | None = None) -> SupremumEstimate:
    """sup mu |R(Cf)| computed from the exact image (C f vanishes at 0)."""
    cf = apply_exact(spec, f) if image is None else image
    return seminorm(cf, spec.mu, "radial", sampler)


def domain_norm(spec: OperatorSpec, f: PolyFunction, sampler: SamplerConfig | None = None, extra_points=None) -> float:
    f0 = abs(complex(f(np.zeros(spec.dim))))
    return f0 + seminorm(f, spec.nu, "gradient", sampler, extra_points).value


def _ray_points(w: np.ndarray, count: int = 64) -> np.ndarray:
    """Points t w / ||w|| for t in [0, ||w||], where the gradient bound along the ray is used."""
    r = float(np.linalg.norm(w))
    if r == 0.0:
        return np.zeros((1, len(w)), dtype=complex)
    return np.linspace(0.0, r, count)[:, None] * (w / r)


@dataclass(frozen=True)
class BoundCheck:
    """||Cf|| <= M ||f|| evaluated for one function."""

    image_norm: float
    domain_norm: float
    m_value: float
    passed: bool


def operator_bound_check(
    spec: OperatorSpec,
    f: PolyFunction,
    m_estimate: SupremumEstimate,
    sampler: SamplerConfig | None = None,
    rtol: float = 1e-6,
) -> BoundCheck:
    """Check ||Cf||_{B_mu} <= M ||f||_{B_nu} (1 + rtol).

    Both sides are sampled suprema. To keep the comparison honest the
    right-hand searches are seeded where the left-hand one peaked: M at the
    witness z*, and the gradient norm of f along the ray to phi(z*), which is
    the segment the pointwise bound integrates over.
    """
    lhs = image_norm(spec, f, sampler)
    z_star = np.atleast_2d(lhs.witness)
    m_seeded = sup_quantity(spec, "B1", spec.dim, sampler, extra_points=np.vstack([z_star, m_estimate.witness[None, :]]))
    m_value = max(m_estimate.value, m_seeded.value)
    rays = _ray_points(spec.phi(z_star)[0])
    dn = domain_norm(spec, f, sampler, extra_points=rays)
    return BoundCheck(lhs.value, dn, m_value, bool(lhs.value <= m_value * dn * (1.0 + rtol)))


def default_dictionary(
    spec: OperatorSpec,
    series: GSeries | None = None,
    witnesses=None,
    seed: int = 0,
    max_degree: int = 6,
    random_count: int = 32,
) -> list[PolyFunction]:
    """Monomials up to ``max_degree``, truncated beta_w / gamma_w at w = phi(witness), random polynomials."""
    from .holo import _indices_up_to

    m = spec.dim
    out = [PolyFunction.monomial(k) for k in _indices_up_to(m, max_degree, 0)]
    if series is not None and witnesses is not None:
        for z in np.atleast_2d(witnesses):
            w = spec.phi(z[None, :])[0]
            if np.linalg.norm(w) > 0:
                out.append(beta_poly(series, w, degree_cap=12))
                out.append(gamma_poly(series, w, degree_cap=12))
    rng = np.random.default_rng(seed)
    out.extend(random_poly(m, 4, int(rng.integers(2, 6)), rng) for _ in range(random_count))
    return out


@dataclass(frozen=True)
class LowerBound:
    value: float
    best_index: int
    ratios: tuple[float, ...]


def norm_lower_bound(
    spec: OperatorSpec,
    dictionary: Sequence[PolyFunction],
    sampler: SamplerConfig | None = None,
) -> LowerBound:
    """max over the dictionary of ||Cf||_{B_mu} / ||f||_{B_nu}.

    The numerator is a sampled sup (a lower bound); the denominator is also
    sampled, so each ratio is reported as the empirical quotient.
    """
    if not dictionary:
        raise ValueError("empty dictionary")
    ratios = []
    for f in dictionary:
        dn = domain_norm(spec, f, sampler)
        if not dn > 0:
            raise ValueError("dictionary functions need a positive norm")
        ratios.append(image_norm(spec, f, sampler).value / dn)
    i = int(np.argmax(ratios))
    return LowerBound(float(ratios[i]), i, tuple(float(r) for r in ratios))


# -- classifiers ----------------------------------------------------------------


def _serialize_restriction(restriction: Restriction):
    if restriction is None:
        return None
    if isinstance(restriction, OrthonormalSystem):
        return {"orthonormal_system": [[[float(c.real), float(c.imag)] for c in row] for row in restriction.vectors]}
    if isinstance(restriction, (int, np.integer)):
        return {"order": int(restriction)}
    return {"coordinates": [int(i) for i in restriction]}


@dataclass
class CriterionReport:
    """Sampled criterion suprema, a boundary profile and verdicts with their rationale."""

    quantity_kind: str
    restriction: Restriction
    sup_estimate: SupremumEstimate
    decay: DecayProfile | None
    verdicts: dict[str, str]
    rationale: dict[str, str]
    quantities: dict[str, float] = field(default_factory=dict)
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.decay is not None and len(self.decay.values):
            if np.max(self.decay.values) > self.sup_estimate.value * (1 + 1e-12):
                # the profile maxima are themselves valid samples
                self.sup_estimate = SupremumEstimate(
                    float(np.max(self.decay.values)), self.sup_estimate.witness,
                    self.sup_estimate.samples_used, self.sup_estimate.refinement_passes, False)

    def to_dict(self) -> dict:
        return {
            "quantity_kind": self.quantity_kind,
            "restriction": _serialize_restriction(self.restriction),
            "sup_estimate": self.sup_estimate.to_dict(),
            "decay": None if self.decay is None else self.decay.to_dict(),
            "verdicts": dict(self.verdicts),
            "rationale": dict(self.rationale),
            "quantities": {k: float(v) for k, v in self.quantities.items()},
            "extras": self.extras,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


@dataclass(frozen=True)
class RestrictionPlan:
    """Which restrictions the classifiers evaluate.

    Defaults: B1 on the full standard basis, B2 on every singleton and on
    the full index set, B3 for every truncation order.
    """

    b1: Restriction = None
    b2: tuple[tuple[int, ...], ...] | None = None
    b3: tuple[int, ...] | None = None

    def resolve(self, m: int):
        b1 = m if self.b1 is None else self.b1
        b2 = self.b2 if self.b2 is not None else tuple((i,) for i in range(m)) + ((tuple(range(m)),) if m > 1 else ())
        b3 = self.b3 if self.b3 is not None else tuple(range(1, m + 1))
        return b1, b2, b3


def boundary_profile(
    spec: OperatorSpec,
    kind: str = "B4",
    restriction: Restriction = None,
    shells: int = PROFILE_SHELLS,
    directions: int = 256,
    seed: int = 0,
) -> DecayProfile:
    """Max of the criterion over samples with ||phi(y)|| >= 1 - 2^-j, j = 1..shells.

    Samples are drawn on the shells ||y|| = 1 - 2^-j and uniformly in the
    ball; thresholds no sample reaches are dropped from the profile.
    """
    dim, objective = _criterion(spec, kind, restriction)
    rng = np.random.default_rng(seed)
    radii = np.minimum(1.0 - 2.0 ** -np.arange(1, shells + 1), 1.0 - EDGE)
    ys = [r * sphere_directions(rng, directions, dim) for r in radii]
    ys.append(ball_points(rng, directions, dim))
    y = np.concatenate(ys)
    if kind in ("B1", "B2"):
        x = OrthonormalSystem.standard(spec.dim, range(restriction)) if isinstance(restriction, (int, np.integer)) \
            else restriction if isinstance(restriction, OrthonormalSystem) \
            else OrthonormalSystem.standard(spec.dim, sorted(set(restriction)))
        img = np.linalg.norm(spec.phi(x.embed(y)), axis=1)
    elif kind == "B3":
        img = np.linalg.norm(spec.phi(y)[:, : int(restriction)], axis=1)
    else:
        img = np.linalg.norm(spec.phi(y), axis=1)
    vals = objective(y)
    keep_r, keep_v = [], []
    for r in radii:
        mask = img >= r
        if not np.any(mask):
            break
        keep_r.append(r)
        keep_v.append(float(np.max(vals[mask])))
    return DecayProfile(np.array(keep_r), np.array(keep_v))


def _trend_vanishes(profile: DecayProfile) -> bool:
    if len(profile.values) < COMPACT_TAIL:
        return False
    peak = profile.peak
    if peak == 0.0:
        return True
    tail = profile.values[-COMPACT_TAIL:]
    return bool(np.all(np.diff(tail) <= 1e-12 * peak) and profile.values[-1] < COMPACT_RATIO * peak)


def _growing(profile: DecayProfile) -> bool:
    """Shell maxima that keep rising towards the boundary."""
    v = profile.values
    if len(v) < COMPACT_TAIL or profile.peak == 0.0:
        return False
    tail = v[-COMPACT_TAIL:]
    return bool(np.all(np.diff(tail) > 0) and tail[-1] > 2.0 * tail[0])


def _shell_profile(spec: OperatorSpec, kind: str, restriction: Restriction, directions: int = 256, seed: int = 0):
    dim, objective = _criterion(spec, kind, restriction)
    rng = np.random.default_rng(seed)
    radii = np.minimum(1.0 - 2.0 ** -np.arange(1, PROFILE_SHELLS + 1), 1.0 - EDGE)
    u = sphere_directions(rng, directions, dim)
    return DecayProfile(radii, np.array([float(np.max(objective(r * u))) for r in radii]))


def classify_boundedness(
    spec: OperatorSpec,
    sampler: SamplerConfig | None = None,
    plan: RestrictionPlan | None = None,
    dictionary: Sequence[PolyFunction] | None = None,
    series: GSeries | None = None,
) -> CriterionReport:
    """Sampled M for all four criteria, a sandwich ratio and a little-Bloch flag for psi.

    A finite sampled M cannot prove boundedness; the verdict also looks at the
    shell maxima of B4 along ||y|| -> 1 and reports "unbounded-consistent"
    when they keep rising.
    """
    plan = plan or RestrictionPlan()
    b1, b2, b3 = plan.resolve(spec.dim)
    quantities: dict[str, float] = {}
    est4 = sup_quantity(spec, "B4", None, sampler)
    quantities["B4"] = est4.value
    est1 = sup_quantity(spec, "B1", b1, sampler)
    quantities["B1"] = est1.value
    for F in b2:
        quantities[f"B2{list(F)}"] = sup_quantity(spec, "B2", F, sampler).value
    for k in b3:
        quantities[f"B3(k={k})"] = sup_quantity(spec, "B3", k, sampler).value

    profile = _shell_profile(spec, "B4", None)
    verdicts, rationale = {}, {}
    if est4.value == 0.0:
        verdicts["bounded"] = "bounded (proved-at-desk-scale)"
        rationale["bounded"] = "R psi vanishes identically on the samples: zero operator"
    elif _growing(profile):
        verdicts["bounded"] = "unbounded-consistent"
        rationale["bounded"] = "B4 shell maxima keep increasing towards the boundary"
    else:
        verdicts["bounded"] = "bounded"
        rationale["bounded"] = "finite sampled M with non-increasing boundary trend"

    psi_profile = decay_profile(spec.psi, spec.mu)
    psi_little = psi_profile.tends_to_zero()
    verdicts["psi_little_bloch"] = "yes" if psi_little else "no"
    verdicts["little_to_little_bounded"] = (
        "bounded" if psi_little and verdicts["bounded"].startswith("bounded") else "not established"
    )
    rationale["little_to_little_bounded"] = "needs psi in the little space and finite M"

    extras = {"psi_profile": psi_profile.to_dict(), "dim_Y": 1,
              "weak_identity_note": "Y is finite-dimensional, so the identity of Y is weakly compact"}
    if dictionary is not None or series is not None:
        dictionary = dictionary if dictionary is not None else default_dictionary(spec, series, est4.witness[None, :])
        lb = norm_lower_bound(spec, dictionary, sampler)
        quantities["norm_lower_bound"] = lb.value
        m_value = est1.value
        extras["sandwich_ratio"] = lb.value / m_value if m_value > 0 else None
    return CriterionReport("B1", b1, est1, profile, verdicts, rationale, quantities, extras)


def classify_compactness(
    spec: OperatorSpec,
    sampler: SamplerConfig | None = None,
    kind: str = "B4",
    restriction: Restriction = None,
    range_margin: float = 1e-6,
) -> CriterionReport:
    """Compactness verdict branching on whether int_0^1 dt/nu diverges."""
    est = sup_quantity(spec, kind, restriction, sampler)
    verdicts, rationale = {}, {}
    profile = None
    if est.value == 0.0:
        verdicts["compact"] = "compact (proved-at-desk-scale)"
        rationale["compact"] = "zero operator"
    elif spec.nu.integral_divergent:
        profile = boundary_profile(spec, kind, restriction)
        if spec.phi.range_sup <= 1.0 - range_margin:
            verdicts["compact"] = "compact"
            rationale["compact"] = (
                f"sampled sup ||phi|| = {spec.phi.range_sup:.6g} < 1: the image stays in a compact part of the ball"
            )
        elif _trend_vanishes(profile):
            verdicts["compact"] = "compact-consistent"
            rationale["compact"] = "criterion maxima over ||phi(y)|| >= 1 - 2^-j fall below 1e-3 of the peak"
        else:
            verdicts["compact"] = "not-compact-consistent"
            rationale["compact"] = "criterion maxima do not vanish as ||phi(y)|| -> 1"
    else:
        norm = seminorm(spec.psi, spec.mu, "radial", sampler).value + abs(complex(spec.psi(np.zeros(spec.dim))))
        if np.isfinite(norm):
            verdicts["compact"] = "compact"
            rationale["compact"] = (
                "int dt/nu < 1 converges, where compactness reduces to psi in B_mu; "
                f"polynomial psi has finite norm {norm:.6g}"
            )
        else:
            verdicts["compact"] = "not compact"
            rationale["compact"] = "psi has infinite B_mu norm"
    return CriterionReport(kind, restriction, est, profile, verdicts, rationale, {kind: est.value})


# -- probes ---------------------------------------------------------------------


@dataclass(frozen=True)
class NetResult:
    size: int
    centers: np.ndarray
    points_considered: int


def greedy_net(points: np.ndarray, eps: float) -> np.ndarray:
    """Indices of a greedy farthest-point eps-net; the first point seeds the net."""
    points = np.asarray(points)
    if len(points) == 0:
        return np.zeros(0, dtype=int)
    centers = [0]
    dist = np.linalg.norm(points - points[0], axis=1)
    while True:
        i = int(np.argmax(dist))
        if dist[i] <= eps:
            break
        centers.append(i)
        dist = np.minimum(dist, np.linalg.norm(points - points[i], axis=1))
    return np.array(centers)


def epsnet_probe(
    phi: SelfMap,
    r: float,
    eps: float,
    samples: int = 2000,
    seed: int = 0,
    points=None,
) -> NetResult:
    """Greedy eps-net size of {phi(y) : ||phi(y)|| < r} over sampled and/or given inputs."""
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    if not 0.0 < r < 1.0:
        raise ValueError("r must lie in (0, 1)")
    chunks = []
    if points is not None:
        chunks.append(np.asarray(points, dtype=complex).reshape(-1, phi.dim))
    if samples:
        chunks.append(ball_points(np.random.default_rng(seed), samples, phi.dim))
    y = np.concatenate(chunks) if chunks else np.zeros((0, phi.dim), dtype=complex)
    img = phi(y)
    img = img[np.linalg.norm(img, axis=1) < r]
    idx = greedy_net(img, eps)
    return NetResult(len(idx), img[idx], len(img))


def counterexample_map(m: int) -> SelfMap:
    """phi(z) = (z_1, z_2^2, ..., z_m^m)."""
    comps = []
    for k in range(m):
        e = [0] * m
        e[k] = k + 1
        comps.append(PolyFunction.monomial(e))
    # each |z_k|^{k} <= |z_k| so ||phi(z)|| <= ||z|| < 1
    return SelfMap(tuple(comps), 1.0, True)


def counterexample_points(m: int) -> np.ndarray:
    """z_k = 4^{-1/k} e_k, whose images are e_k / 4."""
    z = np.zeros((m, m), dtype=complex)
    for k in range(1, m + 1):
        z[k - 1, k - 1] = 4.0 ** (-1.0 / k)
    return z


def pairwise_distances(points: np.ndarray) -> list[tuple[int, int, float]]:
    points = np.asarray(points)
    return [
        (i, j, float(np.linalg.norm(points[i] - points[j])))
        for i, j in itertools.combinations(range(len(points)), 2)
    ]


@dataclass(frozen=True)
class FactorizationReport:
    passed: bool
    worst_error: float
    dim_y: int


def weak_factorization_check(
    spec: OperatorSpec,
    f: PolyFunction,
    k: int = 2,
    samples: int = 100,
    seed: int = 0,
    tol: float = 1e-10,
) -> FactorizationReport:
    """C f = Q_w C~ P_y f with Y = C^k, y = e_1 and w the first coordinate functional.

    P_y f = f(.) y is Y-valued, C~ applies the operator to each component and
    Q_w pairs the result with w.
    """
    if k < 1:
        raise ValueError("k must be positive")
    y = np.zeros(k, dtype=complex)
    y[0] = 1.0
    w = np.zeros(k, dtype=complex)
    w[0] = 1.0
    lifted = [f * y[j] for j in range(k)]
    transformed = [apply_exact(spec, comp) for comp in lifted]
    z = ball_points(np.random.default_rng(seed), samples, spec.dim)
    vector_values = np.stack([t(z) for t in transformed], axis=-1)
    left = vector_values @ w
    right = apply_exact(spec, f)(z)
    err = float(np.max(np.abs(left - right), initial=0.0))
    return FactorizationReport(err <= tol, err, k)


@dataclass(frozen=True)
class ChainReport:
    passed: bool
    checked: int
    worst_slack: float
    witness: np.ndarray | None


def proof_chain_check(
    spec: OperatorSpec,
    series: GSeries,
    consts: TestConstants,
    samples: int = 1000,
    seed: int = 0,
    tol: float = 1e-10,
    max_draws: int = 200_000,
) -> ChainReport:
    """At w = phi(z) with r1 <= ||w|| <= R:

        mu |R psi| int_0^||w|| dt/nu <= mu |R psi| G(||w||) / C1 <= (C3/C1) mu |R psi| G(||w||^2).

    Points are drawn until ``samples`` of them land in that range (or
    ``max_draws`` are spent); a map whose image never reaches r1 is checked
    vacuously.
    """
    if series.weight is not spec.nu and series.weight.name != spec.nu.name:
        raise ValueError("the series must be built from the domain weight nu")
    rng = np.random.default_rng(seed)
    lo, hi = consts.r1_unit_integral, series.eval_radius_max
    found = []
    drawn = 0
    while sum(len(c) for c in found) < samples and drawn < max_draws:
        batch = 4 * samples
        radii = 1.0 - rng.random(batch) ** 3
        z = radii[:, None] * sphere_directions(rng, batch, spec.dim)
        drawn += batch
        wn = np.linalg.norm(spec.phi(z), axis=1)
        found.append(z[(wn >= lo) & (wn <= hi)])
    z = np.concatenate(found)[:samples] if found else np.zeros((0, spec.dim), dtype=complex)
    if len(z) == 0:
        return ChainReport(True, 0, np.inf, None)
    wn = np.linalg.norm(spec.phi(z), axis=1)
    weight = spec.mu(np.linalg.norm(z, axis=1)) * np.abs(spec.psi.radial(z))
    left = weight * integral_reciprocal_many(spec.nu, wn)
    middle = weight * series.antiderivative(wn).real / consts.C1
    right = weight * consts.C3 / consts.C1 * series.antiderivative(wn**2).real
    slack = np.minimum(middle - left, right - middle) + tol * np.maximum(1.0, right)
    i = int(np.argmin(slack))
    return ChainReport(bool(slack[i] >= 0), len(z), float(slack[i]), z[i])
