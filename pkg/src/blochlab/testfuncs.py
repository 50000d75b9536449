"""The lacunary series g built from a normal weight, its constants and the test functions beta_w, gamma_w.

g(z) = 1 + sum_{k > k0} 2^k z^{n_k}, with n_k = floor(1 / (1 - r_k)) and
r_k the point where the weight drops to 2^-k. Its antiderivative
G(eta) = eta + sum 2^k eta^{n_k + 1} / (n_k + 1) drives both test functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .holo import PolyFunction
from .weights import NormalWeight, WeightError, check_normality, weight_inverse

TAIL_TOLERANCE = 1e-9
DEFAULT_RADIUS = 0.999
# inversion reaches much closer to 1 than the usual scan edge so that large k stay exact
INVERSION_EDGE = 1e-14


class SeriesError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class GSeries:
    """Truncated lacunary series with merged exponents.

    ``terms`` keeps the raw (k, n_k, r_k) data; ``exponents`` and
    ``coefficients`` are the merged table actually summed.
    """

    weight: NormalWeight
    k0: int
    terms: tuple[tuple[int, int, float], ...]
    k_max: int
    eval_radius_max: float
    tail_bound: float
    exponents: np.ndarray = field(repr=False)
    coefficients: np.ndarray = field(repr=False)

    def _check(self, z):
        z = np.asarray(z, dtype=complex)
        if np.any(np.abs(z) > self.eval_radius_max * (1 + 1e-12)):
            raise SeriesError(f"|z| exceeds the certified radius {self.eval_radius_max}")
        return z

    def __call__(self, z):
        z = self._check(z)
        powers = z[..., None] ** self.exponents
        return 1.0 + powers @ self.coefficients

    def antiderivative(self, eta):
        eta = self._check(eta)
        powers = eta[..., None] ** (self.exponents + 1)
        return eta + powers @ (self.coefficients / (self.exponents + 1))

    def summary(self, count: int = 10) -> dict:
        return {
            "k0": self.k0,
            "k_max": self.k_max,
            "eval_radius_max": self.eval_radius_max,
            "tail_bound": self.tail_bound,
            "terms": [[k, n] for k, n, _ in self.terms[:count]],
        }


def g_eval(series: GSeries, z):
    return series(z)


def g_antiderivative(series: GSeries, eta):
    return series.antiderivative(eta)


def _exponent(r: float) -> int:
    return math.floor(1.0 / (1.0 - r))


def _tail_sum(nu: NormalWeight, first_k: int, radius: float, known: dict[int, int]) -> float:
    """Upper bound for sum_{k >= first_k} 2^k radius^{n_k}.

    Exponents that are not available exactly get a lower bound from the
    (W2) monotonicity: for t >= t0, nu(t) >= nu(t0) ((1 - t)/(1 - t0))^b, so
    1 - r_k <= (1 - t0) (2^-k / nu(t0))^{1/b}.
    """
    t0 = 1.0 - INVERSION_EDGE
    nu0 = float(nu(t0))
    b = nu.exponent_b
    total = 0.0
    log_r = math.log(radius)
    k = first_k
    while True:
        if k in known:
            n = known[k]
        else:
            gap = (1.0 - t0) * (2.0 ** -k / nu0) ** (1.0 / b)
            n = math.floor(1.0 / gap) - 1 if gap > 0 else math.inf
        log_term = k * math.log(2.0) + n * log_r
        if log_term < -745.0 and k > first_k + 4:
            # remaining terms shrink at least geometrically from here
            break
        total += math.exp(log_term)
        k += 1
    return total


def build_g(
    nu: NormalWeight,
    k_max: int | None = None,
    eval_radius_max: float = DEFAULT_RADIUS,
    check: bool = True,
) -> GSeries:
    """Build g for the weight ``nu``.

    With ``k_max=None`` the smallest k_max >= 8 with certified tail below
    1e-9 at ``eval_radius_max`` is used.
    """
    if not 0.0 < eval_radius_max < 1.0:
        raise SeriesError("eval_radius_max must lie in (0, 1)")
    if k_max is not None and k_max < 8:
        raise SeriesError("k_max must be at least 8")
    if check:
        report = check_normality(nu)
        if not report.passed:
            raise WeightError(f"weight {nu.name!r} failed the normality checks")
    k0 = math.floor(math.log2(1.0 / float(nu(nu.delta))))
    first = max(k0 + 1, 1)

    known: dict[int, int] = {}
    radii: dict[int, float] = {}
    k = first
    while True:
        try:
            r = weight_inverse(nu, 2.0 ** -k, edge=INVERSION_EDGE)
        except WeightError:
            if k == first:
                raise SeriesError(f"level 2^-{k} is not attained on the monotone tail") from None
            break
        radii[k] = r
        known[k] = _exponent(r)
        k += 1
        if k > 200:
            break

    if k_max is None:
        k_max = max(8, first)
        while _tail_sum(nu, k_max + 1, eval_radius_max, known) >= TAIL_TOLERANCE:
            k_max += 1
            if k_max not in known:
                raise SeriesError("tail bound not reachable; lower eval_radius_max")
    elif k_max not in known:
        raise SeriesError(f"r_k for k={k_max} lies beyond the invertible range")
    tail = _tail_sum(nu, k_max + 1, eval_radius_max, known)
    if tail >= TAIL_TOLERANCE:
        raise SeriesError(
            f"tail bound {tail:.3e} at radius {eval_radius_max}; use a larger k_max or a smaller radius"
        )

    terms = tuple((k, known[k], radii[k]) for k in range(first, k_max + 1))
    merged: dict[int, float] = {}
    for k, n, _ in terms:
        merged[n] = merged.get(n, 0.0) + 2.0 ** k
    exps = np.array(sorted(merged), dtype=float)
    coefs = np.array([merged[int(n)] for n in exps])
    return GSeries(nu, k0, terms, k_max, eval_radius_max, tail, exps, coefs)


@dataclass(frozen=True)
class TestConstants:
    """C1 <= nu g <= C2 on [0, R]; G(r) <= C3 G(r^2) on [r1_unit_integral, R].

    ``r1_unit_integral`` solves G(r) = 1; ``r1_half_weight`` is the point
    where nu drops to 1/2. They are different numbers.
    """

    __test__ = False

    C1: float
    C2: float
    C3: float
    r1_unit_integral: float
    r1_half_weight: float | None
    grid_size: int

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def default_grid(radius: float, points: int = 4096) -> np.ndarray:
    """Uniform points on [0, radius] merged with geometric points towards the edge."""
    uniform = np.linspace(0.0, radius, points)
    edge = radius - (radius - 0.5) * np.geomspace(1.0, 1e-6, points)
    edge = edge[edge >= 0.5]
    return np.unique(np.concatenate([uniform, edge, [radius]]))


def _refine(fun, grid: np.ndarray, values: np.ndarray, maximize: bool, candidates: int = 8):
    """Polish the best grid values with bounded scalar searches on neighbouring brackets."""
    order = np.argsort(-values if maximize else values, kind="stable")[:candidates]
    best = values[order[0]]
    sign = -1.0 if maximize else 1.0
    for i in order:
        lo = grid[max(i - 1, 0)]
        hi = grid[min(i + 1, len(grid) - 1)]
        if hi <= lo:
            continue
        res = minimize_scalar(lambda t: sign * fun(t), bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-13})
        val = fun(res.x)
        best = max(best, val) if maximize else min(best, val)
    return float(best)


def constants(series: GSeries, grid=None) -> TestConstants:
    radius = series.eval_radius_max
    grid = default_grid(radius) if grid is None else np.asarray(grid, dtype=float)
    if np.any(grid < 0) or np.any(grid > radius):
        raise SeriesError("grid must lie in [0, eval_radius_max]")
    nu = series.weight

    def nu_g(t):
        return float(nu(t)) * float(series(t).real)

    ng = nu(grid) * series(grid).real
    c1 = _refine(nu_g, grid, ng, maximize=False)
    c2 = _refine(nu_g, grid, ng, maximize=True)

    def big_g(r):
        return float(series.antiderivative(r).real)

    if big_g(radius) < 1.0:
        raise SeriesError("the integral of g stays below 1 on the certified interval")
    r1 = brentq(lambda r: big_g(r) - 1.0, 0.0, radius, xtol=1e-15, rtol=4 * np.finfo(float).eps)

    rr = grid[grid >= r1]
    rr = np.unique(np.concatenate([[r1], rr]))
    ratio_vals = series.antiderivative(rr).real / series.antiderivative(rr**2).real
    if not np.all(np.isfinite(ratio_vals)):
        bad = rr[~np.isfinite(ratio_vals)][0]
        raise SeriesError(f"non-finite ratio G(r)/G(r^2) at r={bad}")
    c3 = _refine(lambda r: big_g(r) / big_g(r * r), rr, ratio_vals, maximize=True)

    try:
        half = weight_inverse(nu, 0.5)
    except WeightError:
        half = None
    return TestConstants(c1, c2, c3, float(r1), half, len(grid))


class _TestFunction:
    """Shared plumbing: s = <z, w> and the chain rule through s."""

    series: GSeries
    w: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.w)

    def _s(self, z):
        z = np.asarray(z, dtype=complex)
        if z.shape[-1] != self.dim:
            raise ValueError(f"expected points of dimension {self.dim}")
        return z @ np.conj(self.w)

    def _outer(self, z):
        raise NotImplementedError

    def _outer_derivative(self, z):
        raise NotImplementedError

    def gradient(self, z):
        # d/dz_k of F(<z, w>) is F'(s) conj(w_k)
        d = self._outer_derivative(z)
        return d[..., None] * np.conj(self.w)

    def radial(self, z):
        return self._outer_derivative(z) * self._s(z)


@dataclass(frozen=True, eq=False)
class BetaFunction(_TestFunction):
    """beta_w(z) = G(<z, w>)."""

    series: GSeries
    w: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "w", np.asarray(self.w, dtype=complex).ravel())

    def __call__(self, z):
        return self.series.antiderivative(self._s(z))

    def _outer_derivative(self, z):
        return self.series(self._s(z))


@dataclass(frozen=True, eq=False)
class GammaFunction(_TestFunction):
    """gamma_w(z) = G(<z, w>)^2 / G(||w||^2)."""

    series: GSeries
    w: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.w, dtype=complex).ravel()
        if not np.linalg.norm(w) > 0:
            raise ValueError("gamma_w needs w != 0")
        object.__setattr__(self, "w", w)

    @property
    def normalizer(self) -> float:
        return float(self.series.antiderivative(np.linalg.norm(self.w) ** 2).real)

    def __call__(self, z):
        return self.series.antiderivative(self._s(z)) ** 2 / self.normalizer

    def _outer_derivative(self, z):
        s = self._s(z)
        return 2.0 * self.series.antiderivative(s) * self.series(s) / self.normalizer


def beta(series: GSeries, w, z):
    return BetaFunction(series, w)(z)


def gamma(series: GSeries, w, z):
    return GammaFunction(series, w)(z)


def gamma_compact_sup(series: GSeries, w_norm: float, radius: float = 0.5) -> float:
    """sup over ||z|| <= radius of |gamma_w(z)|.

    g has nonnegative coefficients, so |G(s)| <= G(|s|) and the supremum is
    attained at z = radius w/||w||, giving G(radius ||w||)^2 / G(||w||^2).
    """
    top = float(series.antiderivative(radius * w_norm).real)
    return top**2 / float(series.antiderivative(w_norm**2).real)


def _antiderivative_poly(series: GSeries, s: PolyFunction, degree_cap: int) -> PolyFunction:
    out = s
    for n, c in zip(series.exponents.astype(int), series.coefficients):
        if n + 1 > degree_cap:
            break
        out = out + (c / (n + 1)) * s ** (n + 1)
    return out


def beta_poly(series: GSeries, w, degree_cap: int = 16) -> PolyFunction:
    """Polynomial truncation of beta_w keeping total degree <= degree_cap."""
    s = PolyFunction.linear(np.conj(np.asarray(w, dtype=complex)))
    return _antiderivative_poly(series, s, degree_cap)


def gamma_poly(series: GSeries, w, degree_cap: int = 16) -> PolyFunction:
    """Polynomial truncation of gamma_w; the square is truncated after multiplying."""
    w = np.asarray(w, dtype=complex)
    b = beta_poly(series, w, degree_cap)
    sq = b * b
    kept = {k: c for k, c in sq.coeffs.items() if sum(k) <= degree_cap}
    norm = float(series.antiderivative(np.linalg.norm(w) ** 2).real)
    return PolyFunction(len(w), kept) / norm
