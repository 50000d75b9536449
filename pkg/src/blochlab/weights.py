"""Radial normal weights on [0, 1) and the integrals built from them."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np
from scipy import integrate
from scipy.interpolate import PchipInterpolator

EDGE = 1e-6

# log-variable panel table used by the vectorised reciprocal integral
_PANEL_WIDTH = 0.05
_TABLE_EDGE = 1e-12
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


class WeightError(ValueError):
    """Invalid weight input: non-positive values, out-of-domain radii, unattained levels."""


class AccuracyError(RuntimeError):
    def __init__(self, message: str, achieved: float):
        super().__init__(f"{message} (achieved tolerance {achieved:.3e})")
        self.achieved = achieved


class ConsistencyError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class NormalWeight:
    """A radial weight mu on [0, 1) together with its normality data.

    ``evaluate`` must accept numpy arrays. ``integral_divergent`` is the
    analytic fact whether the integral of 1/mu over [0, 1) diverges; it is
    corroborated numerically by :func:`divergence_trend` but never decided
    from samples.
    """

    evaluate: Callable[[np.ndarray], np.ndarray]
    delta: float
    exponent_a: float
    exponent_b: float
    integral_divergent: bool
    tail_monotone_from: float = 0.0
    name: str = "custom"
    alpha: float | None = field(default=None)
    # optional mu(1 - g) as a function of the gap g, accurate when g is tiny
    evaluate_gap: Callable[[np.ndarray], np.ndarray] | None = field(default=None, repr=False)

    def __post_init__(self):
        if not 0.0 <= self.delta < 1.0:
            raise WeightError(f"delta must lie in [0, 1), got {self.delta}")
        if not 0.0 < self.exponent_a < self.exponent_b:
            raise WeightError(
                f"need 0 < a < b, got a={self.exponent_a}, b={self.exponent_b}"
            )
        if not 0.0 <= self.tail_monotone_from < 1.0:
            raise WeightError("tail_monotone_from must lie in [0, 1)")
        grid = np.linspace(0.0, 1.0 - EDGE, 256)
        _require_positive(self, grid)

    def __call__(self, t):
        return self.evaluate(np.asarray(t, dtype=float))

    def at_gap(self, g):
        """mu(1 - g)."""
        g = np.asarray(g, dtype=float)
        if self.evaluate_gap is not None:
            return self.evaluate_gap(g)
        return self.evaluate(1.0 - g)

    @property
    def is_standard(self) -> bool:
        """True for mu(t) = 1 - t^2, the only weight the invariant norm is defined for."""
        return self.alpha == 1.0

    @cached_property
    def _reciprocal_table(self):
        s_max = -np.log(_TABLE_EDGE)
        n_panels = int(np.ceil(s_max / _PANEL_WIDTH))
        left = np.arange(n_panels) * _PANEL_WIDTH
        panel = _gl_panel(self, left, np.full(n_panels, _PANEL_WIDTH))
        cumulative = np.concatenate([[0.0], np.cumsum(panel)])
        return cumulative


def _require_positive(w: NormalWeight, grid: np.ndarray) -> None:
    values = w(grid)
    bad = np.flatnonzero(~(values > 0))
    if bad.size:
        t = float(grid[bad[0]])
        raise WeightError(f"weight is not positive at t={t:.6g} (value {values[bad[0]]!r})")


def _gl_panel(w: NormalWeight, left: np.ndarray, width: np.ndarray) -> np.ndarray:
    # integral of 1/mu over t in panels of s = -log(1 - t); dt = exp(-s) ds
    s = left[:, None] + 0.5 * width[:, None] * (_GL_NODES[None, :] + 1.0)
    gap = np.exp(-s)
    integrand = gap / w.at_gap(gap)
    return 0.5 * width * (integrand @ _GL_WEIGHTS)


def power_weight(alpha: float, delta: float | None = None) -> NormalWeight:
    """mu(t) = (1 - t^2)^alpha with exponents a = alpha/2, b = alpha + 1/2.

    The ratio (1 - t^2)^alpha / (1 - t)^a only starts decreasing at
    t = a / (2 alpha - a) = 1/3, which is the default delta.
    """
    if alpha <= 0:
        raise WeightError("alpha must be positive")
    a = alpha / 2.0
    b = alpha + 0.5
    if delta is None:
        delta = a / (2.0 * alpha - a)
    name = "standard" if alpha == 1.0 else f"power({alpha:g})"
    return NormalWeight(
        evaluate=lambda t: ((1.0 - t) * (1.0 + t)) ** alpha,
        evaluate_gap=lambda g: (g * (2.0 - g)) ** alpha,
        delta=delta,
        exponent_a=a,
        exponent_b=b,
        integral_divergent=alpha >= 1.0,
        tail_monotone_from=0.0,
        name=name,
        alpha=float(alpha),
    )


def standard_weight() -> NormalWeight:
    return power_weight(1.0)


def table_weight(
    knots: Sequence[Sequence[float]],
    *,
    delta: float = 0.0,
    exponent_a: float = 0.5,
    exponent_b: float = 1.5,
    integral_divergent: bool = False,
    tail_monotone_from: float = 0.0,
) -> NormalWeight:
    """Monotone-cubic interpolation of ``[[t, mu(t)], ...]`` knots.

    Values beyond the last knot are held constant.
    """
    arr = np.asarray(knots, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 2:
        raise WeightError("table knots must be a list of [t, value] pairs (at least two)")
    if arr[0, 0] != 0.0:
        raise WeightError("first knot must sit at t = 0")
    if np.any(np.diff(arr[:, 0]) <= 0) or arr[-1, 0] >= 1.0:
        raise WeightError("knot abscissae must be strictly increasing inside [0, 1)")
    interp = PchipInterpolator(arr[:, 0], arr[:, 1], extrapolate=False)
    last_t, last_v = arr[-1]

    def evaluate(t):
        t = np.asarray(t, dtype=float)
        return np.where(t >= last_t, last_v, interp(np.minimum(t, last_t)))

    return NormalWeight(
        evaluate=evaluate,
        delta=delta,
        exponent_a=exponent_a,
        exponent_b=exponent_b,
        integral_divergent=integral_divergent,
        tail_monotone_from=tail_monotone_from,
        name="table",
    )


def weight_from_config(spec: dict) -> NormalWeight:
    family = spec.get("family")
    if family == "power":
        return power_weight(float(spec["alpha"]), spec.get("delta"))
    if family == "table":
        extra = {
            k: spec[k]
            for k in ("delta", "exponent_a", "exponent_b", "integral_divergent", "tail_monotone_from")
            if k in spec
        }
        return table_weight(spec["knots"], **extra)
    raise WeightError(f"unknown weight family {family!r}")


@dataclass(frozen=True)
class NormalityReport:
    w1_monotone: bool
    w1_limit: bool
    w2_monotone: bool
    w2_divergence: bool
    tail_monotone: bool
    worst_violation: dict[str, float]
    w1_tail_exponent: float
    w2_tail_exponent: float

    @property
    def passed(self) -> bool:
        return (
            self.w1_monotone
            and self.w1_limit
            and self.w2_monotone
            and self.w2_divergence
            and self.tail_monotone
        )


def _worst_increase(values: np.ndarray) -> float:
    scale = np.maximum(np.abs(values[:-1]), np.finfo(float).tiny)
    return float(np.max(np.diff(values) / scale, initial=0.0))


def _tail_exponent(w: NormalWeight, power: float) -> float:
    # local exponent c with mu(t)/(1-t)^power ~ (1-t)^c, fitted on 1 - 10^-k, k=2..6
    gaps = 10.0 ** -np.arange(2, 7)
    ratio = w(1.0 - gaps) / gaps**power
    slope = np.polyfit(np.log(gaps), np.log(ratio), 1)[0]
    return float(slope)


def check_normality(w: NormalWeight, grid_points: int = 2048, rtol: float = 1e-10) -> NormalityReport:
    """Certify (W1), (W2) and tail monotonicity on a grid over [delta, 1 - EDGE].

    Monotonicity is judged with relative tolerance ``rtol`` between neighbours;
    the limit conditions are judged from the fitted power-law exponent of the
    ratio over the gaps 1e-2 .. 1e-6 (positive means the ratio tends to zero).
    """
    if grid_points < 16:
        raise ValueError("grid_points must be at least 16")
    k = np.arange(grid_points + 1)
    grid = w.delta + k * (1.0 - w.delta - EDGE) / grid_points
    _require_positive(w, np.linspace(0.0, 1.0 - EDGE, grid_points + 1))
    mu = w(grid)
    r1 = mu / (1.0 - grid) ** w.exponent_a
    r2 = mu / (1.0 - grid) ** w.exponent_b
    w1_violation = _worst_increase(r1)
    w2_violation = _worst_increase(-r2)
    tail_grid = np.linspace(w.tail_monotone_from, 1.0 - EDGE, grid_points + 1)
    tail_violation = _worst_increase(w(tail_grid))
    e1 = _tail_exponent(w, w.exponent_a)
    e2 = _tail_exponent(w, w.exponent_b)
    return NormalityReport(
        w1_monotone=w1_violation <= rtol,
        w1_limit=e1 > 1e-3,
        w2_monotone=w2_violation <= rtol,
        w2_divergence=e2 < -1e-3,
        tail_monotone=tail_violation <= rtol,
        worst_violation={"w1": w1_violation, "w2": w2_violation, "tail": tail_violation},
        w1_tail_exponent=e1,
        w2_tail_exponent=e2,
    )


def integral_reciprocal(w: NormalWeight, r: float, tol: float = 1e-9) -> float:
    """Integral of dt / mu(t) over [0, r] by adaptive Gauss-Kronrod.

    Integrates in s = -log(1 - t), where the integrand exp(-s) / mu(1 - exp(-s))
    stays smooth even for r extremely close to 1.
    """
    r = float(r)
    if not 0.0 <= r < 1.0:
        raise WeightError(f"radius must lie in [0, 1), got {r}")
    if r == 0.0:
        return 0.0

    def integrand(s):
        gap = np.exp(-s)
        return float(gap / w.at_gap(gap))

    value, err = integrate.quad(integrand, 0.0, -np.log1p(-r), epsabs=1e-12, epsrel=1e-12, limit=200)
    if err > tol:
        raise AccuracyError("reciprocal integral did not converge", err)
    return value


def integral_reciprocal_many(w: NormalWeight, r) -> np.ndarray:
    """Vectorised reciprocal integral through a cached panel table.

    Works in s = -log(1 - t) with fixed-width panels and 16-point
    Gauss-Legendre on the partial last panel; valid for r < 1 - 1e-12.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r < 0.0) or np.any(r >= 1.0 - _TABLE_EDGE):
        raise WeightError("radii must lie in [0, 1 - 1e-12)")
    table = w._reciprocal_table
    s = -np.log1p(-r.ravel())
    idx = np.minimum((s // _PANEL_WIDTH).astype(int), table.size - 2)
    left = idx * _PANEL_WIDTH
    partial = _gl_panel(w, left, s - left)
    return (table[idx] + partial).reshape(r.shape)


def divergence_trend(w: NormalWeight) -> np.ndarray:
    """Reciprocal integrals up to 1 - 10^-k for k = 2..6 (corroborates ``integral_divergent``)."""
    return integral_reciprocal_many(w, 1.0 - 10.0 ** -np.arange(2, 7))


def weight_inverse(w: NormalWeight, y: float, edge: float = EDGE) -> float:
    """Solve mu(t) = y on the non-increasing tail [tail_monotone_from, 1 - edge] by bisection."""
    lo, hi = w.tail_monotone_from, 1.0 - edge
    top, bottom = float(w(lo)), float(w(hi))
    if not bottom < y < top:
        raise WeightError(f"level {y} is outside the attained range ({bottom}, {top}) of the tail")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if float(w(mid)) > y:
            lo = mid
        else:
            hi = mid
    t = 0.5 * (lo + hi)
    # adjacent floats can straddle y by more than 1e-12 where mu is steep
    resolution = abs(float(w(lo)) - float(w(hi)))
    if abs(float(w(t)) - y) > max(1e-12, resolution):
        raise ConsistencyError(f"bisection residual {abs(float(w(t)) - y):.3e} at t={t}")
    return t


def r_mu_formula(delta: float, max_mu: float, min_mu: float) -> float:
    return delta * max_mu / min_mu + 1.0 - delta


def weighted_primitive_max(w: NormalWeight, grid_points: int = 4096) -> float:
    """Largest observed mu(r) * integral_reciprocal(r) over a grid reaching 1 - EDGE."""
    r = np.concatenate([
        np.linspace(0.0, 0.99, grid_points),
        1.0 - np.geomspace(1e-2, EDGE, grid_points // 4),
    ])
    return float(np.max(w(r) * integral_reciprocal_many(w, r)))


def r_mu_constant(w: NormalWeight, grid_points: int = 2048) -> float:
    """R_mu = delta M_mu / m_mu + 1 - delta, with m_mu, M_mu estimated on grids.

    Also checks mu(r) * int_0^r dt/mu < R_mu on a shell grid.
    """
    low = np.linspace(0.0, w.delta, grid_points + 1)
    full = np.linspace(0.0, 1.0 - EDGE, grid_points + 1)
    min_mu = float(np.min(w(low)))
    max_mu = float(np.max(w(full)))
    value = r_mu_formula(w.delta, max_mu, min_mu)
    observed = weighted_primitive_max(w, grid_points)
    if not observed < value:
        raise ConsistencyError(
            f"mu * int 1/mu reached {observed:.6g} >= R_mu = {value:.6g}; weight not normal or grid too coarse"
        )
    return value


def sup_weight(w: NormalWeight, grid_points: int = 2048) -> float:
    """M_mu estimated on a grid over [0, 1 - EDGE]."""
    return float(np.max(w(np.linspace(0.0, 1.0 - EDGE, grid_points + 1))))
