"""Supremum estimation over the unit ball of C^m by shell sampling and local refinement."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .weights import EDGE

_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


def sphere_directions(rng: np.random.Generator, n: int, dim: int) -> np.ndarray:
    """n complex unit vectors uniformly distributed on the sphere of C^dim."""
    v = rng.standard_normal((n, dim)) + 1j * rng.standard_normal((n, dim))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def ball_points(rng: np.random.Generator, n: int, dim: int, radius: float = 1.0) -> np.ndarray:
    """n points uniformly distributed in the ball of radius ``radius`` in C^dim (= R^{2 dim})."""
    u = sphere_directions(rng, n, dim)
    r = radius * rng.random(n) ** (1.0 / (2 * dim))
    return u * r[:, None]


@dataclass(frozen=True)
class SamplerConfig:
    """Shell sampler settings.

    Shells sit at 1 - 2^-j for j = 1..shells, plus a handful of interior
    radii so that objectives peaking near the centre are not missed.
    """

    shells: int = 14
    directions: int = 512
    refinement_passes: int = 3
    refine_top: int = 8
    interior_radii: tuple[float, ...] = (0.0, 0.125, 0.25, 0.375)
    golden_iterations: int = 24
    initial_window: float = 0.1
    seed: int = 0
    edge: float = EDGE

    def radii(self) -> np.ndarray:
        outer = 1.0 - 2.0 ** -np.arange(1, self.shells + 1)
        outer = np.minimum(outer, 1.0 - self.edge)
        return np.unique(np.concatenate([np.asarray(self.interior_radii, float), outer]))

    @classmethod
    def from_dict(cls, d: dict) -> "SamplerConfig":
        known = {k: v for k, v in d.items() if k in cls.__dataclass_fields__}
        if "interior_radii" in known:
            known["interior_radii"] = tuple(known["interior_radii"])
        return cls(**known)


@dataclass(frozen=True)
class SupremumEstimate:
    """Best sampled value of an objective; always a lower bound of the true supremum."""

    value: float
    witness: np.ndarray = field(repr=False)
    samples_used: int
    refinement_passes: int
    converged: bool

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "witness": [[float(c.real), float(c.imag)] for c in np.atleast_1d(self.witness)],
            "samples_used": self.samples_used,
            "refinement_passes": self.refinement_passes,
            "converged": self.converged,
        }


def shell_points(cfg: SamplerConfig, dim: int) -> np.ndarray:
    rng = np.random.default_rng(cfg.seed)
    chunks = []
    for r in cfg.radii():
        if r == 0.0:
            chunks.append(np.zeros((1, dim), dtype=complex))
        else:
            chunks.append(r * sphere_directions(rng, cfg.directions, dim))
    return np.concatenate(chunks)


def _to_real(z: np.ndarray) -> np.ndarray:
    return np.concatenate([z.real, z.imag], axis=-1)


def _to_complex(x: np.ndarray, dim: int) -> np.ndarray:
    return x[..., :dim] + 1j * x[..., dim:]


def _project(x: np.ndarray, limit: float) -> np.ndarray:
    norm = np.linalg.norm(x, axis=-1, keepdims=True)
    scale = np.where(norm > limit, limit / np.maximum(norm, 1e-300), 1.0)
    return x * scale


def maximize(
    objective: Callable[[np.ndarray], np.ndarray],
    dim: int,
    cfg: SamplerConfig | None = None,
    extra_points: np.ndarray | None = None,
    radius: float = 1.0,
) -> SupremumEstimate:
    """Estimate sup of ``objective`` over the ball of C^dim (scaled by ``radius``).

    ``objective`` maps an (N, dim) complex array to N real values. The best
    ``refine_top`` distinct samples are polished by coordinate-wise
    golden-section search on the real coordinates, the window shrinking by
    4x per pass. ``extra_points`` are evaluated alongside the shells.
    """
    cfg = cfg or SamplerConfig()
    limit = radius * (1.0 - cfg.edge)
    pts = shell_points(cfg, dim) * radius
    if extra_points is not None:
        extra = np.asarray(extra_points, dtype=complex).reshape(-1, dim)
        pts = np.concatenate([pts, _to_complex(_project(_to_real(extra), limit), dim)])
    vals = np.asarray(objective(pts), dtype=float)
    vals = np.where(np.isfinite(vals), vals, -np.inf)
    used = len(pts)

    order = np.argsort(-vals, kind="stable")
    seeds = []
    for i in order:
        if len(seeds) == cfg.refine_top:
            break
        if all(np.linalg.norm(pts[i] - pts[j]) > 1e-9 for j in seeds):
            seeds.append(i)
    x = _to_real(pts[seeds])
    fx = vals[seeds].copy()

    converged = True
    window = cfg.initial_window * radius
    passes = 0
    for _ in range(cfg.refinement_passes):
        passes += 1
        start = float(fx.max())
        for c in range(2 * dim):
            x, fx, n = _golden_coordinate(objective, x, fx, c, window, cfg.golden_iterations, limit, dim)
            used += n
        gain = float(fx.max()) - start
        converged = gain <= 1e-6 * max(abs(start), 1e-300)
        window /= 4.0
    best = int(np.argmax(fx))
    return SupremumEstimate(
        value=float(fx[best]),
        witness=_to_complex(x[best], dim),
        samples_used=used,
        refinement_passes=passes,
        converged=converged,
    )


def _golden_coordinate(objective, x, fx, c, window, iterations, limit, dim):
    lo = x[:, c] - window
    hi = x[:, c] + window

    def evaluate(values):
        trial = x.copy()
        trial[:, c] = values
        trial = _project(trial, limit)
        out = np.asarray(objective(_to_complex(trial, dim)), dtype=float)
        return trial, np.where(np.isfinite(out), out, -np.inf)

    a = hi - _GOLDEN * (hi - lo)
    b = lo + _GOLDEN * (hi - lo)
    _, fa = evaluate(a)
    _, fb = evaluate(b)
    n = 2 * len(x)
    for _ in range(iterations):
        left = fa >= fb
        hi = np.where(left, b, hi)
        lo = np.where(left, lo, a)
        new_b = np.where(left, a, lo + _GOLDEN * (hi - lo))
        new_a = np.where(left, hi - _GOLDEN * (hi - lo), b)
        probe = np.where(left, new_a, new_b)
        _, fp = evaluate(probe)
        n += len(x)
        fa, fb = np.where(left, fp, fb), np.where(left, fa, fp)
        a, b = new_a, new_b
    trial, ft = evaluate(0.5 * (a + b))
    n += len(x)
    better = ft > fx
    x = np.where(better[:, None], trial, x)
    fx = np.where(better, ft, fx)
    return x, fx, n
