"""Ball automorphisms, the invariant gradient and the pseudohyperbolic distance."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

FD_STEP = 1e-5


class SingularityError(ArithmeticError):
    pass


def _inner(z, w):
    """<z, w> = sum z_k conj(w_k), broadcasting over leading axes."""
    return np.sum(np.asarray(z) * np.conj(w), axis=-1)


def _apply(a: np.ndarray, z: np.ndarray) -> np.ndarray:
    # a, z broadcast to (..., m)
    a = np.asarray(a, dtype=complex)
    z = np.asarray(z, dtype=complex)
    a2 = np.sum(np.abs(a) ** 2, axis=-1, keepdims=True)
    za = _inner(z, a)[..., None]
    zero = a2 == 0.0
    safe = np.where(zero, 1.0, a2)
    pz = np.where(zero, 0.0, za * a / safe)
    qz = z - pz
    s = np.sqrt(1.0 - a2)
    denom = 1.0 - za
    if np.any(np.abs(denom) < 1e-14):
        raise SingularityError("1 - <z, a> vanishes")
    out = (a - pz - s * qz) / denom
    # phi_0(z) = -z by convention
    return np.where(zero, -z, out)


@dataclass(frozen=True, eq=False)
class MoebiusMap:
    """phi_a(z) = (a - P_a z - s_a Q_a z) / (1 - <z, a>), s_a = sqrt(1 - ||a||^2)."""

    center: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.center, dtype=complex).ravel()
        if not np.linalg.norm(a) < 1.0:
            raise ValueError("the centre must lie in the open unit ball")
        object.__setattr__(self, "center", a)

    @property
    def s(self) -> float:
        return float(np.sqrt(1.0 - np.linalg.norm(self.center) ** 2))

    def project(self, z) -> np.ndarray:
        """P_a z, the zero map when a = 0."""
        a = self.center
        a2 = float(np.vdot(a, a).real)
        z = np.asarray(z, dtype=complex)
        if a2 == 0.0:
            return np.zeros_like(z)
        return _inner(z, a)[..., None] * a / a2

    def __call__(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        if np.any(np.linalg.norm(z, axis=-1) >= 1.0):
            raise ValueError("points must lie in the open unit ball")
        return _apply(self.center, z)


def apply(a, z) -> np.ndarray:
    return MoebiusMap(a)(z)


def invariant_gradient(f, z, step: float = FD_STEP) -> np.ndarray:
    """||grad (f o phi_z)(0)|| for each row of ``z``.

    Central differences along each coordinate axis of u at u = 0 with one
    Richardson extrapolation (h and h/2). f is holomorphic, so the real-axis
    difference quotient is the complex partial derivative.
    """
    z = np.asarray(z, dtype=complex)
    single = z.ndim == 1
    pts = z.reshape(-1, z.shape[-1])
    m = pts.shape[1]
    grads = np.empty(pts.shape, dtype=complex)
    for k in range(m):
        e = np.zeros(m)
        e[k] = 1.0

        def diff(h):
            plus = f(_apply(pts, h * e[None, :]))
            minus = f(_apply(pts, -h * e[None, :]))
            return (plus - minus) / (2.0 * h)

        grads[:, k] = (4.0 * diff(step / 2.0) - diff(step)) / 3.0
    out = np.linalg.norm(grads, axis=1)
    return out[0] if single else out


def pseudohyperbolic(z, w) -> np.ndarray:
    """rho(z, w) = sqrt(1 - (1 - ||z||^2)(1 - ||w||^2) / |1 - <z, w>|^2)."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    nz = np.sum(np.abs(z) ** 2, axis=-1)
    nw = np.sum(np.abs(w) ** 2, axis=-1)
    denom = np.abs(1.0 - _inner(z, w)) ** 2
    return np.sqrt(np.clip(1.0 - (1.0 - nz) * (1.0 - nw) / denom, 0.0, None))
