"""Truncated holomorphic functions on the unit ball of C^m as multi-index coefficient tables."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations_with_replacement
from typing import Iterable, Mapping, Sequence

import numpy as np

from .sampling import ball_points, sphere_directions

Index = tuple  # tuple[int, ...] of length dim

DEFAULT_DEGREE_CAP = 64
SELF_MAP_SAMPLES = 10_000


class DimensionError(ValueError):
    pass


class DegreeCapError(RuntimeError):
    pass


class SelfMapError(ValueError):
    pass


class OrthonormalityError(ValueError):
    pass


def _add_index(a: Index, b: Index) -> Index:
    return tuple(x + y for x, y in zip(a, b))


def _mul_tables(a: Mapping[Index, complex], b: Mapping[Index, complex]) -> dict[Index, complex]:
    out: dict[Index, complex] = {}
    for ka, ca in a.items():
        for kb, cb in b.items():
            k = _add_index(ka, kb)
            out[k] = out.get(k, 0j) + ca * cb
    return out


@dataclass(frozen=True, eq=False)
class PolyFunction:
    """f(z) = sum_alpha c_alpha z^alpha on C^dim; zero coefficients are dropped."""

    dim: int
    coeffs: Mapping[Index, complex]

    def __post_init__(self):
        if self.dim < 1:
            raise DimensionError("dimension must be positive")
        clean: dict[Index, complex] = {}
        for key, c in dict(self.coeffs).items():
            key = tuple(int(e) for e in key)
            if len(key) != self.dim or any(e < 0 for e in key):
                raise DimensionError(f"bad multi-index {key} for dimension {self.dim}")
            clean[key] = clean.get(key, 0j) + complex(c)
        clean = {k: c for k, c in clean.items() if c != 0}
        object.__setattr__(self, "coeffs", clean)

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, dim: int) -> "PolyFunction":
        return cls(dim, {})

    @classmethod
    def constant(cls, dim: int, c: complex) -> "PolyFunction":
        return cls(dim, {(0,) * dim: c})

    @classmethod
    def monomial(cls, exponents: Sequence[int], c: complex = 1.0) -> "PolyFunction":
        return cls(len(exponents), {tuple(exponents): c})

    @classmethod
    def coordinate(cls, dim: int, k: int) -> "PolyFunction":
        e = [0] * dim
        e[k] = 1
        return cls(dim, {tuple(e): 1.0})

    @classmethod
    def linear(cls, vector: Sequence[complex]) -> "PolyFunction":
        """z -> sum_k v_k z_k."""
        dim = len(vector)
        return cls(dim, {tuple(int(i == k) for i in range(dim)): v for k, v in enumerate(vector)})

    # -- algebra -----------------------------------------------------------

    @property
    def degree(self) -> int:
        return max((sum(k) for k in self.coeffs), default=0)

    @property
    def constant_term(self) -> complex:
        return self.coeffs.get((0,) * self.dim, 0j)

    def _coerce(self, other) -> "PolyFunction":
        if isinstance(other, PolyFunction):
            if other.dim != self.dim:
                raise DimensionError(f"dimension mismatch {self.dim} vs {other.dim}")
            return other
        return PolyFunction.constant(self.dim, complex(other))

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, 0j) + c
        return PolyFunction(self.dim, out)

    __radd__ = __add__

    def __neg__(self):
        return PolyFunction(self.dim, {k: -c for k, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, PolyFunction):
            other = self._coerce(other)
            return PolyFunction(self.dim, _mul_tables(self.coeffs, other.coeffs))
        c = complex(other)
        return PolyFunction(self.dim, {k: c * v for k, v in self.coeffs.items()})

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self * (1.0 / complex(c))

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are not polynomials")
        result = PolyFunction.constant(self.dim, 1.0)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def allclose(self, other: "PolyFunction", rtol: float = 1e-12, atol: float = 1e-14) -> bool:
        keys = set(self.coeffs) | set(other.coeffs)
        for k in keys:
            a = self.coeffs.get(k, 0j)
            b = other.coeffs.get(k, 0j)
            if abs(a - b) > atol + rtol * max(abs(a), abs(b)):
                return False
        return True

    def derivative(self, k: int) -> "PolyFunction":
        out = {}
        for key, c in self.coeffs.items():
            if key[k]:
                new = list(key)
                new[k] -= 1
                out[tuple(new)] = c * key[k]
        return PolyFunction(self.dim, out)

    def radial_poly(self) -> "PolyFunction":
        """Rf as a table: Euler's identity R z^alpha = |alpha| z^alpha."""
        return PolyFunction(self.dim, {k: sum(k) * c for k, c in self.coeffs.items()})

    # -- evaluation --------------------------------------------------------

    @cached_property
    def _table(self):
        if not self.coeffs:
            return np.zeros((0, self.dim), dtype=int), np.zeros(0, dtype=complex)
        keys = list(self.coeffs)
        return np.array(keys, dtype=int).reshape(len(keys), self.dim), np.array(
            [self.coeffs[k] for k in keys], dtype=complex
        )

    @cached_property
    def _partials(self):
        return [self.derivative(k) for k in range(self.dim)]

    @cached_property
    def _radial(self):
        return self.radial_poly()

    def _points(self, z) -> tuple[np.ndarray, bool]:
        z = np.asarray(z, dtype=complex)
        if z.shape[-1] != self.dim:
            raise DimensionError(f"point of length {z.shape[-1]} for a function on C^{self.dim}")
        return z.reshape(-1, self.dim), z.ndim == 1

    def __call__(self, z):
        pts, single = self._points(z)
        exps, c = self._table
        if not len(c):
            out = np.zeros(len(pts), dtype=complex)
        else:
            top = int(exps.max())
            powers = pts[:, :, None] ** np.arange(top + 1)  # (N, dim, top+1)
            mon = np.ones((len(pts), len(c)), dtype=complex)
            for j in range(self.dim):
                mon *= powers[:, j, exps[:, j]]
            out = mon @ c
        return out[0] if single else out

    def gradient(self, z):
        pts, single = self._points(z)
        out = np.stack([p(pts) for p in self._partials], axis=-1)
        return out[0] if single else out

    def radial(self, z):
        return self._radial(z)

    # -- serialisation -----------------------------------------------------

    def to_json(self) -> list[dict]:
        return [
            {"exponents": list(k), "re": c.real, "im": c.imag}
            for k, c in sorted(self.coeffs.items())
        ]

    @classmethod
    def from_json(cls, terms: Iterable[dict], dim: int | None = None) -> "PolyFunction":
        terms = list(terms)
        if dim is None:
            if not terms:
                raise DimensionError("cannot infer the dimension of an empty table")
            dim = len(terms[0]["exponents"])
        return cls(dim, {tuple(t["exponents"]): complex(t.get("re", 0.0), t.get("im", 0.0)) for t in terms})

    def __repr__(self):
        terms = " + ".join(f"({c:.4g})z^{k}" for k, c in sorted(self.coeffs.items())) or "0"
        return f"PolyFunction(dim={self.dim}: {terms})"


def evaluate(f: PolyFunction, z):
    return f(z)


def gradient(f: PolyFunction, z):
    return f.gradient(z)


def radial_derivative(f: PolyFunction, z):
    """Rf(z) = sum_k z_k df/dz_k(z)."""
    return f.radial(z)


def homogeneous_parts(f: PolyFunction) -> list[PolyFunction]:
    """[P_0, ..., P_deg] with P_n holding exactly the total-degree-n terms."""
    parts: list[dict] = [dict() for _ in range(f.degree + 1)]
    for k, c in f.coeffs.items():
        parts[sum(k)][k] = c
    return [PolyFunction(f.dim, p) for p in parts]


def substitute(
    f: PolyFunction, components: Sequence[PolyFunction], degree_cap: int = DEFAULT_DEGREE_CAP
) -> PolyFunction:
    """The table of z -> f(components(z)), exact up to floating-point rounding."""
    if len(components) != f.dim:
        raise DimensionError(f"{len(components)} components for a function on C^{f.dim}")
    if not components:
        raise DimensionError("no components")
    out_dim = components[0].dim
    if any(c.dim != out_dim for c in components):
        raise DimensionError("components live on different spaces")
    degs = [c.degree for c in components]
    bound = max((sum(a * d for a, d in zip(k, degs)) for k in f.coeffs), default=0)
    if bound > degree_cap:
        raise DegreeCapError(f"composition degree {bound} exceeds the cap {degree_cap}")

    one = {(0,) * out_dim: 1.0 + 0j}
    powers: dict[tuple[int, int], dict] = {}

    def power(i: int, p: int) -> dict:
        if p == 0:
            return one
        key = (i, p)
        if key not in powers:
            powers[key] = _mul_tables(power(i, p - 1), components[i].coeffs)
        return powers[key]

    prefixes: dict[Index, dict] = {(): one}

    def prefix(k: Index) -> dict:
        if k not in prefixes:
            prefixes[k] = _mul_tables(prefix(k[:-1]), power(len(k) - 1, k[-1]))
        return prefixes[k]

    result: dict[Index, complex] = {}
    for k, c in f.coeffs.items():
        for key, v in prefix(k).items():
            result[key] = result.get(key, 0j) + c * v
    return PolyFunction(out_dim, result)


@dataclass(frozen=True, eq=False)
class SelfMap:
    """A holomorphic self-map of the unit ball of C^dim given by polynomial components.

    ``range_sup`` is the sampled sup of ||phi(z)||; construction through
    :meth:`certify` refuses maps whose sampled image leaves the open ball.
    """

    components: tuple[PolyFunction, ...]
    range_sup: float
    fixes_origin: bool

    @property
    def dim(self) -> int:
        return self.components[0].dim

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.stack([c(z) for c in self.components], axis=-1)
        return out

    @classmethod
    def certify(
        cls, components: Sequence[PolyFunction], samples: int = SELF_MAP_SAMPLES, seed: int = 0
    ) -> "SelfMap":
        components = tuple(components)
        if not components:
            raise DimensionError("a self-map needs at least one component")
        dim = components[0].dim
        if len(components) != dim or any(c.dim != dim for c in components):
            raise DimensionError("a self-map of the ball of C^m needs m components on C^m")
        rng = np.random.default_rng(seed)
        half = samples // 2
        pts = np.concatenate([
            ball_points(rng, samples - half, dim),
            (1.0 - 1e-12) * sphere_directions(rng, half, dim),
        ])
        norms = np.linalg.norm(np.stack([c(pts) for c in components], axis=-1), axis=1)
        sup = float(norms.max())
        if not sup < 1.0:
            witness = pts[int(np.argmax(norms))]
            raise SelfMapError(f"sampled ||phi(z)|| = {sup:.6g} >= 1 at z = {witness}")
        fixes = all(abs(c.constant_term) == 0 for c in components)
        return cls(components, sup, fixes)

    @classmethod
    def identity(cls, dim: int) -> "SelfMap":
        return cls(tuple(PolyFunction.coordinate(dim, k) for k in range(dim)), 1.0, True)

    @classmethod
    def linear(cls, matrix) -> "SelfMap":
        """z -> A z for a matrix of operator norm at most one (not re-certified)."""
        a = np.asarray(matrix, dtype=complex)
        if np.linalg.norm(a, 2) > 1.0 + 1e-12:
            raise SelfMapError("linear map with operator norm above one")
        comps = tuple(PolyFunction.linear(row) for row in a)
        return cls(comps, float(min(1.0, np.linalg.norm(a, 2))), True)

    def to_json(self) -> list[list[dict]]:
        return [c.to_json() for c in self.components]


def compose(f: PolyFunction, phi: SelfMap, degree_cap: int = DEFAULT_DEGREE_CAP) -> PolyFunction:
    """Exact table of f o phi."""
    if f.dim != phi.dim:
        raise DimensionError(f"f lives on C^{f.dim}, phi on C^{phi.dim}")
    return substitute(f, phi.components, degree_cap)


@dataclass(frozen=True, eq=False)
class OrthonormalSystem:
    """k orthonormal vectors of C^m, stored as the rows of ``vectors``."""

    vectors: np.ndarray

    def __post_init__(self):
        v = np.atleast_2d(np.asarray(self.vectors, dtype=complex))
        object.__setattr__(self, "vectors", v)
        if v.shape[0] > v.shape[1]:
            raise OrthonormalityError("more vectors than the ambient dimension")
        gram = v.conj() @ v.T
        err = float(np.max(np.abs(gram - np.eye(v.shape[0]))))
        if err > 1e-12:
            raise OrthonormalityError(f"Gram matrix deviates from identity by {err:.3e}")

    @property
    def ambient_dim(self) -> int:
        return self.vectors.shape[1]

    @property
    def order(self) -> int:
        return self.vectors.shape[0]

    def embed(self, zeta) -> np.ndarray:
        """sum_j zeta_j x_j."""
        return np.asarray(zeta, dtype=complex) @ self.vectors

    def linear_components(self) -> list[PolyFunction]:
        return [PolyFunction.linear(self.vectors[:, i]) for i in range(self.ambient_dim)]

    @classmethod
    def standard(cls, m: int, indices: Sequence[int] | None = None) -> "OrthonormalSystem":
        indices = range(m) if indices is None else indices
        return cls(np.eye(m, dtype=complex)[list(indices)])

    @classmethod
    def random(cls, m: int, k: int, rng: np.random.Generator) -> "OrthonormalSystem":
        g = rng.standard_normal((m, k)) + 1j * rng.standard_normal((m, k))
        q, _ = np.linalg.qr(g)
        return cls(q.T.copy())


def restrict(f: PolyFunction, x: OrthonormalSystem, degree_cap: int = DEFAULT_DEGREE_CAP) -> PolyFunction:
    """f_x(zeta) = f(sum_j zeta_j x_j) as a table on C^k."""
    if x.ambient_dim != f.dim:
        raise DimensionError(f"system in C^{x.ambient_dim}, function on C^{f.dim}")
    return substitute(f, x.linear_components(), degree_cap)


@dataclass(frozen=True)
class SchwarzReport:
    passed: bool
    worst_margin: float
    witness: np.ndarray
    samples: int


def schwarz_check(phi: SelfMap, samples: int = 10_000, seed: int = 0, tol: float = 1e-10) -> SchwarzReport:
    """Check ||phi(z)|| <= ||z|| on random points of the ball; needs phi(0) = 0."""
    if not phi.fixes_origin:
        raise ValueError("Schwarz check requires phi(0) = 0")
    rng = np.random.default_rng(seed)
    half = samples // 2
    z = np.concatenate([
        ball_points(rng, samples - half, phi.dim),
        (1.0 - 1e-9) * sphere_directions(rng, half, phi.dim),
    ])
    margin = np.linalg.norm(z, axis=1) - np.linalg.norm(phi(z), axis=1)
    i = int(np.argmin(margin))
    return SchwarzReport(bool(margin[i] >= -tol), float(margin[i]), z[i], samples)


# -- random families ---------------------------------------------------------


def _indices_up_to(dim: int, degree: int, minimum: int = 0) -> list[Index]:
    out = []
    for n in range(minimum, degree + 1):
        for combo in combinations_with_replacement(range(dim), n):
            k = [0] * dim
            for i in combo:
                k[i] += 1
            out.append(tuple(k))
    return out


def random_poly(
    dim: int,
    max_degree: int,
    terms: int,
    rng: np.random.Generator,
    min_degree: int = 0,
) -> PolyFunction:
    """A sparse polynomial with ``terms`` distinct monomials and complex Gaussian coefficients."""
    pool = _indices_up_to(dim, max_degree, min_degree)
    chosen = rng.choice(len(pool), size=min(terms, len(pool)), replace=False)
    coeffs = rng.standard_normal(len(chosen)) + 1j * rng.standard_normal(len(chosen))
    return PolyFunction(dim, {pool[i]: c for i, c in zip(chosen, coeffs)})


def random_self_map(
    dim: int,
    max_degree: int,
    terms: int,
    rng: np.random.Generator,
    fixes_origin: bool = False,
    scale: float = 0.9,
) -> SelfMap:
    """Random polynomial self-map with total coefficient l1 mass ``scale`` < 1.

    Since ||phi(z)|| <= sum_i |phi_i(z)| <= sum of |coefficients| on the ball,
    the image is certified to lie in the ball of radius ``scale``.
    """
    comps = [random_poly(dim, max_degree, terms, rng, min_degree=1 if fixes_origin else 0) for _ in range(dim)]
    mass = sum(sum(abs(c) for c in p.coeffs.values()) for p in comps)
    comps = [p * (scale / mass) for p in comps]
    return SelfMap.certify(comps, seed=int(rng.integers(2**31)))


def function_dictionary(dim: int, size: int = 50, seed: int = 0, max_degree: int = 4) -> list[PolyFunction]:
    """Monomials of degree 1..max_degree first, then random polynomials, ``size`` in total."""
    rng = np.random.default_rng(seed)
    out = [PolyFunction.monomial(k) for k in _indices_up_to(dim, max_degree, 1)][: size // 2]
    while len(out) < size:
        out.append(random_poly(dim, max_degree, int(rng.integers(2, 6)), rng))
    return out
