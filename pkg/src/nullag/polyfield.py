"""Exact multivariate polynomials on R^3 and vector fields built from them.

Coefficients live in a sparse exponent->coefficient map, so differentiation
is exact (degree drops by one, coefficients scale by integer exponents) and
evaluation is vectorized over batches of points.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "Poly3",
    "PolyField",
    "PolyMatrixField",
    "bubble",
    "random_polyfield",
    "gradient_field",
    "random_scalar_poly",
    "evaluate_monomials",
]


def evaluate_monomials(points: np.ndarray, expos: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    """Sum of coeffs * prod_v points[:, v] ** expos[:, v] over terms.

    Uses per-variable power tables instead of float pow, which dominates
    the cost of batched polynomial evaluation.
    """
    m = points.shape[0]
    if expos.shape[0] == 0:
        return np.zeros(m)
    mono = np.ones((m, expos.shape[0]))
    for v in range(expos.shape[1]):
        col = expos[:, v]
        max_e = int(col.max())
        if max_e == 0:
            continue
        powers = np.empty((m, max_e + 1))
        powers[:, 0] = 1.0
        for e in range(1, max_e + 1):
            powers[:, e] = powers[:, e - 1] * points[:, v]
        mono *= powers[:, col]
    return mono @ coeffs


class Poly3:
    """Scalar polynomial in (x1, x2, x3), immutable after construction."""

    __slots__ = ("_terms", "_cache")

    def __init__(self, terms: dict[tuple[int, int, int], float] | None = None):
        clean = {}
        for expo, coeff in (terms or {}).items():
            coeff = float(coeff)
            if coeff != 0.0:
                clean[tuple(int(e) for e in expo)] = coeff
        self._terms = clean
        self._cache = None

    @classmethod
    def constant(cls, value: float) -> "Poly3":
        return cls({(0, 0, 0): value})

    @classmethod
    def variable(cls, axis: int) -> "Poly3":
        expo = [0, 0, 0]
        expo[axis] = 1
        return cls({tuple(expo): 1.0})

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def degree(self) -> int:
        if not self._terms:
            return 0
        return max(sum(e) for e in self._terms)

    def diff(self, axis: int) -> "Poly3":
        out = {}
        for expo, coeff in self._terms.items():
            if expo[axis] == 0:
                continue
            new = list(expo)
            new[axis] -= 1
            out[tuple(new)] = out.get(tuple(new), 0.0) + coeff * expo[axis]
        return Poly3(out)

    def __add__(self, other: "Poly3") -> "Poly3":
        out = dict(self._terms)
        for expo, coeff in other._terms.items():
            out[expo] = out.get(expo, 0.0) + coeff
        return Poly3(out)

    def __sub__(self, other: "Poly3") -> "Poly3":
        return self + other.scale(-1.0)

    def scale(self, factor: float) -> "Poly3":
        return Poly3({e: c * factor for e, c in self._terms.items()})

    def __mul__(self, other: "Poly3") -> "Poly3":
        out: dict[tuple[int, int, int], float] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                key = (e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2])
                out[key] = out.get(key, 0.0) + c1 * c2
        return Poly3(out)

    def _arrays(self):
        if self._cache is None:
            if self._terms:
                expos = np.array(sorted(self._terms), dtype=np.int64)
                coeffs = np.array([self._terms[tuple(e)] for e in expos], dtype=float)
            else:
                expos = np.zeros((0, 3), dtype=np.int64)
                coeffs = np.zeros(0)
            self._cache = (expos, coeffs)
        return self._cache

    def eval(self, points: np.ndarray) -> np.ndarray:
        """Evaluate on points of shape (n, 3); returns shape (n,)."""
        points = np.asarray(points, dtype=float)
        single = points.ndim == 1
        pts = points.reshape(-1, 3)
        expos, coeffs = self._arrays()
        vals = evaluate_monomials(pts, expos, coeffs)
        return vals[0] if single else vals


class PolyField:
    """Vector-valued polynomial map R^3 -> R^N with exact derivatives."""

    __slots__ = ("components",)

    def __init__(self, components):
        self.components = tuple(components)

    @classmethod
    def zero(cls, n: int) -> "PolyField":
        return cls([Poly3() for _ in range(n)])

    @property
    def n(self) -> int:
        return len(self.components)

    def degree(self) -> int:
        return max((c.degree() for c in self.components), default=0)

    def __add__(self, other: "PolyField") -> "PolyField":
        if other.n != self.n:
            raise ValueError("component count mismatch")
        return PolyField([a + b for a, b in zip(self.components, other.components)])

    def scale(self, factor: float) -> "PolyField":
        return PolyField([c.scale(factor) for c in self.components])

    def eval(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return np.stack([c.eval(pts) for c in self.components], axis=1)

    def eval_grad(self, points: np.ndarray) -> np.ndarray:
        """First derivatives, shape (n_points, N, 3)."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        out = np.empty((pts.shape[0], self.n, 3))
        for i, c in enumerate(self.components):
            for a in range(3):
                out[:, i, a] = c.diff(a).eval(pts)
        return out

    def eval_hess(self, points: np.ndarray) -> np.ndarray:
        """Second derivatives, shape (n_points, N, 3, 3), exactly symmetric."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        out = np.empty((pts.shape[0], self.n, 3, 3))
        for i, c in enumerate(self.components):
            for a in range(3):
                da = c.diff(a)
                for b in range(a, 3):
                    vals = da.diff(b).eval(pts)
                    out[:, i, a, b] = vals
                    out[:, i, b, a] = vals
        return out


class PolyMatrixField:
    """3x3 matrix of scalar polynomials (e.g. a strain field)."""

    __slots__ = ("entries",)

    def __init__(self, entries):
        self.entries = tuple(tuple(row) for row in entries)

    def eval(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        out = np.empty((pts.shape[0], 3, 3))
        for i in range(3):
            for j in range(3):
                out[:, i, j] = self.entries[i][j].eval(pts)
        return out

    def degree(self) -> int:
        return max(self.entries[i][j].degree() for i in range(3) for j in range(3))


def bubble() -> Poly3:
    """The boundary-vanishing factor prod_a x_a (1 - x_a) on the unit cube."""
    out = Poly3.constant(1.0)
    for a in range(3):
        x = Poly3.variable(a)
        out = out * (x - x * x)
    return out


def _monomials_upto(degree: int):
    for total in range(degree + 1):
        for e1 in range(total + 1):
            for e2 in range(total - e1 + 1):
                yield (e1, e2, total - e1 - e2)


def random_scalar_poly(rng: np.random.Generator, degree: int) -> Poly3:
    """Dense random polynomial with coefficients uniform in [-1, 1]."""
    return Poly3({expo: rng.uniform(-1.0, 1.0) for expo in _monomials_upto(degree)})


def random_polyfield(rng: np.random.Generator, n: int, degree: int) -> PolyField:
    return PolyField([random_scalar_poly(rng, degree) for _ in range(n)])


def gradient_field(potential: Poly3) -> PolyField:
    """Curl-free vector field: the exact gradient of a scalar polynomial."""
    return PolyField([potential.diff(a) for a in range(3)])


def constant_field(values) -> PolyField:
    return PolyField([Poly3.constant(float(v)) for v in values])


__all__.append("constant_field")
