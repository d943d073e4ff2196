"""Degree-2 null Lagrangians built from three generator functions S(x, y).

The quadratic, linear and constant coefficient blocks are 2x2 determinants
of the generator partials; contracting them with the field gradient
collapses to the second invariant of the total-derivative matrix
J_ab = dS^a/dx_b + dS^a/dy_i * y^i_b, which is what the evaluator computes.
Generators are polynomials with rational coefficients, so all partials are
exact and the partial-derivative order never matters.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .polyfield import evaluate_monomials
from .verifier import Lagrangian

__all__ = [
    "GenPoly",
    "GeneratorSet",
    "RundCoefficients",
    "MicropolarBlocks",
    "rund_coefficients",
    "build_null_lagrangian",
    "RundLagrangian",
    "micropolar_block_view",
    "coefficient_identity_residuals",
    "random_generator_set",
    "generator_set_from_json",
    "generator_set_to_json",
]


class GenPoly:
    """Polynomial in (x1..x3, y1..yN) with exact rational coefficients."""

    __slots__ = ("nvars", "_terms", "_cache")

    def __init__(self, nvars: int, terms: dict[tuple[int, ...], Fraction] | None = None):
        self.nvars = int(nvars)
        clean: dict[tuple[int, ...], Fraction] = {}
        for expo, coeff in (terms or {}).items():
            expo = tuple(int(e) for e in expo)
            if len(expo) != self.nvars:
                raise ValueError(f"exponent tuple length {len(expo)} != {self.nvars} variables")
            coeff = Fraction(coeff)
            if coeff != 0:
                clean[expo] = clean.get(expo, Fraction(0)) + coeff
        self._terms = {e: c for e, c in clean.items() if c != 0}
        self._cache = None

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def degree(self) -> int:
        return max((sum(e) for e in self._terms), default=0)

    def diff(self, var: int) -> "GenPoly":
        out: dict[tuple[int, ...], Fraction] = {}
        for expo, coeff in self._terms.items():
            if expo[var] == 0:
                continue
            new = list(expo)
            new[var] -= 1
            key = tuple(new)
            out[key] = out.get(key, Fraction(0)) + coeff * expo[var]
        return GenPoly(self.nvars, out)

    def eval(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.shape[1] != self.nvars:
            raise ValueError(f"points must have {self.nvars} columns")
        if self._cache is None:
            if self._terms:
                expos = np.array(sorted(self._terms), dtype=np.int64)
                coeffs = np.array([float(self._terms[tuple(e)]) for e in expos])
            else:
                expos = np.zeros((0, self.nvars), dtype=np.int64)
                coeffs = np.zeros(0)
            self._cache = (expos, coeffs)
        expos, coeffs = self._cache
        return evaluate_monomials(pts, expos, coeffs)


class GeneratorSet:
    """Three generator polynomials of (x, y) with cached exact partials."""

    def __init__(self, polys, n: int):
        polys = tuple(polys)
        if len(polys) != 3:
            raise ValueError("a generator set holds exactly three polynomials")
        self.n = int(n)
        if self.n < 1:
            raise ValueError("field dimension must be positive")
        nvars = 3 + self.n
        for poly in polys:
            if poly.nvars != nvars:
                raise ValueError(f"generator polynomials must use {nvars} variables")
        self.polys = polys
        self._d1: dict[tuple[int, int], GenPoly] = {}
        self._d2: dict[tuple[int, int, int], GenPoly] = {}

    def degree(self) -> int:
        return max(p.degree() for p in self.polys)

    def _first(self, alpha: int, var: int) -> GenPoly:
        key = (alpha, var)
        if key not in self._d1:
            self._d1[key] = self.polys[alpha].diff(var)
        return self._d1[key]

    def _second(self, alpha: int, var1: int, var2: int) -> GenPoly:
        v1, v2 = sorted((var1, var2))
        key = (alpha, v1, v2)
        if key not in self._d2:
            self._d2[key] = self._first(alpha, v1).diff(v2)
        return self._d2[key]

    def first_partials(self, x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Batched (Sx, Sy): x-partials (m,3,3) and y-partials (m,3,N)."""
        pts = np.concatenate(
            [np.atleast_2d(np.asarray(x, dtype=float)), np.atleast_2d(np.asarray(y, dtype=float))],
            axis=1,
        )
        m = pts.shape[0]
        sx = np.empty((m, 3, 3))
        sy = np.empty((m, 3, self.n))
        for alpha in range(3):
            for beta in range(3):
                sx[:, alpha, beta] = self._first(alpha, beta).eval(pts)
            for i in range(self.n):
                sy[:, alpha, i] = self._first(alpha, 3 + i).eval(pts)
        return sx, sy

    def second_partials(self, x: np.ndarray, y: np.ndarray):
        """Single-point second partials: (Sxx (3,3,3), Sxy (3,3,N), Syy (3,N,N)).

        Sxx[a,b,c] = d2 S^a / dx_b dx_c, Sxy[a,b,j] = d2 S^a / dx_b dy_j,
        Syy[a,i,j] = d2 S^a / dy_i dy_j.
        """
        pts = np.concatenate([np.asarray(x, dtype=float), np.asarray(y, dtype=float)])[None, :]
        sxx = np.empty((3, 3, 3))
        sxy = np.empty((3, 3, self.n))
        syy = np.empty((3, self.n, self.n))
        for alpha in range(3):
            for b in range(3):
                for c in range(b, 3):
                    val = self._second(alpha, b, c).eval(pts)[0]
                    sxx[alpha, b, c] = val
                    sxx[alpha, c, b] = val
                for j in range(self.n):
                    sxy[alpha, b, j] = self._second(alpha, b, 3 + j).eval(pts)[0]
            for i in range(self.n):
                for j in range(i, self.n):
                    val = self._second(alpha, 3 + i, 3 + j).eval(pts)[0]
                    syy[alpha, i, j] = val
                    syy[alpha, j, i] = val
        return sxx, sxy, syy


@dataclass(frozen=True)
class RundCoefficients:
    """Determinant coefficient blocks at one state (x, y).

    d2[a1,a2,i1,i2] is antisymmetric under (a1,a2) swap and symmetric under
    the simultaneous (a1,a2)+(i1,i2) swap; d1 sums its lower determinant row
    over the dummy direction; d0 sums over both dummies.
    """

    d2: np.ndarray
    d1: np.ndarray
    d0: float


def rund_coefficients(g: GeneratorSet, x, y) -> RundCoefficients:
    sx, sy = g.first_partials(np.atleast_2d(x), np.atleast_2d(y))
    sx, sy = sx[0], sy[0]
    d2 = np.einsum("ai,bj->abij", sy, sy) - np.einsum("bi,aj->abij", sy, sy)
    tr_sx = float(np.trace(sx))
    d1 = sy * tr_sx - np.einsum("bi,ab->ai", sy, sx)
    d0 = tr_sx * tr_sx - float(np.einsum("ab,ba->", sx, sx))
    return RundCoefficients(d2, d1, float(d0))


class RundLagrangian(Lagrangian):
    """Evaluator of the generator-built density
    d2.y'y'/2 + d1.y' + d0/2 with coefficients re-evaluated at each (x, y)."""

    closed_form = False

    def __init__(self, generators: GeneratorSet):
        self.generators = generators
        self.n = generators.n
        # For generator degree <= 3 the density is a polynomial of degree
        # <= 4 in every single argument, so the Richardson stencil has zero
        # truncation error and a large step minimizes roundoff.
        if generators.degree() <= 3:
            self.fd_base_step = 1e-2

    def evaluate(self, x, y, dy):
        sx, sy = self.generators.first_partials(x, y)
        j = sx + np.einsum("mai,mib->mab", sy, np.asarray(dy, dtype=float))
        tr = np.trace(j, axis1=1, axis2=2)
        tr_sq = np.einsum("mab,mba->m", j, j)
        return 0.5 * (tr * tr - tr_sq)

    def evaluate_from_coefficients(self, x, y, dy) -> float:
        """Single-state evaluation straight from the determinant blocks;
        cross-validates the collapsed form used by `evaluate`."""
        coeff = rund_coefficients(self.generators, x, y)
        dy = np.asarray(dy, dtype=float)
        out = 0.5 * np.einsum("abij,ia,jb->", coeff.d2, dy, dy)
        out += np.einsum("ai,ia->", coeff.d1, dy)
        return float(out + 0.5 * coeff.d0)

    def integrand_degree(self, field_degree: int) -> int:
        d = max(int(field_degree), 0)
        partial_deg = max(self.generators.degree() - 1, 0)
        composed = partial_deg * max(d, 1)
        return 2 * (composed + max(d - 1, 0))


def build_null_lagrangian(g: GeneratorSet) -> RundLagrangian:
    """Null density generated by three arbitrary functions of (x, y)."""
    return RundLagrangian(g)


@dataclass(frozen=True)
class MicropolarBlocks:
    """Coefficient blocks partitioned by displacement (first three field
    components) and rotation (last three)."""

    d2_uu: np.ndarray
    d2_phiphi: np.ndarray
    d2_uphi: np.ndarray
    d1_u: np.ndarray
    d1_phi: np.ndarray
    d0: float


def micropolar_block_view(g: GeneratorSet, x, y) -> MicropolarBlocks:
    if g.n != 6:
        raise ValueError("block view needs a six-component field")
    coeff = rund_coefficients(g, x, y)
    return MicropolarBlocks(
        d2_uu=coeff.d2[:, :, :3, :3],
        d2_phiphi=coeff.d2[:, :, 3:, 3:],
        d2_uphi=coeff.d2[:, :, :3, 3:],
        d1_u=coeff.d1[:, :3],
        d1_phi=coeff.d1[:, 3:],
        d0=coeff.d0,
    )


def coefficient_identity_residuals(g: GeneratorSet, x, y) -> tuple[np.ndarray, np.ndarray]:
    """Normalized residuals of the two coefficient identities:

    linear[i]     : 2 * d/dx_a d1(a; i) - d/dy_i d0
    quad[k,a,i]   : sum_g d/dx_g d2(g,a; k,i) + d/dy_i d1(a; k) - d/dy_k d1(a; i)

    Both vanish identically for any generators (they are what makes the
    built density null); residuals are normalized by one plus the sum of
    the absolute values of their product terms.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    sx, sy = g.first_partials(x[None, :], y[None, :])
    sx, sy = sx[0], sy[0]
    sxx, sxy, syy = g.second_partials(x, y)
    # mixed y-then-x partials coincide with x-then-y exactly (rational coeffs)
    syx = np.transpose(sxy, (0, 2, 1))  # syx[a, i, c] = d2 S^a / dy_i dx_c
    tr_sx = np.trace(sx)

    t1 = 2.0 * np.einsum("aia->i", syx) * tr_sx
    t2 = 2.0 * np.einsum("ai,bba->i", sy, sxx)
    t3 = -2.0 * np.einsum("bia,ab->i", syx, sx)
    t4 = -2.0 * np.einsum("bi,aba->i", sy, sxx)
    t5 = -np.einsum("aai->i", sxy) * tr_sx
    t6 = -np.einsum("aa,bbi->i", sx, sxy)
    t7 = np.einsum("bai,ab->i", sxy, sx)
    t8 = np.einsum("ba,abi->i", sx, sxy)
    lin_terms = [t1, t2, t3, t4, t5, t6, t7, t8]
    lin = sum(lin_terms)
    lin_scale = 1.0 + float(np.max(sum(np.abs(t) for t in lin_terms)))

    u1 = np.einsum("gkg,ai->kai", syx, sy)
    u2 = np.einsum("gk,aig->kai", sy, syx)
    u3 = -np.einsum("akg,gi->kai", syx, sy)
    u4 = -np.einsum("ak,gig->kai", sy, syx)
    v1 = np.einsum("aki->kai", syy) * tr_sx
    v2 = np.einsum("ak,bbi->kai", sy, sxy)
    v3 = -np.einsum("bki,ab->kai", syy, sx)
    v4 = -np.einsum("bk,abi->kai", sy, sxy)
    w1 = -np.einsum("aik->kai", syy) * tr_sx
    w2 = -np.einsum("ai,bbk->kai", sy, sxy)
    w3 = np.einsum("bik,ab->kai", syy, sx)
    w4 = np.einsum("bi,abk->kai", sy, sxy)
    quad_terms = [u1, u2, u3, u4, v1, v2, v3, v4, w1, w2, w3, w4]
    quad = sum(quad_terms)
    quad_scale = 1.0 + float(np.max(sum(np.abs(t) for t in quad_terms)))

    return lin / lin_scale, quad / quad_scale


def _monomials_upto(nvars: int, degree: int):
    for combo in itertools.combinations_with_replacement(range(nvars + 1), degree):
        expo = [0] * nvars
        for slot in combo:
            if slot < nvars:
                expo[slot] += 1
        yield tuple(expo)


def random_generator_set(rng: np.random.Generator, n: int, degree: int = 2) -> GeneratorSet:
    """Random sparse generators with small exact rational coefficients."""
    nvars = 3 + n
    monomials = sorted(set(_monomials_upto(nvars, degree)))
    polys = []
    for _ in range(3):
        terms = {}
        for expo in monomials:
            if rng.uniform() < 0.35:
                num = int(rng.integers(-8, 9))
                den = int(rng.integers(1, 5))
                if num:
                    terms[expo] = Fraction(num, den)
        polys.append(GenPoly(nvars, terms))
    return GeneratorSet(polys, n)


def generator_set_from_json(obj, n: int | None = None) -> GeneratorSet:
    """Parse the generator file format: a list of three polynomials, each a
    list of {"exponents": [ex1,ex2,ex3,ey1..eyN], "coeff": "p/q"}."""
    if not isinstance(obj, list) or len(obj) != 3:
        raise ValueError("generator file must be a list of three polynomials")
    nvars = None
    polys = []
    for poly_terms in obj:
        terms = {}
        for term in poly_terms:
            if set(term) != {"exponents", "coeff"}:
                raise ValueError(
                    f"generator term must have exactly keys exponents/coeff, got {sorted(term)}"
                )
            expo = tuple(int(e) for e in term["exponents"])
            if nvars is None:
                nvars = len(expo)
                if nvars < 4:
                    raise ValueError("exponent tuples need at least four entries (3 for x)")
            elif len(expo) != nvars:
                raise ValueError("inconsistent exponent tuple lengths")
            terms[expo] = terms.get(expo, Fraction(0)) + Fraction(str(term["coeff"]))
        polys.append(terms)
    if nvars is None:
        raise ValueError("generator file has no terms; field dimension is undetermined")
    inferred = nvars - 3
    if n is not None and n != inferred:
        raise ValueError(f"generator file implies {inferred} field components, expected {n}")
    return GeneratorSet([GenPoly(nvars, t) for t in polys], inferred)


def generator_set_to_json(g: GeneratorSet) -> list:
    out = []
    for poly in g.polys:
        out.append(
            [
                {"exponents": list(expo), "coeff": str(coeff)}
                for expo, coeff in sorted(poly.terms.items())
            ]
        )
    return out
