"""Kostant partition functions and their q-expansion distributions.

For a pointed unimodular list Delta,

    prod_{alpha} 1/(1 - e^{q <alpha, X>}) = sum_n q^{n - |Delta|} U_n(X),

and U_n is the Laplace transform of a distribution D_n obtained by
convolving, along each alpha, one-dimensional terms: Lebesgue on the ray
R>=0 alpha (for -1/y) or -B_i/i! times the (i-1)-th derivative at 0 along alpha.
On open chambers the sum T = sum_n D_n is a polynomial, and the partition
function is its limit from any generic direction.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial, gcd
from typing import Sequence

from .algebra import (
    LaurentSeries,
    MultiPoly,
    bernoulli,
    default_variables,
    det,
    laurent_mul,
    least_squares_exact,
    monomials,
    rank,
    solve,
    to_rational,
)
from .dh import Edge, FaceDistribution, Term, canonical_parts
from .todd import inv_one_minus_exp


class PartitionError(ValueError):
    pass


class NonGenericDirection(PartitionError):
    pass


def _dot(a, b):
    return sum(Fraction(x) * y for x, y in zip(a, b))


@dataclass(frozen=True)
class VectorList:
    vectors: tuple[tuple[int, ...], ...]
    gamma: tuple[Fraction, ...]

    @classmethod
    def of(cls, vectors: Sequence[Sequence[int]], check_unimodular: bool = True) -> "VectorList":
        vs = tuple(tuple(int(x) for x in v) for v in vectors)
        if not vs:
            raise PartitionError("empty vector list")
        g = len(vs[0])
        if any(len(v) != g for v in vs):
            raise PartitionError("vectors of different lengths")
        if any(all(x == 0 for x in v) for v in vs):
            raise PartitionError("zero vector in list")
        gamma = _pointedness_witness(vs)
        if gamma is None:
            raise PartitionError("vector list is not pointed (infinite counts)")
        out = cls(tuple(sorted(vs)), gamma)
        if check_unimodular and not out.is_unimodular():
            raise PartitionError("vector list is not unimodular")
        return out

    @property
    def rank(self) -> int:
        return len(self.vectors[0])

    @property
    def size(self) -> int:
        return len(self.vectors)

    def spans(self) -> bool:
        return rank(self.vectors) == self.rank

    def is_unimodular(self) -> bool:
        g = self.rank
        for sub in itertools.combinations(self.vectors, g):
            d = det(sub)
            if d != 0 and abs(d) != 1:
                return False
        return True

    def to_json(self):
        return [list(v) for v in self.vectors]


def _pointedness_witness(vs):
    g = len(vs[0])
    s = [sum(v[i] for v in vs) for i in range(g)]
    if all(_dot(v, s) > 0 for v in vs):
        return tuple(Fraction(x) for x in s)
    rng = range(-4, 5)
    for cand in itertools.product(rng, repeat=g):
        if all(_dot(v, cand) > 0 for v in vs):
            return tuple(Fraction(x) for x in cand)
    return None


def kostant_count(delta: VectorList, lam: Sequence[int]) -> int:
    """Number of ways to write lam as a nonnegative integer combination of Delta."""
    lam = tuple(int(x) for x in lam)
    if len(lam) != delta.rank:
        raise PartitionError("lambda has the wrong dimension")
    den = 1
    for g in delta.gamma:
        den = den * g.denominator // gcd(den, g.denominator)
    gamma = tuple(int(g * den) for g in delta.gamma)
    return _count(delta.vectors, gamma, len(delta.vectors), lam)


@lru_cache(maxsize=1 << 20)
def _count(vecs, gamma, i: int, mu: tuple[int, ...]) -> int:
    # DP over the first i vectors; the table is shared between calls
    if _dot(mu, gamma) < 0:
        return 0
    if i == 0:
        return 1 if all(x == 0 for x in mu) else 0
    a = vecs[i - 1]
    total = 0
    cur = mu
    while _dot(cur, gamma) >= 0:
        total += _count(vecs, gamma, i - 1, cur)
        cur = tuple(x - y for x, y in zip(cur, a))
    return total


def partition_multiplicity(delta: VectorList):
    """K as a :class:`MultiplicityFunction` (infinite support, independent of k)."""
    from .characters import MultiplicityFunction
    return MultiplicityFunction(delta.rank, lambda lam, k: kostant_count(delta, lam), None,
                                label=f"kostant{list(delta.vectors)}")


def u_series(delta: VectorList, n_max: int) -> LaurentSeries:
    """prod 1/(1 - e^{q <alpha, X>}) through q^{n_max - |Delta|}, coefficients rational in X."""
    out = None
    top = n_max - delta.size
    for a in delta.vectors:
        s = inv_one_minus_exp(top + delta.size - 1, a)
        out = s if out is None else laurent_mul(out, s)
    return out


def _dictionary_factor(alpha, i):
    """(coeff, is_ray, derivative order) for the q^{i-1} term of 1/(1-e^{q y})."""
    if i == 0:
        return Fraction(1), True, 0
    return -bernoulli(i) / factorial(i), False, i - 1


def d_series(delta: VectorList, n_max: int) -> list[FaceDistribution]:
    """D_0..D_{n_max}; D_n = sum over i with |i| = n of the convolved dictionary terms."""
    if delta.size > 6:
        raise PartitionError("vector list too long")
    g = delta.rank
    zero = tuple(Fraction(0) for _ in range(g))
    out = []
    for n in range(n_max + 1):
        terms = []
        for idx in _compositions(n, delta.size):
            coeff = Fraction(1)
            edges, derivs = [], []
            for a, i in zip(delta.vectors, idx):
                c, is_ray, o = _dictionary_factor(a, i)
                coeff *= c
                if is_ray:
                    edges.append(Edge(a))
                elif o:
                    derivs.append((a, o))
            if coeff:
                terms.append(Term(coeff, zero, tuple(edges), tuple(_merge(derivs))))
        out.append(FaceDistribution(g, tuple(terms)))
    return out


def _merge(derivs):
    acc: dict = {}
    for u, o in derivs:
        acc[u] = acc.get(u, 0) + o
    return sorted(acc.items())


def _compositions(n, parts):
    if parts == 1:
        yield (n,)
        return
    for i in range(n + 1):
        for rest in _compositions(n - i, parts - 1):
            yield (i,) + rest


# ---------------------------------------------------------------------------
# chambers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Chamber:
    signs: tuple[int, ...]
    rays: tuple[tuple[int, ...], ...]     # boundary rays (2D) or the direction (1D)
    polynomial: MultiPoly                  # T on this chamber
    parts: tuple[MultiPoly, ...]           # D_n densities, n = 0..

    def to_json(self):
        return {
            "signs": list(self.signs),
            "rays": [list(r) for r in self.rays],
            "T": self.polynomial.to_json(),
            "D": [p.to_json() for p in self.parts],
        }


@dataclass(frozen=True)
class ChamberComplex:
    delta: VectorList
    walls: tuple[tuple[int, ...], ...]     # wall normals
    chambers: tuple[Chamber, ...]

    def signs_at(self, point, direction=None) -> tuple[int, ...]:
        out = []
        for nrm in self.walls:
            s = _dot(nrm, point)
            if s == 0:
                if direction is None:
                    raise NonGenericDirection(f"point {list(point)} lies on a wall")
                s = _dot(nrm, direction)
                if s == 0:
                    raise NonGenericDirection("non-generic direction")
            out.append(1 if s > 0 else -1)
        return tuple(out)

    def chamber_of(self, point, direction=None) -> Chamber | None:
        sg = self.signs_at(point, direction)
        for c in self.chambers:
            if c.signs == sg:
                return c
        return None

    def value(self, point, direction=None) -> Fraction:
        """Chamber polynomial at ``point``, chamber chosen by point + t*direction, t -> 0+."""
        c = self.chamber_of(point, direction)
        if c is None:
            return Fraction(0)
        return c.polynomial.evaluate([to_rational(x) for x in point])

    def to_json(self):
        return {
            "delta": self.delta.to_json(),
            "walls": [list(w) for w in self.walls],
            "chambers": [c.to_json() for c in self.chambers],
        }


def _walls(delta: VectorList):
    g = delta.rank
    if g == 1:
        return ((1,),)
    if g != 2:
        raise PartitionError("chamber computations are limited to rank <= 2")
    normals = []
    for a in delta.vectors:
        nrm = _primitive_pos((-a[1], a[0]))
        if nrm not in normals:
            normals.append(nrm)
    return tuple(sorted(normals))


def _primitive_pos(v):
    from math import gcd
    g = 0
    for x in v:
        g = gcd(g, abs(int(x)))
    v = tuple(int(x) // g for x in v)
    for x in v:
        if x != 0:
            return v if x > 0 else tuple(-y for y in v)
    return v


def _sectors(delta: VectorList):
    """Open sectors of the plane cut by the lines R*alpha, as pairs of boundary rays."""
    from math import atan2
    rays = set()
    for a in delta.vectors:
        p = _primitive_pos(a)
        rays.add(p)
        rays.add(tuple(-x for x in p))
    rays = sorted(rays, key=lambda r: atan2(r[1], r[0]))
    return [(rays[i], rays[(i + 1) % len(rays)]) for i in range(len(rays))]


def _fiber_volume(vectors, xi) -> Fraction:
    """Lattice volume of {t >= 0 : sum t_a a = xi} for a unimodular spanning list (rank 2)."""
    g = 2
    basis = None
    for pair in itertools.combinations(range(len(vectors)), g):
        if abs(det([vectors[i] for i in pair])) == 1:
            basis = pair
            break
    if basis is None:
        raise PartitionError("list does not span")
    free = [i for i in range(len(vectors)) if i not in basis]
    bmat = [[vectors[basis[j]][i] for j in range(g)] for i in range(g)]
    # t_B = B^{-1}(xi - sum_free t_f f); constraints t_B >= 0, t_f >= 0
    cols_inv = [solve(bmat, [1 if i == j else 0 for i in range(g)]) for j in range(g)]
    binv = [[cols_inv[j][i] for j in range(g)] for i in range(g)]
    r = len(free)
    # inequalities c . s <= d in the free variables s
    ineqs = []
    for f in range(r):
        ineqs.append(([Fraction(-1) if j == f else Fraction(0) for j in range(r)], Fraction(0)))
    base = [sum(binv[i][k] * Fraction(xi[k]) for k in range(g)) for i in range(g)]
    for i in range(g):
        coeffs = [sum(binv[i][k] * vectors[free[j]][k] for k in range(g)) for j in range(r)]
        # base_i - coeffs . s >= 0
        ineqs.append((coeffs, base[i]))
    return _polytope_volume(ineqs, r)


def _polytope_volume(ineqs, r) -> Fraction:
    if r == 0:
        return Fraction(1) if all(d >= 0 for _, d in ineqs) else Fraction(0)
    if r == 1:
        lo, hi = None, None
        for (c,), d in ineqs:
            if c > 0:
                hi = d / c if hi is None else min(hi, d / c)
            elif c < 0:
                lo = d / c if lo is None else max(lo, d / c)
            elif d < 0:
                return Fraction(0)
        if lo is None or hi is None:
            raise PartitionError("unbounded fiber")
        return max(hi - lo, Fraction(0))
    if r == 2:
        pts = set()
        for (c1, d1), (c2, d2) in itertools.combinations(ineqs, 2):
            s = solve([c1, c2], [d1, d2])
            if s is None:
                continue
            if all(_dot(c, s) <= d for c, d in ineqs):
                pts.add(tuple(s))
        if len(pts) < 3:
            return Fraction(0)
        cx = sum(p[0] for p in pts) / len(pts)
        cy = sum(p[1] for p in pts) / len(pts)
        from math import atan2
        ordered = sorted(pts, key=lambda p: atan2(float(p[1] - cy), float(p[0] - cx)))
        area = Fraction(0)
        for p, q in zip(ordered, ordered[1:] + ordered[:1]):
            area += p[0] * q[1] - p[1] * q[0]
        return abs(area) / 2
    raise PartitionError("fiber dimension > 2 not supported")


def _interpolate_homogeneous(fn, degree, u, v, vs) -> MultiPoly:
    """Homogeneous polynomial of ``degree`` agreeing with fn at points a*u + b*v (a, b > 0)."""
    mons = monomials(2, degree)
    rows, ys = [], []
    for j in range(1, len(mons) + 3):
        p = (Fraction(u[0] * (j + 1) + v[0] * j * j), Fraction(u[1] * (j + 1) + v[1] * j * j))
        rows.append([p[0] ** m[0] * p[1] ** m[1] for m in mons])
        ys.append(fn(p))
    coeffs, resid = least_squares_exact(rows, ys)
    if any(resid):
        raise PartitionError("chamber density is not polynomial; wall arrangement incomplete")
    return MultiPoly(vs, dict(zip(mons, coeffs)))


def _covers_side(lo, hi, sgn) -> bool:
    # does [lo, hi] contain (0, eps) for sgn > 0, or (-eps, 0) for sgn < 0
    if sgn > 0:
        return (lo is None or lo <= 0) and (hi is None or hi > 0)
    return (lo is None or lo < 0) and (hi is None or hi >= 0)


def t_piecewise(delta: VectorList, n_max: int | None = None) -> ChamberComplex:
    """Per-chamber polynomials of D_n (n <= n_max) and of their sum T."""
    if not delta.spans():
        raise PartitionError("vector list does not span")
    g = delta.rank
    top = delta.size - g
    n_max = top if n_max is None else n_max
    ds = d_series(delta, n_max)
    vs = default_variables(g)
    walls = _walls(delta)
    chambers = []
    if g == 1:
        for sgn in (1, -1):
            parts = []
            for d in ds:
                segs, _ = canonical_parts(d)
                poly = MultiPoly(("x",))
                for lo, hi, h in segs:
                    if _covers_side(lo, hi, sgn):
                        poly = poly + h
                parts.append(poly.rename({"x": vs[0]}).with_variables(vs))
            total = sum(parts[1:], parts[0])
            chambers.append(Chamber((sgn,), ((sgn,),), total, tuple(parts)))
        return ChamberComplex(delta, walls, tuple(chambers))
    for u, v in _sectors(delta):
        interior = (u[0] + v[0], u[1] + v[1])
        signs = tuple(1 if _dot(nrm, interior) > 0 else -1 for nrm in walls)
        parts = []
        for d in ds:
            acc = MultiPoly(vs)
            for term in d.terms:
                ray_dirs = [e.direction for e in term.edges]
                if not ray_dirs or rank(ray_dirs) < g:
                    continue
                deg = len(ray_dirs) - g
                h = _interpolate_homogeneous(lambda p: _fiber_volume(ray_dirs, p), deg, u, v, vs)
                order = 0
                for w, o in term.derivatives:
                    h = h.directional_diff(w, o)
                    order += o
                acc = acc + h * (term.coeff * (-1) ** order)
            parts.append(acc)
        total = sum(parts[1:], parts[0])
        chambers.append(Chamber(signs, (u, v), total, tuple(parts)))
    return ChamberComplex(delta, walls, tuple(chambers))


def continuity_check(delta: VectorList, lam: Sequence[int], eps: Sequence, complex_: ChamberComplex | None = None):
    """(ok, K(lam), lim_{t->0+} T(lam + t eps))."""
    cx = complex_ if complex_ is not None else t_piecewise(delta)
    eps = [to_rational(e) for e in eps]
    if all(e == 0 for e in eps):
        raise NonGenericDirection("non-generic direction")
    for nrm in cx.walls:
        if _dot(nrm, eps) == 0:
            raise NonGenericDirection("non-generic direction")
    k = kostant_count(delta, lam)
    t = cx.value(lam, eps)
    return k == t, k, t
