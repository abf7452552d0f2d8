"""Twisted Duistermaat-Heckman distributions as finite sums of face terms.

A :class:`Term` pairs with a test function f as

    coeff * int_{t in box} prod_e rho_e(t_e) * (D f)(base + sum_e t_e w_e) dt

where each edge e has a direction w_e, a length (``None`` for a ray) and a
density rho_e in one variable, and D is a product of directional derivatives.
Lebesgue measure is normalized by the lattice, so a unimodular set of edges
gives the lattice-normalized measure on the face it spans.

Three constructions are provided and are checked against each other:
interval/tensor/convolution formulas, vertex-cone assemblies built from the
graded Todd expansion, and an exact moment fit of the lattice sums.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Callable, Sequence

from .algebra import (
    LaurentSeries,
    MultiPoly,
    bernoulli,
    default_variables,
    laurent_mul,
    least_squares_exact,
    monomials,
    multinomial,
    rank,
    rational_from_json,
    rational_to_json,
    solve,
    to_rational,
)
from .characters import ConeCharacter, MultiplicityFunction, default_gamma
from .polytope import LatticePolytope, VertexCone, is_delzant, tangent_cone
from .todd import graded_todd_diagonal

T = "t"


class DivergentPairing(ValueError):
    pass


class UnsupportedShape(ValueError):
    pass


class NotQuasiPolynomial(ValueError):
    pass


def _one_t() -> MultiPoly:
    return MultiPoly.constant(1, (T,))


@dataclass(frozen=True)
class Edge:
    direction: tuple[int, ...]
    length: Fraction | None = None
    density: MultiPoly = field(default_factory=_one_t)

    @property
    def is_ray(self) -> bool:
        return self.length is None

    def to_json(self) -> dict:
        return {
            "direction": list(self.direction),
            "length": None if self.length is None else rational_to_json(self.length),
            "density": self.density.to_json(),
        }

    @classmethod
    def from_json(cls, d) -> "Edge":
        return cls(tuple(d["direction"]), None if d["length"] is None else rational_from_json(d["length"]),
                   MultiPoly.from_json(d["density"]))


@dataclass(frozen=True)
class Term:
    coeff: Fraction
    base: tuple[Fraction, ...]
    edges: tuple[Edge, ...] = ()
    derivatives: tuple[tuple[tuple[int, ...], int], ...] = ()

    @property
    def is_compact(self) -> bool:
        return all(not e.is_ray for e in self.edges)

    @property
    def derivative_order(self) -> int:
        return sum(o for _, o in self.derivatives)

    def scaled(self, c) -> "Term":
        return Term(self.coeff * c, self.base, self.edges, self.derivatives)

    def translated(self, v) -> "Term":
        return Term(self.coeff, tuple(a + Fraction(b) for a, b in zip(self.base, v)), self.edges, self.derivatives)

    def to_json(self) -> dict:
        return {
            "coeff": rational_to_json(self.coeff),
            "base": [rational_to_json(a) for a in self.base],
            "edges": [e.to_json() for e in self.edges],
            "derivatives": [{"direction": list(u), "order": o} for u, o in self.derivatives],
        }

    @classmethod
    def from_json(cls, d) -> "Term":
        return cls(rational_from_json(d["coeff"]), tuple(rational_from_json(a) for a in d["base"]),
                   tuple(Edge.from_json(e) for e in d["edges"]),
                   tuple((tuple(x["direction"]), x["order"]) for x in d["derivatives"]))


@dataclass(frozen=True)
class FaceDistribution:
    dim: int
    terms: tuple[Term, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(t for t in self.terms if t.coeff != 0))

    def __add__(self, other: "FaceDistribution") -> "FaceDistribution":
        if self.dim != other.dim:
            raise ValueError("ambient dimensions differ")
        return FaceDistribution(self.dim, self.terms + other.terms)

    def __neg__(self):
        return self.scaled(-1)

    def __sub__(self, other):
        return self + (-other)

    def scaled(self, c) -> "FaceDistribution":
        c = to_rational(c)
        return FaceDistribution(self.dim, tuple(t.scaled(c) for t in self.terms))

    def translated(self, v) -> "FaceDistribution":
        return FaceDistribution(self.dim, tuple(t.translated(v) for t in self.terms))

    @property
    def is_compact(self) -> bool:
        return all(t.is_compact for t in self.terms)

    @property
    def variables(self) -> tuple[str, ...]:
        return default_variables(self.dim)

    def to_json(self) -> dict:
        return {"dim": self.dim, "terms": [t.to_json() for t in self.terms]}

    @classmethod
    def from_json(cls, d) -> "FaceDistribution":
        return cls(d["dim"], tuple(Term.from_json(t) for t in d["terms"]))

    @classmethod
    def zero(cls, dim: int) -> "FaceDistribution":
        return cls(dim, ())


def dsum(dists: Sequence[FaceDistribution], dim: int) -> FaceDistribution:
    out = FaceDistribution.zero(dim)
    for d in dists:
        out = out + d
    return out


# ---------------------------------------------------------------------------
# elementary distributions
# ---------------------------------------------------------------------------

def point_mass(x, coeff=1, direction=None, order: int = 0) -> FaceDistribution:
    """coeff * (d/d direction)^order f evaluated at x."""
    x = tuple(to_rational(a) for a in (x if isinstance(x, (tuple, list)) else (x,)))
    derivs = ()
    if order:
        if direction is None:
            if len(x) != 1:
                raise ValueError("derivative needs a direction")
            direction = (1,)
        derivs = ((tuple(direction), order),)
    return FaceDistribution(len(x), (Term(to_rational(coeff), x, (), derivs),))


def segment(a, b, density: MultiPoly | None = None, coeff=1) -> FaceDistribution:
    """Lebesgue on [a, b] in one dimension; ``density`` is a polynomial in ``t = xi - a``."""
    a, b = to_rational(a), to_rational(b)
    if b < a:
        raise ValueError("need a <= b")
    dens = density if density is not None else _one_t()
    return FaceDistribution(1, (Term(to_rational(coeff), (a,), (Edge((1,), b - a, dens),)),))


def ray(a, direction: int = 1, density: MultiPoly | None = None, coeff=1) -> FaceDistribution:
    dens = density if density is not None else _one_t()
    return FaceDistribution(1, (Term(to_rational(coeff), (to_rational(a),), (Edge((direction,), None, dens),)),))


def em_coefficient(n: int) -> Fraction:
    """Coefficient of q^{n-1} in 1/(1 - e^{q y}), divided by y^{n-1}: -B_n/n!."""
    return -bernoulli(n) / factorial(n)


def dh_halfline(a, direction: int, n: int) -> FaceDistribution:
    """Distribution DH_n for f -> sum_{i >= 0} f(a + direction*i/k) ~ sum k^{1-n} <DH_n, f>."""
    if direction not in (1, -1):
        raise ValueError("direction must be +1 or -1")
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return ray(a, direction)
    c = em_coefficient(n)
    if c == 0:
        return FaceDistribution.zero(1)
    return point_mass(a, c, (direction,), n - 1)


def dh_interval(a, b, n: int) -> FaceDistribution:
    """DH_n for sum_{j=ka}^{kb} f(j/k):  Lebesgue, (delta_a+delta_b)/2, then
    B_n/n! (f^{(n-1)}(b) - f^{(n-1)}(a)) for even n."""
    a, b = to_rational(a), to_rational(b)
    if not a < b:
        raise ValueError("need a < b")
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return segment(a, b)
    if n == 1:
        return point_mass(a, Fraction(1, 2)) + point_mass(b, Fraction(1, 2))
    c = bernoulli(n) / factorial(n)
    if c == 0:
        return FaceDistribution.zero(1)
    return point_mass(b, c, (1,), n - 1) + point_mass(a, -c, (1,), n - 1)


# ---------------------------------------------------------------------------
# products
# ---------------------------------------------------------------------------

def dh_tensor(a: FaceDistribution, b: FaceDistribution) -> FaceDistribution:
    """Product distribution on R^{ga} x R^{gb}."""
    za, zb = (0,) * a.dim, (0,) * b.dim
    terms = []
    for s in a.terms:
        for t in b.terms:
            edges = tuple(Edge(e.direction + zb, e.length, e.density) for e in s.edges) + \
                tuple(Edge(za + e.direction, e.length, e.density) for e in t.edges)
            derivs = tuple((u + zb, o) for u, o in s.derivatives) + tuple((za + u, o) for u, o in t.derivatives)
            terms.append(Term(s.coeff * t.coeff, s.base + t.base, edges, derivs))
    return FaceDistribution(a.dim + b.dim, tuple(terms))


def dh_convolve(a: FaceDistribution, b: FaceDistribution) -> FaceDistribution:
    """<a*b, f> = <a_x (x) b_y, f(x+y)>; rank-one results are reduced to canonical form."""
    if a.dim != b.dim:
        raise ValueError("ambient dimensions differ")
    if not a.is_compact and not b.is_compact:
        dirs = {e.direction for t in a.terms + b.terms for e in t.edges if e.is_ray}
        if a.dim == 1 and len(dirs) > 1:
            raise UnsupportedShape("convolution of rays pointing in opposite directions diverges")
        if a.dim > 1:
            raise UnsupportedShape("at most one factor may have unbounded support")
    terms = []
    for s in a.terms:
        for t in b.terms:
            terms.append(Term(s.coeff * t.coeff, tuple(x + y for x, y in zip(s.base, t.base)),
                              s.edges + t.edges, s.derivatives + t.derivatives))
    out = FaceDistribution(a.dim, tuple(terms))
    return canonical_1d(out) if a.dim == 1 else out


def graded_convolution(a: Sequence[FaceDistribution], b: Sequence[FaceDistribution], n: int) -> FaceDistribution:
    """Degree-n part of (sum_i a_i)(sum_j b_j): sum_{i+j=n} a_i * b_j."""
    out = dsum([dh_convolve(a[i], b[n - i]) for i in range(n + 1)], a[0].dim)
    return canonical_1d(out) if out.dim == 1 else out


def graded_tensor(a: Sequence[FaceDistribution], b: Sequence[FaceDistribution], n: int) -> FaceDistribution:
    return dsum([dh_tensor(a[i], b[n - i]) for i in range(n + 1)], a[0].dim + b[0].dim)


# ---------------------------------------------------------------------------
# one-dimensional canonical form
# ---------------------------------------------------------------------------

X = "x"
Z = "z"


def _pp_of_edge(e: Edge):
    """Pushforward of rho(t) dt under t -> w t as [(lo, hi, poly in x)]."""
    (w,) = e.direction
    if w == 0:
        raise UnsupportedShape("zero edge direction")
    dens = e.density.rename({T: X}).substitute({X: MultiPoly.var(X) / w}) / abs(w)
    dens = dens.with_variables((X,))
    if e.length is None:
        return [(Fraction(0), None, dens)] if w > 0 else [(None, Fraction(0), dens)]
    end = w * e.length
    return [(min(Fraction(0), end), max(Fraction(0), end), dens)]


def _add(a, b):
    if a is None or b is None:
        return None
    return a + b


def _pp_convolve(f, g):
    out = []
    zx = MultiPoly.var(Z, (X, Z))
    xx = MultiPoly.var(X, (X, Z))
    for a1, b1, p in f:
        for a2, b2, q in g:
            if (a1 is None and b2 is None) or (b1 is None and a2 is None):
                raise UnsupportedShape("convolution of opposite rays diverges")
            integrand = p.with_variables((X, Z)) * q.with_variables((X,)).substitute({X: zx - xx}).with_variables((X, Z))
            anti = integrand.antiderivative(X)
            lo_z = _add(a1, a2)
            hi_z = _add(b1, b2)
            bps = sorted({v for v in (_add(a1, a2), _add(a1, b2), _add(b1, a2), _add(b1, b2)) if v is not None})
            cuts = ([lo_z] if lo_z is None else []) + bps + ([None] if hi_z is None else [])
            if lo_z is None:
                cuts = [None] + bps
            for zl, zr in zip(cuts, cuts[1:]):
                if zl is not None and zr is not None and zl >= zr:
                    continue
                if zl is None:
                    zs = zr - 1
                elif zr is None:
                    zs = zl + 1
                else:
                    zs = (zl + zr) / 2
                # lower limit: max(a1, z - b2); upper: min(b1, z - a2)
                lo_c = [(a1, None)] if a1 is not None else []
                if b2 is not None:
                    lo_c.append((zs - b2, ("z-", b2)))
                hi_c = [(b1, None)] if b1 is not None else []
                if a2 is not None:
                    hi_c.append((zs - a2, ("z-", a2)))
                lo_v, lo_f = max(lo_c, key=lambda c: c[0])
                hi_v, hi_f = min(hi_c, key=lambda c: c[0])
                if lo_v >= hi_v:
                    continue
                lo_expr = MultiPoly.constant(lo_v, (Z,)) if lo_f is None else MultiPoly.var(Z, (Z,)) - lo_f[1]
                hi_expr = MultiPoly.constant(hi_v, (Z,)) if hi_f is None else MultiPoly.var(Z, (Z,)) - hi_f[1]
                h = (anti.substitute({X: hi_expr}) - anti.substitute({X: lo_expr})).with_variables((Z,))
                out.append((zl, zr, h.rename({Z: X})))
    return out


class _Canon1D:
    """Piecewise-polynomial density plus point-derivative masses on the line."""

    def __init__(self):
        self.segments = []          # (lo, hi, poly in x); None = infinite
        self.points: dict[tuple[Fraction, int], Fraction] = {}

    def add_point(self, x, order, c):
        if c:
            key = (Fraction(x), order)
            self.points[key] = self.points.get(key, Fraction(0)) + c

    def add_segment(self, lo, hi, h, order, c):
        """Adds c * int_lo^hi h(x) f^{(order)}(x) dx, integrating by parts."""
        if h.is_zero() or c == 0:
            return
        for i in range(order):
            hi_ = h.diff(X, i)
            sgn = (-1) ** i
            if hi is not None:
                self.add_point(hi, order - 1 - i, c * sgn * hi_.evaluate([hi]))
            if lo is not None:
                self.add_point(lo, order - 1 - i, -c * sgn * hi_.evaluate([lo]))
        self.segments.append((lo, hi, h.diff(X, order) * (c * (-1) ** order)))

    def normalize(self):
        bps = sorted({v for lo, hi, _ in self.segments for v in (lo, hi) if v is not None})
        left_inf = any(lo is None for lo, _, _ in self.segments)
        right_inf = any(hi is None for _, hi, _ in self.segments)
        cuts = ([None] if left_inf else []) + bps + ([None] if right_inf else [])
        if left_inf and right_inf and not bps:
            cuts = [None, Fraction(0), None]
            bps = [Fraction(0)]
        elementary = []
        for zl, zr in zip(cuts, cuts[1:]):
            if zl is None and zr is None:
                continue
            acc = MultiPoly((X,))
            for lo, hi, h in self.segments:
                inside_lo = lo is None or (zl is not None and zl >= lo)
                inside_hi = hi is None or (zr is not None and zr <= hi)
                if inside_lo and inside_hi:
                    acc = acc + h
            elementary.append([zl, zr, acc.with_variables((X,))])
        merged = []
        for piece in elementary:
            if piece[2].is_zero():
                continue
            if merged and merged[-1][1] == piece[0] and merged[-1][2] == piece[2] and piece[0] is not None \
                    and merged[-1][1] is not None:
                merged[-1][1] = piece[1]
            else:
                merged.append(piece)
        self.segments = [tuple(p) for p in merged]
        self.points = {k: v for k, v in sorted(self.points.items()) if v}

    def to_distribution(self) -> FaceDistribution:
        terms = []
        t = MultiPoly.var(T)
        for lo, hi, h in self.segments:
            if lo is None and hi is None:
                # whole line: two rays from the origin
                terms.append(Term(Fraction(1), (Fraction(0),), (Edge((1,), None, h.rename({X: T})),)))
                terms.append(Term(Fraction(1), (Fraction(0),), (Edge((-1,), None, h.substitute({X: -t})
                                                                     .with_variables((T,))),)))
            elif lo is not None:
                dens = h.substitute({X: t + lo}).with_variables((T,))
                length = None if hi is None else hi - lo
                terms.append(Term(Fraction(1), (lo,), (Edge((1,), length, dens),)))
            else:
                dens = h.substitute({X: hi - t}).with_variables((T,))
                terms.append(Term(Fraction(1), (hi,), (Edge((-1,), None, dens),)))
        for (x, o), c in self.points.items():
            terms.append(Term(c, (x,), (), (((1,), o),) if o else ()))
        return FaceDistribution(1, tuple(terms))


def _canon(d: FaceDistribution) -> _Canon1D:
    if d.dim != 1:
        raise UnsupportedShape("canonical form is only defined in one dimension")
    acc = _Canon1D()
    for term in d.terms:
        factor = Fraction(1)
        order = 0
        for (u,), o in term.derivatives:
            factor *= Fraction(u) ** o
            order += o
        c = term.coeff * factor
        (b,) = term.base
        if not term.edges:
            acc.add_point(b, order, c)
            continue
        pp = _pp_of_edge(term.edges[0])
        for e in term.edges[1:]:
            pp = _pp_convolve(pp, _pp_of_edge(e))
        for lo, hi, h in pp:
            shifted = h.substitute({X: MultiPoly.var(X) - b}).with_variables((X,))
            acc.add_segment(_add(lo, b), _add(hi, b), shifted, order, c)
    acc.normalize()
    return acc


def canonical_1d(d: FaceDistribution) -> FaceDistribution:
    """Unique representative: maximal polynomial segments plus point masses f^{(o)}(x)."""
    return _canon(d).to_distribution()


def canonical_parts(d: FaceDistribution):
    """(segments, points) of the canonical form, for structural inspection."""
    c = _canon(d)
    return list(c.segments), dict(c.points)


def same_distribution_1d(a: FaceDistribution, b: FaceDistribution) -> bool:
    return canonical_parts(a - b) == ([], {})


# ---------------------------------------------------------------------------
# multiplication by polynomials (rank one and single-edge terms)
# ---------------------------------------------------------------------------

def multiply_by_polynomial(d: FaceDistribution, p: MultiPoly) -> FaceDistribution:
    """<d * p, f> = <d, p f>."""
    vs = default_variables(d.dim)
    p = p.with_variables(vs)
    out = []
    for term in d.terms:
        if len(term.edges) > 1:
            raise UnsupportedShape("polynomial multiplication needs terms with at most one edge")
        ops = [u for u, o in term.derivatives for _ in range(o)]
        expansions = [(p, ())]
        for u in ops:
            nxt = []
            for q, ds in expansions:
                dq = q.directional_diff(u, 1)
                if not dq.is_zero():
                    nxt.append((dq, ds))
                nxt.append((q, ds + (u,)))
            expansions = nxt
        for q, ds in expansions:
            derivs = _group_derivs(ds)
            if term.edges:
                e = term.edges[0]
                t = MultiPoly.var(T)
                pt = {v: t * w + b for v, w, b in zip(vs, e.direction, term.base)}
                qt = q.substitute(pt).with_variables((T,))
                out.append(Term(term.coeff, term.base, (Edge(e.direction, e.length, e.density * qt),), derivs))
            else:
                val = q.evaluate(list(term.base))
                out.append(Term(term.coeff * val, term.base, (), derivs))
    return FaceDistribution(d.dim, tuple(out))


def _group_derivs(ds):
    counts: dict[tuple[int, ...], int] = {}
    for u in ds:
        counts[u] = counts.get(u, 0) + 1
    return tuple(sorted(counts.items()))


# ---------------------------------------------------------------------------
# exact pairing with polynomials
# ---------------------------------------------------------------------------

def _pair_term_poly(term: Term, f: MultiPoly, vs) -> Fraction:
    g = f
    for u, o in term.derivatives:
        g = g.directional_diff(u, o)
    if g.is_zero():
        return Fraction(0)
    tvars = tuple(f"t{i}" for i in range(len(term.edges)))
    subs = {}
    for i, v in enumerate(vs):
        expr = MultiPoly.constant(term.base[i], tvars)
        for tv, e in zip(tvars, term.edges):
            if e.direction[i]:
                expr = expr + MultiPoly.var(tv, tvars) * e.direction[i]
        subs[v] = expr
    h = g.substitute(subs).with_variables(tvars) if tvars else MultiPoly.constant(g.evaluate(list(term.base)), ())
    for tv, e in zip(tvars, term.edges):
        h = h * e.density.rename({T: tv}).with_variables(tvars)
    for tv, e in zip(tvars, term.edges):
        if h.is_zero():
            return Fraction(0)
        if e.length is None:
            raise DivergentPairing("divergent pairing: polynomial test function against an unbounded cone term")
        h = h.integrate(tv, 0, e.length)
    return term.coeff * h.constant_term()


def pair(d: FaceDistribution, f) -> Fraction | float:
    """<d, f> for a polynomial (exact) or a numeric :class:`TestFunction`."""
    from .testfunctions import TestFunction, pair_numeric

    if isinstance(f, TestFunction):
        if f.poly is not None:
            f = f.poly
        else:
            return pair_numeric(d, f)[0]
    if not isinstance(f, MultiPoly):
        f = MultiPoly.constant(to_rational(f), default_variables(d.dim))
    vs = default_variables(d.dim)
    f = f.with_variables(vs) if set(f.used_variables()) <= set(vs) else _bad_vars(f, vs)
    return sum((_pair_term_poly(t, f, vs) for t in d.terms), Fraction(0))


def _bad_vars(f, vs):
    raise ValueError(f"test polynomial uses {f.used_variables()}, expected a subset of {vs}")


# ---------------------------------------------------------------------------
# Laplace-transform moments (works for sums of unbounded cone terms)
# ---------------------------------------------------------------------------

def _exp_series(b: Fraction, order: int) -> LaurentSeries:
    return LaurentSeries({r: b ** r / factorial(r) for r in range(order + 1)}, order, "s")


def _edge_series(e: Edge, a: Fraction, order: int) -> LaurentSeries:
    """int_0^L rho(t) e^{t a s} dt as a series in s (Laurent for rays)."""
    dens = e.density.with_variables((T,))
    if e.length is None:
        if a == 0:
            raise DivergentPairing("divergent pairing: ray orthogonal to the Laplace direction")
        coeffs: dict[int, Fraction] = {}
        for (m,), c in dens.terms.items():
            # int_0^oo t^m e^{t a s} dt = m!/(-a s)^{m+1}
            coeffs[-(m + 1)] = coeffs.get(-(m + 1), Fraction(0)) + c * factorial(m) / (-a) ** (m + 1)
        return LaurentSeries(coeffs, order, "s")
    coeffs = {}
    L = e.length
    for r in range(order + 1):
        tot = Fraction(0)
        for (m,), c in dens.terms.items():
            tot += c * L ** (m + r + 1) / (m + r + 1)
        coeffs[r] = a ** r / factorial(r) * tot
    return LaurentSeries(coeffs, order, "s")


def laplace_series(d: FaceDistribution, direction: Sequence[int], order: int) -> LaurentSeries:
    """Series in s of <d, exp(s <xi, direction>)>, exact through s^order."""
    total = None
    for term in d.terms:
        poles = sum(1 + (e.density.degree() if e.is_ray else 0) for e in term.edges if e.is_ray)
        work = order + poles
        b = sum(Fraction(x) * y for x, y in zip(term.base, direction))
        ser = _exp_series(b, work)
        for e in term.edges:
            a = sum(Fraction(x) * y for x, y in zip(e.direction, direction))
            ser = laurent_mul(ser, _edge_series(e, a, work))
        for u, o in term.derivatives:
            a = sum(Fraction(x) * y for x, y in zip(u, direction))
            ser = ser.shift(o) * (a ** o)
        ser = ser * term.coeff
        total = ser if total is None else total + ser
    if total is None:
        return LaurentSeries({}, order, "s")
    return total


def _linear_form_power_moment(d: FaceDistribution, direction, m: int) -> Fraction:
    ser = laplace_series(d, direction, m)
    if ser.truncation_order < m:
        raise DivergentPairing("insufficient precision in Laplace series")
    neg = {e: c for e, c in ser.coefficients.items() if e < 0}
    if neg:
        raise DivergentPairing(f"divergent pairing: unbounded support, poles do not cancel ({neg})")
    return ser.coefficient(m) * factorial(m)


def _directions(d: FaceDistribution, m: int):
    g = d.dim
    need = len(monomials(g, m))
    rays = [e.direction for t in d.terms for e in t.edges if e.is_ray]
    chosen, rows = [], []
    s = 2
    while len(chosen) < need:
        cand = tuple([1] + [s ** (i + 1) + i for i in range(g - 1)]) if g > 1 else (1,)
        s += 1
        if g > 1 and any(sum(a * b for a, b in zip(w, cand)) == 0 for w in rays):
            continue
        row = [multinomial(al) * _prod_pow(cand, al) for al in monomials(g, m)]
        if rank(rows + [row]) > len(rows):
            rows.append(row)
            chosen.append(cand)
        if s > 10_000:
            raise RuntimeError("could not find generic directions")
    return chosen, rows


def _prod_pow(v, al):
    r = 1
    for a, e in zip(v, al):
        r *= a ** e
    return r


def pair_regularized(d: FaceDistribution, p) -> Fraction:
    """Exact <d, p> for polynomial p via Laplace moments.

    Agrees with :func:`pair` on compact distributions; on sums of cone terms
    whose total is compact (vertex assemblies) it returns the pairing of the
    total even though each term diverges.
    """
    vs = default_variables(d.dim)
    if not isinstance(p, MultiPoly):
        p = MultiPoly.constant(to_rational(p), vs)
    p = p.with_variables(vs)
    total = Fraction(0)
    for m in range(p.degree() + 1):
        part = p.homogeneous_part(m)
        if part.is_zero():
            continue
        if d.dim == 1:
            total += part.coefficient((m,)) * _linear_form_power_moment(d, (1,), m)
            continue
        dirs, rows = _directions(d, m)
        mons = monomials(d.dim, m)
        # find lam with sum_j lam_j rows[j][alpha] = coeff_alpha
        cols = [[rows[j][i] for j in range(len(rows))] for i in range(len(mons))]
        lam = solve(cols, [part.coefficient(al) for al in mons])
        for lj, dj in zip(lam, dirs):
            if lj:
                total += lj * _linear_form_power_moment(d, dj, m)
    return total


def pair_exact(d: FaceDistribution, p) -> Fraction:
    """Exact polynomial pairing: direct integration when compact, else Laplace moments."""
    if d.is_compact:
        return pair(d, p)
    return pair_regularized(d, p)


# ---------------------------------------------------------------------------
# vertex cones and Delzant polytopes
# ---------------------------------------------------------------------------

def dh_vertex_cone(cone: VertexCone, n: int, gamma: Sequence | None = None) -> FaceDistribution:
    """q^n coefficient distribution of prod_i 1/(1 - e^{q <w_i, X>}) at the cone's vertex.

    With y_i = <w_i, X>, prod 1/(1-e^{q y_i}) = q^{-g} prod(-1/y_i) * sum_n q^n Todd_n(-y),
    where Todd_n is the graded Todd component for weights -e_i.  A factor -1/y_i is
    Lebesgue on the ray along w_i; -y_i^m is minus the m-th derivative along w_i at
    the vertex.  If ``gamma`` is given, rays with <w, gamma> < 0 are reflected (with a
    sign), which changes the distribution by whole-line terms only and makes the sum
    over vertices of a polytope compactly supported.
    """
    if not cone.is_unimodular():
        raise UnsupportedShape("vertex cone is not unimodular")
    g = len(cone.generators)
    yv = tuple(f"y{i + 1}" for i in range(g))
    weights = [tuple(-1 if j == i else 0 for j in range(g)) for i in range(g)]
    comp = graded_todd_diagonal(weights, n, yv)[n]
    terms = []
    for alpha, c in comp.terms.items():
        coeff = c * (-1) ** sum(1 for a in alpha if a >= 1)
        edges, derivs = [], []
        for w, a in zip(cone.generators, alpha):
            if a == 0:
                if gamma is not None and sum(Fraction(x) * y for x, y in zip(w, gamma)) < 0:
                    edges.append(Edge(tuple(-x for x in w)))
                    coeff = -coeff
                else:
                    edges.append(Edge(tuple(w)))
            elif a >= 2:
                derivs.append((tuple(w), a - 1))
        terms.append(Term(coeff, tuple(cone.vertex), tuple(edges), tuple(derivs)))
    return FaceDistribution(g, tuple(terms))


def dh_delzant(p: LatticePolytope, n: int, gamma: Sequence | None = None) -> FaceDistribution:
    """Vertex-cone assembly of DH_n for a Delzant polytope (g <= 2)."""
    ok, why = is_delzant(p)
    if not ok:
        raise UnsupportedShape(f"not Delzant: {why}")
    if p.dim > 2:
        raise UnsupportedShape("vertex assembly is limited to dimension <= 2; use tensor products")
    gamma = tuple(gamma) if gamma is not None else default_gamma(p.dim)
    out = dsum([dh_vertex_cone(tangent_cone(p, v), n, gamma) for v in p.vertices], p.dim)
    return canonical_1d(out) if p.dim == 1 else out


def dh_box(lows, highs, n: int) -> FaceDistribution:
    """Tensor-product route for a lattice box."""
    factors = [[dh_interval(a, b, i) for i in range(n + 1)] for a, b in zip(lows, highs)]
    acc = factors[0]
    for f in factors[1:]:
        acc = [graded_tensor(acc, f, i) for i in range(n + 1)]
    return acc[n]


# ---------------------------------------------------------------------------
# cone-supported rank-one characters (wall-crossing route)
# ---------------------------------------------------------------------------

def dh_from_character(piece: ConeCharacter, n: int, d: int) -> FaceDistribution:
    """DH_n of f -> sum_j w(j, k) f(j/k) for a rank-one cone character, normalized by k^d."""
    if piece.rank != 1:
        raise UnsupportedShape("only rank-one pieces are supported")
    poly = piece.multiplicity.polynomials[0] if piece.multiplicity is not None \
        else MultiPoly.constant(1, ("j", "k"))
    if piece.multiplicity is not None and piece.multiplicity.period != 1:
        raise UnsupportedShape("period > 1")
    (beta,) = piece.apex
    out = FaceDistribution.zero(1)
    xi = MultiPoly.var("xi")
    poly = poly.with_variables(("j", "k"))
    for (a, b), c in poly.terms.items():
        nprime = n - d + 1 + a + b
        if nprime < 0:
            if (a + b + 1) > d:
                raise UnsupportedShape("piece grows faster than k^d")
            continue
        if piece.lines:
            h = (ray(0, 1) + ray(0, -1)) if nprime == 0 else FaceDistribution.zero(1)
        else:
            (w,) = piece.generators
            (s,) = w
            h = dh_halfline(beta, s, nprime)
            if piece.open_[0] and nprime == 1:
                h = h - point_mass(beta)
        out = out + multiply_by_polynomial(h, xi ** a).scaled(c * piece.sign)
    return canonical_1d(out)


# ---------------------------------------------------------------------------
# exact moment oracle
# ---------------------------------------------------------------------------

def dh_moment_oracle(m: MultiplicityFunction, p: MultiPoly, d: int, N: int | None = None) -> list[Fraction]:
    """<DH_n, p> for n = 0..N+d from an exact polynomial fit of the lattice sums.

    k^N * sum_lambda m(lambda, k) p(lambda/k) is a polynomial in k of degree N+d
    whose coefficient of k^{N+d-n} is <DH_n, p>.  Fits on k = 1..N+d+2 and
    requires a zero residual.
    """
    if not m.is_finite:
        raise DivergentPairing("divergent pairing: moment oracle needs finitely supported multiplicities")
    vs = default_variables(m.rank)
    p = p.with_variables(vs) if isinstance(p, MultiPoly) else MultiPoly.constant(to_rational(p), vs)
    if N is None:
        N = max(p.degree(), 0)
    D = N + d
    ks = list(range(1, D + 3))
    rows, ys = [], []
    for k in ks:
        s = Fraction(0)
        for lam, mult in m.table(k):
            s += mult * p.evaluate([Fraction(x, k) for x in lam])
        rows.append([Fraction(k) ** (D - n) for n in range(D + 1)])
        ys.append(s * Fraction(k) ** N)
    coeffs, resid = least_squares_exact(rows, ys)
    if any(resid):
        raise NotQuasiPolynomial("not quasi-polynomial of expected degree")
    return coeffs


# ---------------------------------------------------------------------------
# support
# ---------------------------------------------------------------------------

def term_corners(term: Term) -> list[tuple[Fraction, ...]] | None:
    """Corners of the parallelepiped carrying the term, or None if it is unbounded."""
    if not term.is_compact:
        return None
    pts = [tuple(term.base)]
    for e in term.edges:
        step = tuple(e.length * a for a in e.direction)
        pts = pts + [tuple(x + s for x, s in zip(p, step)) for p in pts]
    return pts


def support_within(d: FaceDistribution, p: LatticePolytope) -> bool:
    """Every term is carried by a compact set inside ``p`` (convexity: corners suffice)."""
    for term in d.terms:
        corners = term_corners(term)
        if corners is None or not all(p.contains(c) for c in corners):
            return False
    return True
