"""Multiplicity functions m(lambda, k) and their cone decompositions.

A multiplicity function is the coefficient table of a character
sum_lambda m(lambda, k) g^lambda.  The compact models have finite support
for each k; half-lines, cones and partition functions do not, and can only be
summed against something with compact support.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import ceil, floor
from typing import Callable, Sequence

from .algebra import MultiPoly, solve, to_rational
from .polytope import LatticePolytope, dilate, is_delzant, lattice_points, tangent_cone


class InfiniteSupport(ValueError):
    pass


class NonGenericParameter(ValueError):
    pass


Box = Sequence[tuple]


def box_lattice_points(box: Box, k: int = 1) -> list[tuple[int, ...]]:
    """Lattice points of k*box, lexicographic."""
    ranges = [range(ceil(lo * k), floor(hi * k) + 1) for lo, hi in box]
    return [tuple(p) for p in product(*ranges)]


@dataclass(frozen=True)
class MultiplicityFunction:
    """lambda, k -> integer, with a rule for the finite support when there is one."""
    rank: int
    evaluator: Callable[[tuple, int], int]
    support: Callable[[int], list] | None = None
    label: str = ""

    def __call__(self, lam, k: int) -> int:
        lam = (lam,) if isinstance(lam, int) else tuple(lam)
        return self.evaluator(lam, k)

    @property
    def is_finite(self) -> bool:
        return self.support is not None

    def support_points(self, k: int, box: Box | None = None) -> list[tuple[int, ...]]:
        """Lattice points with m != 0; ``box`` (in xi = lambda/k units) restricts the search."""
        if self.support is not None:
            pts = [p for p in self.support(k) if self.evaluator(p, k) != 0]
            if box is not None:
                pts = [p for p in pts if all(lo * k <= x <= hi * k for x, (lo, hi) in zip(p, box))]
            return pts
        if box is None:
            raise InfiniteSupport(f"{self.label or 'multiplicity'} has infinite support; supply a box")
        return [p for p in box_lattice_points(box, k) if self.evaluator(p, k) != 0]

    def table(self, k: int, box: Box | None = None) -> list[tuple[tuple[int, ...], int]]:
        return [(p, self.evaluator(p, k)) for p in self.support_points(k, box)]


def toric_multiplicity(p: LatticePolytope) -> MultiplicityFunction:
    ok, why = is_delzant(p)
    if not ok:
        warnings.warn(f"polytope is not Delzant ({why}); using the plain lattice indicator")

    @lru_cache(maxsize=64)
    def dil(k):
        return dilate(p, k)

    def ev(lam, k):
        return 1 if dil(k).contains(lam) else 0

    def sup(k):
        return lattice_points(dil(k))

    return MultiplicityFunction(p.dim, ev, sup, label="toric")


def p1p1_multiplicity() -> MultiplicityFunction:
    """The tent 2k+1-|j| on [-2k, 2k]."""
    def ev(lam, k):
        (j,) = lam
        if j < -2 * k or j > 2 * k:
            return 0
        return 2 * k + 1 + j if j <= 0 else 2 * k + 1 - j

    def sup(k):
        return [(j,) for j in range(-2 * k, 2 * k + 1)]

    return MultiplicityFunction(1, ev, sup, label="p1p1")


def delta_multiplicity(rank: int) -> MultiplicityFunction:
    zero = (0,) * rank
    return MultiplicityFunction(rank, lambda lam, k: 1 if tuple(lam) == zero else 0,
                                lambda k: [zero], label="delta")


def halfline_multiplicity(start, direction: int = 1) -> MultiplicityFunction:
    """1 on {j : direction*(j - k*start) >= 0}."""
    start = to_rational(start)
    if direction not in (1, -1):
        raise ValueError("direction must be +1 or -1")

    def ev(lam, k):
        (j,) = lam
        return 1 if direction * (j - k * start) >= 0 else 0

    return MultiplicityFunction(1, ev, None, label="halfline")


def cone_multiplicity(apex: Sequence, generators: Sequence[Sequence[int]]) -> MultiplicityFunction:
    """Indicator of the lattice points of k*apex + Cone(generators), unimodular generators."""
    piece = ConeCharacter(tuple(to_rational(a) for a in apex), tuple(tuple(w) for w in generators))
    if not piece.is_unimodular():
        raise ValueError("cone generators must be unimodular")
    return MultiplicityFunction(len(apex), lambda lam, k: piece.value(lam, k), None, label="cone")


def convolve_multiplicities(a: MultiplicityFunction, b: MultiplicityFunction) -> MultiplicityFunction:
    """(a*b)(lambda, k) = sum_mu a(mu, k) b(lambda - mu, k); both supports must be finite."""
    if a.rank != b.rank:
        raise ValueError("ranks differ")
    if not (a.is_finite and b.is_finite):
        raise InfiniteSupport("convolution needs finite supports (Minkowski sum would be unbounded)")

    @lru_cache(maxsize=64)
    def table(k):
        out: dict[tuple, int] = {}
        for p, x in a.table(k):
            for q, y in b.table(k):
                s = tuple(u + v for u, v in zip(p, q))
                out[s] = out.get(s, 0) + x * y
        return {s: v for s, v in out.items() if v}

    return MultiplicityFunction(a.rank, lambda lam, k: table(k).get(tuple(lam), 0),
                                lambda k: sorted(table(k)), label=f"({a.label}*{b.label})")


def character_eval(m: MultiplicityFunction, k: int, g_point) -> Fraction:
    """sum_lambda m(lambda, k) g^lambda, exactly, for finitely supported m."""
    if not m.is_finite:
        raise InfiniteSupport("infinite support: evaluate the cone pieces in closed form instead")
    gs = (to_rational(g_point),) if m.rank == 1 and not isinstance(g_point, (tuple, list)) \
        else tuple(to_rational(x) for x in g_point)
    total = Fraction(0)
    for lam, mult in m.table(k):
        term = Fraction(mult)
        for g, e in zip(gs, lam):
            if g == 0 and e < 0:
                raise ZeroDivisionError("g is a pole of this character")
            term *= g ** e
        total += term
    return total


# ---------------------------------------------------------------------------
# cone-supported characters
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuasiPolynomial:
    """Polynomial in (lambda, k) per residue class of k mod ``period``."""
    period: int
    polynomials: tuple[MultiPoly, ...]

    @classmethod
    def constant(cls, c, variables) -> "QuasiPolynomial":
        return cls(1, (MultiPoly.constant(c, variables),))

    @classmethod
    def polynomial(cls, p: MultiPoly) -> "QuasiPolynomial":
        return cls(1, (p,))

    def __call__(self, lam, k) -> Fraction:
        p = self.polynomials[k % self.period]
        vals = list(lam) + [k]
        return p.evaluate(vals)

    def __sub__(self, other: "QuasiPolynomial") -> "QuasiPolynomial":
        if self.period != other.period:
            raise ValueError("periods differ")
        return QuasiPolynomial(self.period, tuple(a - b for a, b in zip(self.polynomials, other.polynomials)))


def lambda_k_variables(rank: int) -> tuple[str, ...]:
    if rank == 1:
        return ("j", "k")
    return tuple(f"l{i + 1}" for i in range(rank)) + ("k",)


@dataclass(frozen=True)
class ConeCharacter:
    """sign * mult(lambda, k) on the lattice points of k*apex + cone.

    ``open_`` marks generators whose coefficient must be strictly positive;
    ``lines`` are lineality directions (both signs allowed).
    """
    apex: tuple[Fraction, ...]
    generators: tuple[tuple[int, ...], ...]
    open_: tuple[bool, ...] = ()
    lines: tuple[tuple[int, ...], ...] = ()
    multiplicity: QuasiPolynomial | None = None
    sign: int = 1
    label: str = ""

    def __post_init__(self):
        if not self.open_:
            object.__setattr__(self, "open_", (False,) * len(self.generators))
        if len(self.generators) + len(self.lines) != len(self.apex):
            raise ValueError("generators and lines must form a basis")

    @property
    def rank(self) -> int:
        return len(self.apex)

    def is_unimodular(self) -> bool:
        from .algebra import det
        return abs(det(list(self.generators) + list(self.lines))) == 1

    def apex_at(self, k: int) -> tuple[Fraction, ...]:
        return tuple(a * k for a in self.apex)

    def contains(self, lam, k: int) -> bool:
        basis = list(self.generators) + list(self.lines)
        rhs = [Fraction(x) - a for x, a in zip(lam, self.apex_at(k))]
        cols = [[basis[j][i] for j in range(len(basis))] for i in range(self.rank)]
        coords = solve(cols, rhs)
        if coords is None:
            raise ValueError("degenerate cone")
        for c, op in zip(coords, self.open_):
            if c < 0 or (op and c == 0):
                return False
        return True

    def value(self, lam, k: int) -> Fraction:
        lam = (lam,) if isinstance(lam, int) else tuple(lam)
        if not self.contains(lam, k):
            return Fraction(0)
        mult = Fraction(1) if self.multiplicity is None else self.multiplicity(lam, k)
        return self.sign * mult

    def first_point(self, k: int) -> tuple[Fraction, ...]:
        pt = list(self.apex_at(k))
        for w, op in zip(self.generators, self.open_):
            if op:
                pt = [a + b for a, b in zip(pt, w)]
        return tuple(pt)

    def closed_form(self, k: int, g_point) -> Fraction:
        """Rational-function value of the character (multiplicity 1, pointed cones only)."""
        if self.multiplicity is not None or self.lines:
            raise NotImplementedError("closed form only for pointed multiplicity-one cones")
        gs = (to_rational(g_point),) if not isinstance(g_point, (tuple, list)) else tuple(map(to_rational, g_point))

        def mono(v):
            r = Fraction(1)
            for g, e in zip(gs, v):
                if Fraction(e).denominator != 1:
                    raise ValueError("apex must be a lattice point")
                r *= g ** int(e)
            return r

        val = Fraction(self.sign) * mono(self.first_point(k))
        for w in self.generators:
            den = 1 - mono(w)
            if den == 0:
                raise ZeroDivisionError("g is a pole")
            val /= den
        return val


def default_gamma(g: int) -> tuple[Fraction, ...]:
    """Lexicographic perturbation direction (1, eps, eps^2, ...)."""
    return tuple(Fraction(1, 1000 ** i) for i in range(g))


def brion_decomposition(p: LatticePolytope, gamma: Sequence | None = None) -> list[ConeCharacter]:
    """Signed half-open vertex cones summing to the indicator of kP.

    Every edge generator w with <w, gamma> < 0 is replaced by -w, the cone
    becomes open along it and the sign flips.
    """
    ok, why = is_delzant(p)
    if not ok:
        raise NotImplementedError(f"Brion pieces need a Delzant polytope: {why}")
    gamma = tuple(to_rational(x) for x in (gamma or default_gamma(p.dim)))
    pieces = []
    for v in p.vertices:
        cone = tangent_cone(p, v)
        gens, opens, sign = [], [], 1
        for w in cone.generators:
            s = sum(Fraction(a) * b for a, b in zip(w, gamma))
            if s == 0:
                raise NonGenericParameter(f"gamma is orthogonal to edge {w}")
            if s < 0:
                gens.append(tuple(-a for a in w))
                opens.append(True)
                sign = -sign
            else:
                gens.append(tuple(w))
                opens.append(False)
        pieces.append(ConeCharacter(tuple(v), tuple(gens), tuple(opens), sign=sign, label=f"vertex{tuple(map(str, v))}"))
    return pieces


def sum_pieces(pieces: Sequence[ConeCharacter], lam, k: int) -> Fraction:
    return sum((pc.value(lam, k) for pc in pieces), Fraction(0))


# ---------------------------------------------------------------------------
# rank-one wall-crossing pieces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Chamber:
    """Interval [lo, hi] (in units of k; None = infinite) with a polynomial in (j, k)."""
    lo: Fraction | None
    hi: Fraction | None
    lo_closed: bool
    hi_closed: bool
    poly: MultiPoly


@dataclass(frozen=True)
class PiecewiseRank1:
    chambers: tuple[Chamber, ...]

    @property
    def walls(self) -> list[Fraction]:
        return [c.hi for c in self.chambers[:-1]]

    def __call__(self, j: int, k: int) -> Fraction:
        for c in self.chambers:
            lo_ok = c.lo is None or (j > c.lo * k or (c.lo_closed and j == c.lo * k))
            hi_ok = c.hi is None or (j < c.hi * k or (c.hi_closed and j == c.hi * k))
            if lo_ok and hi_ok:
                return c.poly.evaluate([j, k])
        raise ValueError(f"{j} is not covered by any chamber")


def p1p1_piecewise() -> PiecewiseRank1:
    vs = ("j", "k")
    j = MultiPoly.var("j", vs)
    k = MultiPoly.var("k", vs)
    zero = MultiPoly(vs)
    F = Fraction
    return PiecewiseRank1((
        Chamber(None, F(-2), False, False, zero),
        Chamber(F(-2), F(0), True, True, 2 * k + 1 + j),
        Chamber(F(0), F(2), False, True, 2 * k + 1 - j),
        Chamber(F(2), None, False, False, zero),
    ))


def paradan_pieces(m: PiecewiseRank1, r) -> list[ConeCharacter]:
    """Pieces indexed by beta in {r} + walls: the polynomial of r's chamber on all of Z,
    then at each wall the jump to the next chamber on the half-line pointing away from r."""
    r = to_rational(r)
    walls = m.walls
    if r in walls:
        raise NonGenericParameter(f"non-generic r: {r} lies on a wall")
    idx = next(i for i, c in enumerate(m.chambers)
               if (c.lo is None or r > c.lo) and (c.hi is None or r < c.hi))
    pieces = [ConeCharacter((r,), (), (), ((1,),), QuasiPolynomial.polynomial(m.chambers[idx].poly),
                            label=f"beta=r({r})")]
    for i in range(idx, len(m.chambers) - 1):
        prev, nxt = m.chambers[i], m.chambers[i + 1]
        beta = prev.hi
        pieces.append(ConeCharacter((beta,), ((1,),), (not nxt.lo_closed,), (),
                                    QuasiPolynomial.polynomial(nxt.poly - prev.poly), label=f"beta={beta}"))
    for i in range(idx, 0, -1):
        prev, nxt = m.chambers[i], m.chambers[i - 1]
        beta = prev.lo
        pieces.append(ConeCharacter((beta,), ((-1,),), (not nxt.hi_closed,), (),
                                    QuasiPolynomial.polynomial(nxt.poly - prev.poly), label=f"beta={beta}"))
    return sorted(pieces, key=lambda pc: pc.apex[0])


def paradan_pieces_p1p1(r) -> list[ConeCharacter]:
    return paradan_pieces(p1p1_piecewise(), r)


def wall_independence_check(r1, r2, k_max: int,
                            pieces_for: Callable = paradan_pieces_p1p1) -> bool:
    """Sum of pieces for r1 equals the sum for r2 on |j| <= 5k for k <= k_max."""
    a = pieces_for(r1)
    b = pieces_for(r2)
    for k in range(1, k_max + 1):
        for j in range(-5 * k, 5 * k + 1):
            if sum_pieces(a, (j,), k) != sum_pieces(b, (j,), k):
                return False
    return True
