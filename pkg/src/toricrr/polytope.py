"""Lattice polytopes at desk scale (dimension <= 3).

A polytope is stored by its inequalities <u_j, xi> <= c_j with primitive
integer normals u_j and rational offsets c_j.  Vertices are enumerated as
basic feasible solutions, which is plenty for a dozen facets.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from math import ceil, floor, gcd as _gcd
from typing import Sequence

from .algebra import det, is_integral, primitive, rank, rational_to_json, solve, to_rational

MAX_LATTICE_POINTS = 10 ** 6


class PolytopeError(ValueError):
    pass


class UnboundedPolytope(PolytopeError):
    def __init__(self, msg="polytope unbounded"):
        super().__init__(msg)


class DegeneratePolytope(PolytopeError):
    def __init__(self, msg="polytope is not full-dimensional"):
        super().__init__(msg)


class TooManyPoints(PolytopeError):
    pass


def _dot(u, x):
    return sum(Fraction(a) * b for a, b in zip(u, x))


def _basic_solutions(halfspaces, g):
    """All feasible points where g independent constraints are tight."""
    pts = set()
    for idx in combinations(range(len(halfspaces)), g):
        a = [halfspaces[i][0] for i in idx]
        x = solve(a, [halfspaces[i][1] for i in idx])
        if x is None:
            continue
        if all(_dot(u, x) <= c for u, c in halfspaces):
            pts.add(tuple(x))
    return sorted(pts)


def _recession_nontrivial(normals, g) -> bool:
    """True iff {x : <u_j, x> <= 0 for all j} contains a nonzero vector."""
    if rank(normals) < g:
        return True
    for idx in combinations(range(len(normals)), g - 1):
        sub = [normals[i] for i in idx]
        if rank(sub) < g - 1:
            continue
        r = _kernel_vector(sub, g)
        for s in (1, -1):
            ray = [s * a for a in r]
            if all(_dot(u, ray) <= 0 for u in normals):
                return True
    return False


def _kernel_vector(rows, g):
    """A nonzero vector orthogonal to g-1 independent rows (generalized cross product)."""
    if g == 1:
        return [Fraction(1)]
    out = []
    for i in range(g):
        minor = [[r[j] for j in range(g) if j != i] for r in rows]
        out.append((-1) ** i * det(minor))
    return out


@dataclass(frozen=True)
class VertexCone:
    vertex: tuple[Fraction, ...]
    generators: tuple[tuple[int, ...], ...]

    def determinant(self) -> Fraction:
        return det(self.generators)

    def is_unimodular(self) -> bool:
        return len(self.generators) == len(self.vertex) and abs(self.determinant()) == 1


@dataclass(frozen=True)
class Face:
    active_constraints: frozenset[int]
    dim: int
    vertices: tuple[tuple[Fraction, ...], ...]


@dataclass(frozen=True)
class LatticePolytope:
    dim: int
    halfspaces: tuple[tuple[tuple[int, ...], Fraction], ...]

    def __post_init__(self):
        hs = []
        for u, c in self.halfspaces:
            u = tuple(int(a) for a in u)
            if len(u) != self.dim:
                raise PolytopeError(f"normal {u} does not have dimension {self.dim}")
            c = to_rational(c)
            if all(a == 0 for a in u):
                raise PolytopeError("zero normal")
            p = primitive(u)
            scale = next(a // b for a, b in zip(u, p) if b)
            hs.append((p, c / scale))
        object.__setattr__(self, "halfspaces", tuple(hs))

    # -- constructors -----------------------------------------------------
    @classmethod
    def from_halfspaces(cls, dim: int, halfspaces) -> "LatticePolytope":
        return cls(dim, tuple((tuple(u), to_rational(c)) for u, c in halfspaces))

    @classmethod
    def box(cls, lows: Sequence, highs: Sequence) -> "LatticePolytope":
        g = len(lows)
        hs = []
        for i in range(g):
            e = [0] * g
            e[i] = 1
            hs.append((tuple(e), to_rational(highs[i])))
            hs.append((tuple(-a for a in e), -to_rational(lows[i])))
        return cls(g, tuple(hs))

    @classmethod
    def interval(cls, a, b) -> "LatticePolytope":
        return cls.box([a], [b])

    @classmethod
    def simplex(cls, g: int, scale=1) -> "LatticePolytope":
        hs = []
        for i in range(g):
            e = [0] * g
            e[i] = -1
            hs.append((tuple(e), Fraction(0)))
        hs.append(((1,) * g, to_rational(scale)))
        return cls(g, tuple(hs))

    @classmethod
    def from_vertices(cls, vertices) -> "LatticePolytope":
        pts = sorted({tuple(to_rational(x) for x in v) for v in vertices})
        if not pts:
            raise PolytopeError("no vertices given")
        g = len(pts[0])
        if rank([[a - b for a, b in zip(p, pts[0])] for p in pts[1:]] or [[0] * g]) < g:
            raise DegeneratePolytope()
        facets = set()
        for idx in combinations(range(len(pts)), g):
            base = pts[idx[0]]
            rows = [[a - b for a, b in zip(pts[i], base)] for i in idx[1:]]
            if g > 1 and rank(rows) < g - 1:
                continue
            n = _kernel_vector(rows, g)
            if all(a == 0 for a in n):
                continue
            den = 1
            for a in n:
                den = den * Fraction(a).denominator // _gcd(den, Fraction(a).denominator)
            n = primitive([int(a * den) for a in n])
            c = _dot(n, base)
            vals = [_dot(n, p) for p in pts]
            if all(v <= c for v in vals):
                facets.add((n, c))
            elif all(v >= c for v in vals):
                facets.add((tuple(-a for a in n), -c))
        poly = cls(g, tuple(sorted(facets)))
        if set(poly.vertices) != set(pts):
            raise PolytopeError("vertex list is not in convex position")
        return poly

    # -- geometry ---------------------------------------------------------
    def contains(self, x) -> bool:
        return all(_dot(u, x) <= c for u, c in self.halfspaces)

    @cached_property
    def vertices(self) -> tuple[tuple[Fraction, ...], ...]:
        return tuple(vertices_of(self))

    def is_empty(self) -> bool:
        return not _basic_solutions(self.halfspaces, self.dim) and not _recession_nontrivial(
            [u for u, _ in self.halfspaces], self.dim)

    def tight(self, x) -> list[int]:
        return [j for j, (u, c) in enumerate(self.halfspaces) if _dot(u, x) == c]

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "halfspaces": [[list(u), rational_to_json(c)] for u, c in self.halfspaces],
            "vertices": [[rational_to_json(a) for a in v] for v in self.vertices],
        }


def vertices_of(p: LatticePolytope) -> list[tuple[Fraction, ...]]:
    """All vertices of a bounded full-dimensional polytope (empty list if empty)."""
    normals = [u for u, _ in p.halfspaces]
    if _recession_nontrivial(normals, p.dim):
        raise UnboundedPolytope()
    pts = _basic_solutions(p.halfspaces, p.dim)
    if pts and rank([[a - b for a, b in zip(v, pts[0])] for v in pts[1:]] or [[0] * p.dim]) < p.dim:
        raise DegeneratePolytope()
    return pts


def is_delzant(p: LatticePolytope) -> tuple[bool, str | None]:
    """Simple, integral vertices, unimodular vertex cones; else a witness string."""
    for v in p.vertices:
        if not is_integral(v):
            return False, f"vertex {_fmt(v)} is not a lattice point"
        if len(p.tight(v)) != p.dim:
            return False, f"vertex {_fmt(v)} is not simple"
        cone = tangent_cone(p, v)
        d = cone.determinant()
        if abs(d) != 1:
            gens = ",".join(_fmt(w) for w in cone.generators)
            return False, f"vertex {_fmt(v)}: generators {gens} have |det| = {abs(d)}"
    return True, None


def _fmt(v):
    return "(" + ",".join(str(a) for a in v) + ")"


def dilate(p: LatticePolytope, k) -> LatticePolytope:
    k = to_rational(k)
    if k <= 0:
        raise ValueError("dilation factor must be positive")
    return LatticePolytope(p.dim, tuple((u, c * k) for u, c in p.halfspaces))


def translate(p: LatticePolytope, shift) -> LatticePolytope:
    return LatticePolytope(p.dim, tuple((u, c + _dot(u, shift)) for u, c in p.halfspaces))


def tangent_cone(p: LatticePolytope, v) -> VertexCone:
    v = tuple(to_rational(a) for a in v)
    if v not in set(p.vertices):
        raise PolytopeError(f"{_fmt(v)} is not a vertex")
    tight = p.tight(v)
    if len(tight) != p.dim:
        raise PolytopeError(f"vertex {_fmt(v)} is not simple")
    rows = [p.halfspaces[j][0] for j in tight]
    gens = []
    for i in range(p.dim):
        rhs = [0] * p.dim
        rhs[i] = -1
        w = solve(rows, rhs)
        den = 1
        for a in w:
            den = den * a.denominator // _gcd(den, a.denominator)
        gens.append(primitive([int(a * den) for a in w]))
    return VertexCone(v, tuple(gens))


def lattice_points(p: LatticePolytope, cap: int = MAX_LATTICE_POINTS) -> list[tuple[int, ...]]:
    """Lambda cap P in lexicographic order, by recursive coordinate bounding."""
    if _recession_nontrivial([u for u, _ in p.halfspaces], p.dim):
        raise UnboundedPolytope()
    out: list[tuple[int, ...]] = []
    _enumerate(list(p.halfspaces), p.dim, (), out, cap)
    return out


def _enumerate(hs, g, prefix, out, cap):
    if g == 1:
        lo, hi = None, None
        for (u,), c in hs:
            if u == 0:
                if c < 0:
                    return
                continue
            b = c / u
            if u > 0:
                hi = b if hi is None else min(hi, b)
            else:
                lo = b if lo is None else max(lo, b)
        if lo is None or hi is None:
            raise UnboundedPolytope()
        lo_i, hi_i = ceil(lo), floor(hi)
        if hi_i - lo_i + 1 + len(out) > cap:
            raise TooManyPoints(f"more than {cap} lattice points")
        out.extend(prefix + (x,) for x in range(lo_i, hi_i + 1))
        return
    nonzero = [(u, c) for u, c in hs if any(u)]
    for u, c in hs:
        if not any(u) and c < 0:
            return
    pts = _basic_solutions(nonzero, g)
    if not pts:
        return
    lo = ceil(min(x[0] for x in pts))
    hi = floor(max(x[0] for x in pts))
    for x in range(lo, hi + 1):
        sub = [(u[1:], c - u[0] * x) for u, c in hs]
        _enumerate(sub, g - 1, prefix + (x,), out, cap)


def faces(p: LatticePolytope) -> list[Face]:
    """Nonempty faces (including P itself) of a simple polytope."""
    verts = p.vertices
    tights = {v: frozenset(p.tight(v)) for v in verts}
    seen: dict[frozenset, Face] = {}
    for v in verts:
        t = sorted(tights[v])
        for r in range(len(t) + 1):
            for sub in combinations(t, r):
                s = frozenset(sub)
                vs = tuple(w for w in verts if s <= tights[w])
                key = frozenset(vs)
                if key in seen:
                    continue
                active = frozenset.intersection(*(tights[w] for w in vs))
                normals = [p.halfspaces[j][0] for j in active]
                d = p.dim - (rank(normals) if normals else 0)
                seen[key] = Face(active, d, vs)
    return sorted(seen.values(), key=lambda f: (f.dim, sorted(f.vertices)))


def face_counts(p: LatticePolytope) -> dict[int, int]:
    counts: dict[int, int] = {}
    for f in faces(p):
        counts[f.dim] = counts.get(f.dim, 0) + 1
    return counts


def polytope_from_json(data) -> LatticePolytope:
    """Accepts {"dim", "halfspaces"} and/or {"vertices"}; cross-checks when both given."""
    hpoly = vpoly = None
    if "halfspaces" in data:
        dim = data.get("dim")
        if dim is None:
            dim = len(data["halfspaces"][0][0])
        hpoly = LatticePolytope.from_halfspaces(int(dim), data["halfspaces"])
    if "vertices" in data and data["vertices"] is not None:
        vpoly = LatticePolytope.from_vertices(data["vertices"])
    if hpoly is None and vpoly is None:
        raise PolytopeError("polytope needs 'halfspaces' or 'vertices'")
    if hpoly is not None and vpoly is not None:
        if sorted(hpoly.vertices) != sorted(vpoly.vertices):
            raise PolytopeError("H- and V-representations describe different polytopes")
        return hpoly
    return hpoly if hpoly is not None else vpoly
