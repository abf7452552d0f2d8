"""Test functions for pairing with distributions.

Polynomials pair exactly.  Numeric test functions are sympy expressions with
a compact support box; their pairings use adaptive quadrature and report an
error estimate.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import sympy as sp
from scipy import integrate

from .algebra import MultiPoly, default_variables

QUAD_TOL = 1e-10


class TestFunction:
    """Either ``poly`` (exact) or a smooth sympy expression supported in ``box``."""

    __test__ = False

    def __init__(self, dim: int, poly: MultiPoly | None = None, expr=None, box=None, label: str = ""):
        self.dim = dim
        self.poly = poly
        self.label = label
        self.symbols = sp.symbols(default_variables(dim))
        if self.poly is None:
            if expr is None or box is None:
                raise ValueError("numeric test functions need an expression and a support box")
            self.expr = sp.sympify(expr) if isinstance(expr, str) else expr
            self.box = [(float(a), float(b)) for a, b in box]
            if len(self.box) != dim:
                raise ValueError("support box has the wrong dimension")
        else:
            self.expr = None
            self.box = None
        self._cache = {}

    @classmethod
    def polynomial(cls, p: MultiPoly, dim: int | None = None) -> "TestFunction":
        dim = dim if dim is not None else max(len(p.variables), 1)
        return cls(dim, poly=p.with_variables(default_variables(dim)))

    @classmethod
    def bump(cls, center: Sequence[float], radius: float) -> "TestFunction":
        """Product of exp(-1/(1-u^2)) bumps, u = (xi_i - c_i)/radius."""
        dim = len(center)
        syms = sp.symbols(default_variables(dim))
        syms = syms if isinstance(syms, tuple) else (syms,)
        expr = sp.Integer(1)
        for s, c in zip(syms, center):
            u = (s - sp.nsimplify(c)) / sp.nsimplify(radius)
            expr = expr * sp.exp(-1 / (1 - u ** 2))
        box = [(c - radius, c + radius) for c in center]
        return cls(dim, expr=expr, box=box, label=f"bump({list(center)}, {radius})")

    @classmethod
    def gaussian(cls, center: Sequence[float], width: float, cutoff: float = 8.0) -> "TestFunction":
        """exp(-|xi - c|^2 / width^2) cut off at cutoff*width, where it is below e^{-cutoff^2}."""
        dim = len(center)
        syms = sp.symbols(default_variables(dim))
        syms = syms if isinstance(syms, tuple) else (syms,)
        r2 = sum(((s - sp.nsimplify(c)) / sp.nsimplify(width)) ** 2 for s, c in zip(syms, center))
        box = [(c - cutoff * width, c + cutoff * width) for c in center]
        return cls(dim, expr=sp.exp(-r2), box=box, label=f"gaussian({list(center)}, {width})")

    @property
    def is_polynomial(self) -> bool:
        return self.poly is not None

    def _syms(self):
        return self.symbols if isinstance(self.symbols, tuple) else (self.symbols,)

    def derivative(self, derivs=()):
        """Callable point -> float for the directional derivatives ``derivs`` of f."""
        key = tuple(derivs)
        if key in self._cache:
            return self._cache[key]
        syms = self._syms()
        if self.poly is not None:
            p = self.poly
            for u, o in derivs:
                p = p.directional_diff(u, o)

            def fn(x, p=p):
                return float(p.evaluate([float(v) for v in x]))
        else:
            e = self.expr
            for u, o in derivs:
                for _ in range(o):
                    e = sum((a * sp.diff(e, s) for a, s in zip(u, syms) if a), sp.Integer(0))
            lam = sp.lambdify(syms, e, "math")
            box = self.box

            def fn(x, lam=lam, box=box):
                for v, (lo, hi) in zip(x, box):
                    if not lo < v < hi:
                        return 0.0
                return float(lam(*x))
        self._cache[key] = fn
        return fn

    def __call__(self, *x) -> float:
        return self.derivative(())(x)


def _interval_in_box(base, w, lo, hi, box):
    """t-range [max(lo,..), min(hi,..)] with base + t w inside the box."""
    for b, a, (blo, bhi) in zip(base, w, box):
        if a == 0:
            if not blo <= b <= bhi:
                return None
            continue
        t1, t2 = (blo - b) / a, (bhi - b) / a
        lo, hi = max(lo, min(t1, t2)), min(hi, max(t1, t2))
    return (lo, hi) if lo < hi else None


def pair_numeric(d, f: TestFunction) -> tuple[float, float]:
    """(value, error estimate) of <d, f> by adaptive quadrature, terms with <= 2 edges."""
    from .dh import UnsupportedShape, canonical_1d

    if f.poly is not None:
        raise ValueError("use exact pairing for polynomial test functions")
    if d.dim != f.dim:
        raise ValueError("dimension mismatch")
    if d.dim == 1:
        d = canonical_1d(d)
    total, err = 0.0, 0.0
    box = f.box
    for term in d.terms:
        fd = f.derivative(term.derivatives)
        c = float(term.coeff)
        base = [float(b) for b in term.base]
        if not term.edges:
            total += c * fd(base)
            continue
        edges = term.edges
        if len(edges) > 2:
            raise UnsupportedShape("numeric pairing supports terms with at most two edges")
        dens = [e.density for e in edges]
        ws = [[float(a) for a in e.direction] for e in edges]
        lens = [float("inf") if e.length is None else float(e.length) for e in edges]
        if len(edges) == 1:
            rng = _interval_in_box(base, ws[0], 0.0, lens[0], box)
            if rng is None:
                continue

            def g1(t):
                x = [b + t * a for b, a in zip(base, ws[0])]
                return float(dens[0].evaluate([t])) * fd(x)
            v, e = integrate.quad(g1, rng[0], rng[1], epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=200)
            total += c * v
            err += abs(c) * e
            continue
        # two edges: outer t1 range from the box, inner t2 range per t1
        big = max(abs(x) for iv in box for x in iv) + max(abs(x) for x in base) + 1
        lim1 = min(lens[0], 1e6)
        t1max = lim1 if lens[0] != float("inf") else _ray_bound(base, ws, box, big)
        errs = []

        def inner(t1):
            b1 = [b + t1 * a for b, a in zip(base, ws[0])]
            rng = _interval_in_box(b1, ws[1], 0.0, lens[1], box)
            if rng is None:
                return 0.0

            def g2(t2):
                x = [b + t2 * a for b, a in zip(b1, ws[1])]
                return float(dens[1].evaluate([t2])) * fd(x)
            v, e = integrate.quad(g2, rng[0], rng[1], epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=200)
            errs.append(e)
            return float(dens[0].evaluate([t1])) * v

        v, e = integrate.quad(inner, 0.0, t1max, epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=200)
        total += c * v
        err += abs(c) * (e + max(errs, default=0.0))
    return total, err


def _ray_bound(base, ws, box, big):
    # any t1 beyond which base + t1 w1 + t2 w2 (t2 >= 0) cannot meet the box
    n1 = max(abs(a) for a in ws[0])
    return 4 * big * (1 + max(abs(a) for a in ws[1])) / n1 + 4 * big
