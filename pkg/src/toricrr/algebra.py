"""Exact scalars, multivariate polynomials and Laurent series in ``q``.

Everything here is built on :class:`fractions.Fraction`.  Objects are
immutable once constructed; operations always return new objects.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb, factorial, gcd
from typing import Iterable, Mapping, Sequence

Rational = Fraction


# ---------------------------------------------------------------------------
# scalars and small exact linear algebra
# ---------------------------------------------------------------------------

def to_rational(x) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction.

    Floats are rejected so that nothing inexact leaks into exact paths.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot convert {x!r} to an exact rational")


def rational_to_json(x) -> str:
    x = to_rational(x)
    return f"{x.numerator}/{x.denominator}"


def rational_from_json(s) -> Fraction:
    return to_rational(s)


@lru_cache(maxsize=None)
def bernoulli(n: int) -> Fraction:
    """B_n for y/(e^y - 1) = sum B_n y^n / n!, so B_1 = -1/2."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return Fraction(1)
    if n > 1 and n % 2 == 1:
        return Fraction(0)
    # sum_{j<n+1} C(n+1, j) B_j = 0
    acc = sum(comb(n + 1, j) * bernoulli(j) for j in range(n))
    return -acc / (n + 1)


def primitive(v: Sequence[int]) -> tuple[int, ...]:
    """Divide an integer vector by the gcd of its entries."""
    v = tuple(int(a) for a in v)
    g = 0
    for a in v:
        g = gcd(g, a)
    if g == 0:
        raise ValueError("zero vector has no primitive form")
    return tuple(a // g for a in v)


def is_integral(v) -> bool:
    return all(Fraction(a).denominator == 1 for a in v)


def det(rows: Sequence[Sequence]) -> Fraction:
    m = [[Fraction(x) for x in r] for r in rows]
    n = len(m)
    sign = 1
    d = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if m[r][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            m[c], m[p] = m[p], m[c]
            sign = -sign
        d *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            if f:
                for j in range(c, n):
                    m[r][j] -= f * m[c][j]
    return sign * d


def rank(rows: Sequence[Sequence]) -> int:
    m = [[Fraction(x) for x in r] for r in rows]
    if not m:
        return 0
    ncol = len(m[0])
    rk = 0
    for c in range(ncol):
        p = next((r for r in range(rk, len(m)) if m[r][c] != 0), None)
        if p is None:
            continue
        m[rk], m[p] = m[p], m[rk]
        for r in range(len(m)):
            if r != rk and m[r][c] != 0:
                f = m[r][c] / m[rk][c]
                m[r] = [a - f * b for a, b in zip(m[r], m[rk])]
        rk += 1
    return rk


def solve(a: Sequence[Sequence], b: Sequence) -> list[Fraction] | None:
    """Solve the square system a x = b exactly; None if singular."""
    n = len(a)
    m = [[Fraction(x) for x in row] + [Fraction(y)] for row, y in zip(a, b)]
    for c in range(n):
        p = next((r for r in range(c, n) if m[r][c] != 0), None)
        if p is None:
            return None
        m[c], m[p] = m[p], m[c]
        piv = m[c][c]
        m[c] = [x / piv for x in m[c]]
        for r in range(n):
            if r != c and m[r][c] != 0:
                f = m[r][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return [m[r][n] for r in range(n)]


def least_squares_exact(a: Sequence[Sequence], b: Sequence) -> tuple[list[Fraction], list[Fraction]]:
    """Exact solution of an overdetermined system via its first ``ncols`` rows.

    Returns ``(x, residual)``; the residual is ``a x - b`` over *all* rows and
    must be inspected by the caller.
    """
    ncol = len(a[0])
    # pick independent rows greedily
    chosen: list[int] = []
    for i in range(len(a)):
        if rank([a[j] for j in chosen + [i]]) > len(chosen):
            chosen.append(i)
        if len(chosen) == ncol:
            break
    if len(chosen) < ncol:
        raise ValueError("system is rank deficient")
    x = solve([a[i] for i in chosen], [b[i] for i in chosen])
    assert x is not None
    resid = [sum(Fraction(aij) * xj for aij, xj in zip(row, x)) - Fraction(bi) for row, bi in zip(a, b)]
    return x, resid


# ---------------------------------------------------------------------------
# multivariate polynomials
# ---------------------------------------------------------------------------

def _grlex_key(exps: tuple[int, ...]):
    return (sum(exps), exps)


class MultiPoly:
    """Sparse polynomial with Fraction coefficients over named variables.

    Terms are kept in a dict keyed by exponent tuples aligned with
    ``variables``.  Binary operations on polynomials with different variable
    lists work on the union (first operand's order first).
    """

    __slots__ = ("variables", "_terms")

    def __init__(self, variables: Iterable[str], terms: Mapping | None = None):
        variables = tuple(variables)
        if len(set(variables)) != len(variables):
            raise ValueError(f"duplicate variable names in {variables}")
        clean: dict[tuple[int, ...], Fraction] = {}
        for exps, c in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != len(variables) or any(e < 0 for e in exps):
                raise ValueError(f"bad exponent {exps} for variables {variables}")
            c = to_rational(c)
            if c:
                clean[exps] = clean.get(exps, Fraction(0)) + c
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "_terms", {e: c for e, c in clean.items() if c})

    def __setattr__(self, name, value):
        raise AttributeError("MultiPoly is immutable")

    # -- constructors -----------------------------------------------------
    @classmethod
    def constant(cls, c, variables: Iterable[str] = ()) -> "MultiPoly":
        variables = tuple(variables)
        return cls(variables, {(0,) * len(variables): c})

    @classmethod
    def var(cls, name: str, variables: Iterable[str] | None = None) -> "MultiPoly":
        variables = tuple(variables) if variables is not None else (name,)
        i = variables.index(name)
        e = [0] * len(variables)
        e[i] = 1
        return cls(variables, {tuple(e): 1})

    @classmethod
    def linear(cls, coeffs: Sequence, variables: Sequence[str], const=0) -> "MultiPoly":
        n = len(variables)
        terms = {(0,) * n: to_rational(const)}
        for i, c in enumerate(coeffs):
            e = [0] * n
            e[i] = 1
            terms[tuple(e)] = to_rational(c)
        return cls(variables, terms)

    # -- basic queries ----------------------------------------------------
    @property
    def terms(self) -> dict[tuple[int, ...], Fraction]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self._terms), default=-1)

    def degree_in(self, name: str) -> int:
        if name not in self.variables:
            return 0 if self._terms else -1
        i = self.variables.index(name)
        return max((e[i] for e in self._terms), default=-1)

    def sorted_terms(self) -> list[tuple[tuple[int, ...], Fraction]]:
        """Terms in graded-lex order, highest first."""
        return sorted(self._terms.items(), key=lambda t: _grlex_key(t[0]), reverse=True)

    def coefficient(self, exps: Sequence[int]) -> Fraction:
        return self._terms.get(tuple(exps), Fraction(0))

    def constant_term(self) -> Fraction:
        return self._terms.get((0,) * len(self.variables), Fraction(0))

    def homogeneous_part(self, n: int) -> "MultiPoly":
        return MultiPoly(self.variables, {e: c for e, c in self._terms.items() if sum(e) == n})

    def is_homogeneous(self, n: int) -> bool:
        return all(sum(e) == n for e in self._terms)

    def used_variables(self) -> tuple[str, ...]:
        return tuple(v for i, v in enumerate(self.variables) if any(e[i] for e in self._terms))

    # -- variable management ------------------------------------------------
    def with_variables(self, variables: Sequence[str]) -> "MultiPoly":
        """Re-express over ``variables`` (must contain every used variable)."""
        variables = tuple(variables)
        idx = []
        for i, v in enumerate(self.variables):
            if v in variables:
                idx.append((i, variables.index(v)))
            elif any(e[i] for e in self._terms):
                raise ValueError(f"variable {v} is used and cannot be dropped")
        terms = {}
        for e, c in self._terms.items():
            ne = [0] * len(variables)
            for i, j in idx:
                ne[j] = e[i]
            terms[tuple(ne)] = c
        return MultiPoly(variables, terms)

    def rename(self, mapping: Mapping[str, str]) -> "MultiPoly":
        return MultiPoly([mapping.get(v, v) for v in self.variables], self._terms)

    def _align(self, other: "MultiPoly"):
        if self.variables == other.variables:
            return self.variables, self._terms, other._terms
        vs = list(self.variables) + [v for v in other.variables if v not in self.variables]
        return tuple(vs), self.with_variables(vs)._terms, other.with_variables(vs)._terms

    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            return other
        return MultiPoly.constant(to_rational(other), self.variables)

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        vs, a, b = self._align(other)
        out = dict(a)
        for e, c in b.items():
            out[e] = out.get(e, Fraction(0)) + c
        return MultiPoly(vs, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.variables, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            try:
                c = to_rational(other)
            except TypeError:
                return NotImplemented
            return MultiPoly(self.variables, {e: c * v for e, v in self._terms.items()})
        vs, a, b = self._align(other)
        out: dict[tuple[int, ...], Fraction] = {}
        for ea, ca in a.items():
            for eb, cb in b.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                out[e] = out.get(e, Fraction(0)) + ca * cb
        return MultiPoly(vs, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        c = to_rational(other)
        return self * (1 / c)

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are not polynomials")
        result = MultiPoly.constant(1, self.variables)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, MultiPoly):
            try:
                other = self._coerce(other)
            except TypeError:
                return NotImplemented
        _, a, b = self._align(other)
        return a == b

    def __hash__(self):
        return hash(frozenset(
            (tuple((v, k) for v, k in zip(self.variables, e) if k), c) for e, c in self._terms.items()
        ))

    # -- calculus ---------------------------------------------------------
    def diff(self, name: str, order: int = 1) -> "MultiPoly":
        if order < 0:
            raise ValueError("order must be nonnegative")
        if name not in self.variables:
            return self if order == 0 else MultiPoly(self.variables)
        i = self.variables.index(name)
        out = {}
        for e, c in self._terms.items():
            if e[i] >= order:
                ne = list(e)
                ne[i] -= order
                f = 1
                for k in range(order):
                    f *= e[i] - k
                out[tuple(ne)] = c * f
        return MultiPoly(self.variables, out)

    def directional_diff(self, direction: Sequence, order: int = 1) -> "MultiPoly":
        """(direction . grad)^order applied; direction aligned with ``variables``."""
        if len(direction) != len(self.variables):
            raise ValueError("direction length does not match the variable list")
        if all(to_rational(a) == 0 for a in direction):
            raise ValueError("direction must be nonzero")
        p = self
        for _ in range(order):
            acc = MultiPoly(self.variables)
            for name, a in zip(self.variables, direction):
                a = to_rational(a)
                if a:
                    acc = acc + p.diff(name) * a
            p = acc
        return p

    def antiderivative(self, name: str) -> "MultiPoly":
        p = self if name in self.variables else self.with_variables(self.variables + (name,))
        i = p.variables.index(name)
        out = {}
        for e, c in p._terms.items():
            ne = list(e)
            ne[i] += 1
            out[tuple(ne)] = c / ne[i]
        return MultiPoly(p.variables, out)

    def integrate(self, name: str, lo, hi) -> "MultiPoly":
        """Definite integral in ``name``; limits may be scalars or polynomials."""
        a = self.antiderivative(name)
        return a.substitute({name: hi}) - a.substitute({name: lo})

    # -- evaluation and substitution ----------------------------------------
    def substitute(self, mapping: Mapping[str, object]) -> "MultiPoly":
        """Replace variables by polynomials or scalars."""
        keep = [v for v in self.variables if v not in mapping]
        extra: list[str] = []
        for v, s in mapping.items():
            if isinstance(s, MultiPoly):
                extra += [w for w in s.variables if w not in keep and w not in extra]
        vs = tuple(keep + extra)
        subs = {}
        for v, s in mapping.items():
            if v in self.variables:
                subs[v] = s.with_variables(vs) if isinstance(s, MultiPoly) else MultiPoly.constant(s, vs)
        powers: dict[tuple[str, int], MultiPoly] = {}

        def pw(v, k):
            key = (v, k)
            if key not in powers:
                powers[key] = subs[v] ** k
            return powers[key]

        result = MultiPoly(vs)
        for e, c in self._terms.items():
            mono_e = [0] * len(vs)
            term = None
            for v, k in zip(self.variables, e):
                if k == 0:
                    continue
                if v in subs:
                    term = pw(v, k) if term is None else term * pw(v, k)
                else:
                    mono_e[vs.index(v)] = k
            mono = MultiPoly(vs, {tuple(mono_e): c})
            result = result + (mono if term is None else mono * term)
        return result

    def __call__(self, *args, **kwargs):
        return self.evaluate(*args, **kwargs)

    def evaluate(self, point) -> object:
        """Evaluate at a mapping name->value or a sequence aligned with ``variables``.

        Works for Fractions (exact) and floats alike.
        """
        if isinstance(point, Mapping):
            vals = [point.get(v, 0) for v in self.variables]
            for v in self.used_variables():
                if v not in point:
                    raise KeyError(f"no value for variable {v}")
        else:
            vals = list(point)
            if len(vals) != len(self.variables):
                raise ValueError("point length does not match the variable list")
        total = 0
        for e, c in self._terms.items():
            t = c
            for x, k in zip(vals, e):
                if k:
                    t = t * x ** k
            total = total + t
        if isinstance(total, int):
            total = Fraction(total)
        return total

    # -- serialization ----------------------------------------------------
    def to_json(self) -> dict:
        return {
            "variables": list(self.variables),
            "terms": [[list(e), rational_to_json(c)] for e, c in self.sorted_terms()],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "MultiPoly":
        return cls(data["variables"], {tuple(e): rational_from_json(c) for e, c in data["terms"]})

    def __repr__(self):
        if not self._terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(v if k == 1 else f"{v}^{k}" for v, k in zip(self.variables, e) if k)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


def poly_arith(a: MultiPoly, b: MultiPoly, op: str) -> MultiPoly:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


def poly_diff(p: MultiPoly, direction: Sequence, order: int) -> MultiPoly:
    return p.directional_diff(direction, order)


def default_variables(g: int, stem: str = "xi") -> tuple[str, ...]:
    if g == 1:
        return (stem,)
    return tuple(f"{stem}{i + 1}" for i in range(g))


def monomials(g: int, degree: int) -> list[tuple[int, ...]]:
    """All exponent vectors of total degree ``degree`` in ``g`` variables."""
    if g == 1:
        return [(degree,)]
    out = []
    for a in range(degree, -1, -1):
        for rest in monomials(g - 1, degree - a):
            out.append((a,) + rest)
    return out


def multinomial(exps: Sequence[int]) -> int:
    r = factorial(sum(exps))
    for e in exps:
        r //= factorial(e)
    return r


# ---------------------------------------------------------------------------
# rational functions with products of linear forms as denominators
# ---------------------------------------------------------------------------

def _normalize_form(form: Sequence[int]) -> tuple[tuple[int, ...], int]:
    """Split an integer linear form into (primitive form with positive lead, scale)."""
    form = tuple(int(a) for a in form)
    prim = primitive(form)
    scale = form[next(i for i, a in enumerate(form) if a)] // prim[next(i for i, a in enumerate(prim) if a)]
    lead = next(a for a in prim if a)
    if lead < 0:
        prim = tuple(-a for a in prim)
        scale = -scale
    return prim, scale


class RationalLinearCombo:
    """Finite sum  sum_t c_t * prod_j <form_j, X>^{e_j}  with integer e_j (maybe < 0).

    Forms are stored primitive with first nonzero entry positive; scale and
    sign go into the coefficient.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Iterable = ()):
        acc: dict[tuple, Fraction] = {}
        for coef, factors in terms:
            coef = to_rational(coef)
            if not coef:
                continue
            powers: dict[tuple[int, ...], int] = {}
            for form, e in factors:
                e = int(e)
                if e == 0:
                    continue
                prim, scale = _normalize_form(form)
                coef *= Fraction(scale) ** e
                powers[prim] = powers.get(prim, 0) + e
            key = tuple(sorted((f, e) for f, e in powers.items() if e))
            acc[key] = acc.get(key, Fraction(0)) + coef
        object.__setattr__(self, "_terms", {k: c for k, c in acc.items() if c})

    def __setattr__(self, name, value):
        raise AttributeError("RationalLinearCombo is immutable")

    @classmethod
    def constant(cls, c) -> "RationalLinearCombo":
        return cls([(c, ())])

    @classmethod
    def monomial(cls, c, form: Sequence[int], e: int) -> "RationalLinearCombo":
        return cls([(c, ((tuple(form), e),))])

    @property
    def terms(self) -> list[tuple[Fraction, tuple]]:
        return [(c, k) for k, c in sorted(self._terms.items())]

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def _coerce(self, other):
        if isinstance(other, RationalLinearCombo):
            return other
        return RationalLinearCombo.constant(to_rational(other))

    def __add__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return RationalLinearCombo([(c, k) for k, c in self._terms.items()]
                                   + [(c, k) for k, c in other._terms.items()])

    __radd__ = __add__

    def __neg__(self):
        return RationalLinearCombo([(-c, k) for k, c in self._terms.items()])

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, RationalLinearCombo):
            try:
                c = to_rational(other)
            except TypeError:
                return NotImplemented
            return RationalLinearCombo([(c * v, k) for k, v in self._terms.items()])
        out = []
        for ka, ca in self._terms.items():
            for kb, cb in other._terms.items():
                out.append((ca * cb, ka + kb))
        return RationalLinearCombo(out)

    __rmul__ = __mul__

    def inverse(self) -> "RationalLinearCombo":
        if len(self._terms) != 1:
            raise ZeroDivisionError("only single-term combinations are invertible here")
        (k, c), = self._terms.items()
        return RationalLinearCombo([(1 / c, tuple((f, -e) for f, e in k))])

    def __eq__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def evaluate(self, x: Sequence) -> Fraction:
        total = Fraction(0)
        for k, c in self._terms.items():
            t = c
            for form, e in k:
                val = sum(Fraction(a) * Fraction(b) for a, b in zip(form, x))
                if val == 0 and e < 0:
                    raise ZeroDivisionError(f"pole: <{form}, X> = 0")
                t *= val ** e
            total += t
        return total

    def to_json(self) -> list:
        return [[rational_to_json(c), [[list(f), e] for f, e in k]] for c, k in self.terms]

    @classmethod
    def from_json(cls, data) -> "RationalLinearCombo":
        return cls([(rational_from_json(c), [(tuple(f), e) for f, e in fs]) for c, fs in data])

    def __repr__(self):
        if not self._terms:
            return "0"
        parts = []
        for c, k in self.terms:
            fs = "*".join(f"<{','.join(map(str, f))}>^{e}" for f, e in k)
            parts.append(f"{c}" + (f"*{fs}" if fs else ""))
        return " + ".join(parts)


# ---------------------------------------------------------------------------
# Laurent series in q
# ---------------------------------------------------------------------------

def _coeff_zero(c) -> bool:
    return (not c) if not isinstance(c, RationalLinearCombo) else c.is_zero()


def _coeff_inverse(c):
    if isinstance(c, RationalLinearCombo):
        return c.inverse()
    return 1 / to_rational(c)


class LaurentSeries:
    """Truncated Laurent series sum_{e <= truncation_order} c_e q^e.

    Coefficients are Fractions or :class:`RationalLinearCombo` values.  The
    series is known exactly for exponents ``<= truncation_order``.
    """

    __slots__ = ("variable", "_coeffs", "truncation_order")

    def __init__(self, coeffs: Mapping[int, object], truncation_order: int, variable: str = "q"):
        clean = {}
        for e, c in coeffs.items():
            e = int(e)
            if e > truncation_order:
                continue
            if not isinstance(c, RationalLinearCombo):
                c = to_rational(c)
            if not _coeff_zero(c):
                clean[e] = c
        object.__setattr__(self, "variable", variable)
        object.__setattr__(self, "_coeffs", clean)
        object.__setattr__(self, "truncation_order", int(truncation_order))

    def __setattr__(self, name, value):
        raise AttributeError("LaurentSeries is immutable")

    @property
    def coefficients(self) -> dict[int, object]:
        return dict(sorted(self._coeffs.items()))

    def coefficient(self, e: int):
        if e > self.truncation_order:
            raise ValueError(f"q^{e} is beyond the truncation order {self.truncation_order}")
        return self._coeffs.get(e, Fraction(0))

    def valuation(self) -> int | None:
        return min(self._coeffs, default=None)

    def __add__(self, other: "LaurentSeries") -> "LaurentSeries":
        t = min(self.truncation_order, other.truncation_order)
        out = dict(self._coeffs)
        for e, c in other._coeffs.items():
            out[e] = out[e] + c if e in out else c
        return LaurentSeries(out, t, self.variable)

    def __neg__(self):
        return LaurentSeries({e: -c for e, c in self._coeffs.items()}, self.truncation_order, self.variable)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, LaurentSeries):
            return laurent_mul(self, other)
        return LaurentSeries({e: c * other for e, c in self._coeffs.items()}, self.truncation_order, self.variable)

    __rmul__ = __mul__

    def shift(self, k: int) -> "LaurentSeries":
        """Multiply by q^k."""
        return LaurentSeries({e + k: c for e, c in self._coeffs.items()}, self.truncation_order + k, self.variable)

    def __eq__(self, other):
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        t = min(self.truncation_order, other.truncation_order)
        a = {e: c for e, c in self._coeffs.items() if e <= t}
        b = {e: c for e, c in other._coeffs.items() if e <= t}
        return a == b

    def __hash__(self):
        return hash((self.truncation_order, frozenset(self._coeffs.items())))

    def to_json(self) -> dict:
        def cj(c):
            return c.to_json() if isinstance(c, RationalLinearCombo) else rational_to_json(c)
        return {
            "variable": self.variable,
            "truncation_order": self.truncation_order,
            "coefficients": [[e, cj(c)] for e, c in sorted(self._coeffs.items())],
        }

    def __repr__(self):
        body = " + ".join(f"({c})*{self.variable}^{e}" for e, c in sorted(self._coeffs.items()))
        return f"{body or '0'} + O({self.variable}^{self.truncation_order + 1})"


def laurent_mul(a: LaurentSeries, b: LaurentSeries) -> LaurentSeries:
    """Cauchy product; the result is exact up to min(Ta + vb, Tb + va)."""
    if a.variable != b.variable:
        raise ValueError("series in different variables")
    va = a.valuation()
    vb = b.valuation()
    if va is None:
        return LaurentSeries({}, a.truncation_order + (vb if vb is not None else 0), a.variable)
    if vb is None:
        return LaurentSeries({}, b.truncation_order + va, a.variable)
    t = min(a.truncation_order + vb, b.truncation_order + va)
    out: dict[int, object] = {}
    for ea, ca in a._coeffs.items():
        for eb, cb in b._coeffs.items():
            e = ea + eb
            if e > t:
                continue
            p = ca * cb
            out[e] = out[e] + p if e in out else p
    return LaurentSeries(out, t, a.variable)


def laurent_inverse(a: LaurentSeries) -> LaurentSeries:
    """1/a for a series whose leading coefficient is invertible."""
    v = a.valuation()
    if v is None:
        raise ZeroDivisionError("zero series")
    lead_inv = _coeff_inverse(a._coeffs[v])
    length = a.truncation_order - v  # relative precision
    # normalized u = a q^{-v} / lead = 1 + sum_{i>=1} u_i q^i
    u = {e - v: c * lead_inv for e, c in a._coeffs.items()}
    inv: dict[int, object] = {0: Fraction(1)}
    for n in range(1, length + 1):
        acc = None
        for i in range(1, n + 1):
            if i in u and (n - i) in inv:
                p = u[i] * inv[n - i]
                acc = p if acc is None else acc + p
        if acc is not None and not _coeff_zero(acc):
            inv[n] = -acc
    return LaurentSeries({e - v: c * lead_inv for e, c in inv.items()}, length - v, a.variable)
