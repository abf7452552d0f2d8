"""Graded Todd expansions.

One variable:  y/(1 - e^{-y}) = sum t_n y^n.
Split (torus-weight) case: product over weights of the one-variable series
with y_i = <a_i, X>, graded by total degree in X.
Matrix case: det(A/(e^A - 1)) written in power sums p_m = tr(A^m).

For a diagonal matrix ``diag(a_1, ..., a_d)`` the matrix expansion equals the
split expansion for the *negated* weights ``-a_i``, because
``a/(e^a - 1) = (-a)/(1 - e^{a})``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Sequence

from .algebra import (
    LaurentSeries,
    MultiPoly,
    RationalLinearCombo,
    bernoulli,
    default_variables,
)

MAX_MATRIX_DEGREE = 6
MAX_MATRIX_DIM = 4


@dataclass(frozen=True)
class ToddSeries1D:
    coefficients: tuple[Fraction, ...]

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1

    def __getitem__(self, n: int) -> Fraction:
        return self.coefficients[n]

    def evaluate(self, y):
        return sum(c * y ** n for n, c in enumerate(self.coefficients))


def todd_1d(order: int) -> ToddSeries1D:
    if order < 0:
        raise ValueError("order must be >= 0")
    # y/(1-e^{-y}) = (-y)/(e^{-y}-1): flip the sign of odd Bernoulli terms
    return ToddSeries1D(tuple(Fraction((-1) ** n) * bernoulli(n) / factorial(n) for n in range(order + 1)))


def inv_one_minus_exp(order: int, form: Sequence[int] = (1,)) -> LaurentSeries:
    """1/(1 - e^{q y}) with y = <form, X>, known through q^order.

    1/(1-e^z) = -(1/z) * z/(e^z - 1) = sum_n -B_n/n! z^{n-1}.
    """
    if order < -1:
        raise ValueError("order must be >= -1")
    coeffs = {}
    for n in range(order + 2):
        c = -bernoulli(n) / factorial(n)
        if c:
            coeffs[n - 1] = RationalLinearCombo.monomial(c, tuple(form), n - 1)
    return LaurentSeries(coeffs, order)


@dataclass(frozen=True)
class GradedToddDiagonal:
    weights: tuple[tuple[int, ...], ...]
    components: tuple[MultiPoly, ...]

    def __getitem__(self, n: int) -> MultiPoly:
        return self.components[n]

    def to_json(self) -> dict:
        return {
            "weights": [list(w) for w in self.weights],
            "components": [{"degree": n, "polynomial": c.to_json()} for n, c in enumerate(self.components)],
        }


def graded_todd_diagonal(weights: Sequence[Sequence[int]], n_max: int,
                         variables: Sequence[str] | None = None) -> GradedToddDiagonal:
    """Homogeneous components of prod_i y_i/(1-e^{-y_i}),  y_i = <a_i, X>."""
    if not weights:
        raise ValueError("weights must be nonempty")
    weights = tuple(tuple(int(a) for a in w) for w in weights)
    g = len(weights[0])
    if any(len(w) != g for w in weights):
        raise ValueError("weights must all have the same length")
    vs = tuple(variables) if variables is not None else default_variables(g, "x")
    t = todd_1d(n_max)
    comps = [MultiPoly.constant(1, vs)] + [MultiPoly(vs) for _ in range(n_max)]
    for w in weights:
        y = MultiPoly.linear(w, vs)
        powers = [MultiPoly.constant(1, vs)]
        for _ in range(n_max):
            powers.append(powers[-1] * y)
        factor = [powers[m] * t[m] for m in range(n_max + 1)]
        comps = [sum((comps[i] * factor[n - i] for i in range(n + 1)), MultiPoly(vs)) for n in range(n_max + 1)]
    return GradedToddDiagonal(weights, tuple(comps))


def graded_product(a: Sequence[MultiPoly], b: Sequence[MultiPoly]) -> list[MultiPoly]:
    """Cauchy product of two graded series, truncated to the shorter one."""
    n = min(len(a), len(b))
    return [sum((a[i] * b[k - i] for i in range(k + 1)), MultiPoly(a[0].variables)) for k in range(n)]


@dataclass(frozen=True)
class InvariantToddPolynomial:
    """B_n(A) as a polynomial in power-sum symbols p1, p2, ..."""
    n: int
    dim: int
    expression: MultiPoly

    def evaluate_diagonal(self, entries: Sequence) -> object:
        """Value on diag(entries); entries may be numbers or MultiPoly linear forms."""
        if len(entries) != self.dim:
            raise ValueError(f"expected {self.dim} diagonal entries")
        subs = {}
        for name in self.expression.variables:
            m = int(name[1:])
            subs[name] = sum((e ** m for e in entries[1:]), entries[0] ** m)
        if any(isinstance(v, MultiPoly) for v in subs.values()):
            return self.expression.substitute(subs)
        return self.expression.evaluate(subs)

    def evaluate_matrix(self, a: Sequence[Sequence]) -> Fraction:
        """Value on an explicit rational matrix via traces of its powers."""
        d = len(a)
        if d != self.dim or any(len(r) != d for r in a):
            raise ValueError(f"expected a {self.dim}x{self.dim} matrix")
        a = [[Fraction(x) for x in r] for r in a]
        power = a
        vals = {}
        for m in range(1, max(self.n, 1) + 1):
            vals[f"p{m}"] = sum(power[i][i] for i in range(d))
            power = [[sum(power[i][k] * a[k][j] for k in range(d)) for j in range(d)] for i in range(d)]
        return self.expression.evaluate({v: vals[v] for v in self.expression.variables})


def graded_todd_matrix(n: int, dim: int) -> InvariantToddPolynomial:
    """Degree-n part of det(A/(e^A-1)) = exp(-tr log((e^A-1)/A)).

    log((e^a-1)/a) = a/2 + sum_{m>=2} B_m/(m m!) a^m, so the exponent is
    S = -p1/2 - sum_{m>=2} B_m/(m m!) p_m, weighted by m.
    """
    if not (0 <= n <= MAX_MATRIX_DEGREE):
        raise ValueError(f"n must lie in 0..{MAX_MATRIX_DEGREE}")
    if not (1 <= dim <= MAX_MATRIX_DIM):
        raise ValueError(f"dim must lie in 1..{MAX_MATRIX_DIM}")
    vs = tuple(f"p{m}" for m in range(1, max(n, 1) + 1))
    s = [MultiPoly(vs)]
    for m in range(1, n + 1):
        c = Fraction(-1, 2) if m == 1 else -bernoulli(m) / (m * factorial(m))
        s.append(MultiPoly.var(f"p{m}", vs) * c)
    # E = exp(S) graded: k E_k = sum_{m=1}^k m S_m E_{k-m}
    e = [MultiPoly.constant(1, vs)]
    for k in range(1, n + 1):
        acc = MultiPoly(vs)
        for m in range(1, k + 1):
            acc = acc + s[m] * e[k - m] * m
        e.append(acc / k)
    return InvariantToddPolynomial(n, dim, e[n])
