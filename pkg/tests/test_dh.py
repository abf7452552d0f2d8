from fractions import Fraction

import pytest
import sympy as sp

from toricrr.algebra import MultiPoly
from toricrr.characters import p1p1_multiplicity, toric_multiplicity
from toricrr.dh import (
    DivergentPairing,
    FaceDistribution,
    NotQuasiPolynomial,
    UnsupportedShape,
    canonical_parts,
    dh_box,
    dh_convolve,
    dh_delzant,
    dh_halfline,
    dh_interval,
    dh_moment_oracle,
    dh_tensor,
    dh_vertex_cone,
    graded_convolution,
    pair,
    pair_exact,
    pair_regularized,
    point_mass,
    same_distribution_1d,
    segment,
    support_within,
)
from toricrr.characters import MultiplicityFunction
from toricrr.models import corpus_model, routes
from toricrr.polytope import LatticePolytope, VertexCone
from toricrr.testfunctions import TestFunction, pair_numeric

XI = MultiPoly.var("xi")
X1 = MultiPoly.var("xi1", ("xi1", "xi2"))
X2 = MultiPoly.var("xi2", ("xi1", "xi2"))
t = sp.symbols("xi")


def reference_p1p1(n, f):
    """Closed forms of DH_0..DH_3 of the P1xP1 example, applied to a sympy f."""
    if n == 0:
        return sp.integrate((2 + t) * f, (t, -2, 0)) + sp.integrate((2 - t) * f, (t, 0, 2))
    if n == 1:
        return sp.integrate(f, (t, -2, 2))
    if n == 2:
        return sp.Rational(5, 12) * f.subs(t, -2) + sp.Rational(1, 6) * f.subs(t, 0) + sp.Rational(5, 12) * f.subs(t, 2)
    if n == 3:
        df = sp.diff(f, t)
        return -sp.Rational(1, 12) * df.subs(t, -2) + sp.Rational(1, 12) * df.subs(t, 2)
    raise ValueError(n)


def frac(x):
    x = sp.Rational(x)
    return Fraction(int(x.p), int(x.q))


def p1p1_convolution(n):
    a = [dh_interval(-2, 0, i) for i in range(n + 1)]
    b = [dh_interval(0, 2, i) for i in range(n + 1)]
    return graded_convolution(a, b, n)


@pytest.mark.parametrize("n", range(4))
def test_p1p1_convolution_matches_reference_formulas(n):
    d = p1p1_convolution(n)
    for m in range(6):
        assert pair(d, XI ** m) == frac(reference_p1p1(n, t ** m)), (n, m)


def test_p1p1_reference_values():
    assert pair(p1p1_convolution(2), 1) == 1
    assert pair(p1p1_convolution(3), XI ** 2) == Fraction(2, 3)
    assert pair(p1p1_convolution(1), 1) == 4
    # xi^3 is odd and the two derivative masses cancel on it
    assert pair(p1p1_convolution(3), XI ** 3) == 0


def test_p1p1_dh2_structure():
    segs, pts = canonical_parts(p1p1_convolution(2))
    assert not segs
    assert pts == {(Fraction(-2), 0): Fraction(5, 12), (Fraction(0), 0): Fraction(1, 6),
                   (Fraction(2), 0): Fraction(5, 12)}


@pytest.mark.parametrize("n", range(2, 7))
def test_p1p1_regularity(n):
    # beyond n = d - dim G = 1 everything sits on the wall points
    segs, pts = canonical_parts(p1p1_convolution(n))
    assert not segs
    assert {x for x, _ in pts} <= {-2, 0, 2}


def test_interval_terms():
    assert pair(dh_interval(0, 1, 2), XI ** 2) == Fraction(1, 6)
    assert pair(dh_interval(0, 1, 0), XI) == Fraction(1, 2)
    assert pair(dh_interval(3, 5, 1), 1) == 1
    assert pair(dh_interval(0, 1, 4), XI ** 4) == Fraction(-1, 720) * 24
    for m in range(1, 5):
        assert dh_interval(-2, 3, 2 * m + 1).terms == ()


def test_interval_euler_maclaurin_by_brute_force():
    # sum_{j=0}^k (j/k)^2 = k/3 + 1/2 + 1/(6k)
    for k in range(1, 8):
        s = sum(Fraction(j, k) ** 2 for j in range(k + 1))
        rhs = sum(pair(dh_interval(0, 1, n), XI ** 2) * Fraction(k) ** (1 - n) for n in range(4))
        assert s == rhs


def test_halfline_terms():
    assert same_distribution_1d(dh_halfline(0, 1, 1), point_mass(0, Fraction(1, 2)))
    assert pair(dh_halfline(0, 1, 2), XI) == Fraction(-1, 12)
    assert pair(dh_halfline(0, -1, 2), XI) == Fraction(1, 12)
    assert not dh_halfline(0, 1, 0).is_compact


def test_halfline_zero_term_on_compact_function():
    f = TestFunction.gaussian((1.0,), 0.3)
    val, err = pair_numeric(dh_halfline(0, 1, 0), f)
    want = float(sp.Integral(sp.exp(-((t - 1) / sp.Rational(3, 10)) ** 2), (t, 0, sp.oo)).evalf(30))
    assert abs(val - want) < 1e-9


def test_polynomial_pairing_on_unbounded_support_refused():
    with pytest.raises(DivergentPairing, match="divergent pairing"):
        pair(dh_halfline(0, 1, 0), XI)


def test_tensor_and_convolution_examples():
    leb = segment(0, 1)
    assert pair(dh_tensor(leb, leb), 1) == 1
    half = point_mass(0, Fraction(1, 2)) + point_mass(1, Fraction(1, 2))
    assert pair(dh_tensor(half, leb), 1) == 1
    a = dh_interval(-2, 0, 1)
    b = dh_interval(0, 2, 1)
    segs, pts = canonical_parts(dh_convolve(a, b))
    assert not segs
    assert pts == {(Fraction(-2), 0): Fraction(1, 4), (Fraction(0), 0): Fraction(1, 2), (Fraction(2), 0): Fraction(1, 4)}


def test_tensor_pairing_factorizes():
    a, b = dh_interval(0, 2, 2), dh_interval(-1, 1, 0)
    for i in range(3):
        for j in range(3):
            assert pair(dh_tensor(a, b), X1 ** i * X2 ** j) == pair(a, XI ** i) * pair(b, XI ** j)


def test_box_dh2_total_mass():
    assert pair(dh_box((0, 0), (1, 1), 2), 1) == 1


@pytest.mark.parametrize("ab", [(0, 1), (-2, 0), (0, 3)])
def test_vertex_cone_assembly_matches_interval(ab):
    p = LatticePolytope.interval(*ab)
    for n in range(6):
        assert same_distribution_1d(dh_delzant(p, n), dh_interval(*ab, n))
        for m in range(7):
            assert pair(dh_delzant(p, n), XI ** m) == pair(dh_interval(*ab, n), XI ** m)


def test_vertex_cone_examples():
    c1 = VertexCone((Fraction(0),), ((1,),))
    assert same_distribution_1d(dh_vertex_cone(c1, 0), FaceDistribution.from_json(
        {"dim": 1, "terms": dh_halfline(0, 1, 0).to_json()["terms"]}))
    assert same_distribution_1d(dh_vertex_cone(c1, 1), point_mass(0, Fraction(1, 2)))
    quad = dh_vertex_cone(VertexCone((Fraction(0), Fraction(0)), ((1, 0), (0, 1))), 0)
    assert len(quad.terms) == 1 and len(quad.terms[0].edges) == 2
    f = TestFunction.gaussian((1.0, 1.0), 0.2)
    val, _ = pair_numeric(quad, f)
    assert abs(val - 0.2 ** 2 * 3.141592653589793) < 1e-9
    with pytest.raises(UnsupportedShape):
        dh_vertex_cone(VertexCone((Fraction(0), Fraction(0)), ((2, 1), (0, 1))), 0)


def test_square_routes_agree():
    sq = LatticePolytope.box((0, 0), (1, 1))
    for n in range(4):
        a, b = dh_delzant(sq, n), dh_box((0, 0), (1, 1), n)
        for i in range(4):
            for j in range(4 - i):
                p = X1 ** i * X2 ** j
                assert pair_exact(a, p) == pair(b, p)
    assert pair(dh_box((0, 0), (1, 1), 0), 1) == 1


def test_oracle_examples():
    m = p1p1_multiplicity()
    assert dh_moment_oracle(m, MultiPoly.constant(1, ("xi",)), 2) == [4, 4, 1]
    assert dh_moment_oracle(m, XI ** 2, 2) == [Fraction(8, 3), Fraction(16, 3), Fraction(10, 3), Fraction(2, 3), 0]
    sq = toric_multiplicity(LatticePolytope.box((0, 0), (1, 1)))
    assert dh_moment_oracle(sq, MultiPoly.constant(1, ("xi1", "xi2")), 2) == [1, 2, 1]


def test_oracle_rejects_wrong_growth():
    # k^3 points: not a polynomial of the stated degree in k
    bad = MultiplicityFunction(1, lambda lam, k: 1 if 0 <= lam[0] <= k ** 2 else 0,
                               lambda k: [(j,) for j in range(k ** 2 + 1)])
    with pytest.raises(NotQuasiPolynomial):
        dh_moment_oracle(bad, MultiPoly.constant(1, ("xi",)), 1)


@pytest.mark.parametrize("name", ["interval01", "interval-20", "square", "simplex2", "p1p1"])
def test_all_routes_against_oracle(name):
    spec = corpus_model(name)
    from toricrr.models import default_d, multiplicity_of
    m = multiplicity_of(spec)
    vs = ("xi",) if m.rank == 1 else ("xi1", "xi2")
    mons = [MultiPoly(vs, {e: 1}) for e in ([(i,) for i in range(4)] if m.rank == 1 else
                                               [(i, j) for i in range(4) for j in range(4 - i)])]
    for p in mons:
        oracle = dh_moment_oracle(m, p, default_d(spec))
        for n in range(5):
            want = oracle[n] if n < len(oracle) else 0
            for route, fn in routes(spec).items():
                assert pair_exact(fn(n), p) == want, (name, route, n, p)


@pytest.mark.parametrize("name", ["interval01", "interval-20", "square", "p1p1"])
def test_structural_support(name):
    spec = corpus_model(name)
    p = LatticePolytope.interval(-2, 2) if name == "p1p1" else \
        __import__("toricrr.polytope", fromlist=["polytope_from_json"]).polytope_from_json(spec.doc)
    for route, fn in routes(spec).items():
        if route == "vertex-cone" and p.dim == 2:
            continue
        for n in range(5):
            assert support_within(fn(n), p), (name, route, n)


def test_vertex_cone_support_is_inside_polytope_numerically():
    # individual cone terms are unbounded; their sum vanishes away from the polytope
    for p in (LatticePolytope.box((0, 0), (1, 1)), LatticePolytope.simplex(2)):
        for n in range(3):
            d = dh_delzant(p, n)
            for c in ((1.8, 0.5), (-0.8, 0.5), (0.5, 1.8), (1.5, 1.5)):
                val, _ = pair_numeric(d, TestFunction.gaussian(c, 0.08, cutoff=6))
                assert abs(val) < 1e-8, (n, c, val)


def test_regularized_pairing_matches_compact_pairing():
    d = dh_interval(0, 3, 0)
    for m in range(5):
        assert pair_regularized(d, XI ** m) == pair(d, XI ** m)


def test_numeric_pairing_agrees_with_exact_on_polynomial_like_functions():
    # e^{xi} on [0, 1]: Lebesgue gives e - 1
    f = TestFunction(1, expr="exp(xi)", box=[(-0.5, 1.5)])
    val, err = pair_numeric(dh_interval(0, 1, 0), f)
    assert abs(val - (2.718281828459045 - 1)) < 1e-10 and err < 1e-8
    val, _ = pair_numeric(dh_interval(0, 1, 2), f)
    assert abs(val - (2.718281828459045 - 1) / 12) < 1e-12


def test_json_round_trip():
    d = p1p1_convolution(3)
    assert FaceDistribution.from_json(d.to_json()) == d
