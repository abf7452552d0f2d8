import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from toricrr.characters import (
    ConeCharacter,
    InfiniteSupport,
    NonGenericParameter,
    brion_decomposition,
    character_eval,
    convolve_multiplicities,
    delta_multiplicity,
    halfline_multiplicity,
    p1p1_multiplicity,
    paradan_pieces_p1p1,
    sum_pieces,
    toric_multiplicity,
    wall_independence_check,
)
from toricrr.polytope import LatticePolytope, dilate, lattice_points


def table(j, k):
    """The four-case multiplicity table, written out independently."""
    if j < -2 * k:
        return 0
    if j <= 0:
        return 2 * k + 1 + j
    if j <= 2 * k:
        return 2 * k + 1 - j
    return 0


# the four pieces for r in (-2, 0), written out from their closed forms
def piece_oracle(beta, j, k):
    if beta == -2:
        return -(2 * k + 1 + j) if j < -2 * k else 0
    if beta == "r":
        return 2 * k + 1 + j
    if beta == 0:
        return -2 * j if j > 0 else 0
    if beta == 2:
        return j - (2 * k + 1) if j > 2 * k else 0
    raise ValueError(beta)


def test_p1p1_table():
    m = p1p1_multiplicity()
    for k in range(1, 6):
        for j in range(-2 * k - 3, 2 * k + 4):
            assert m((j,), k) == table(j, k)
    assert m((0,), 1) == 3 and m((-2,), 1) == 1 and m((3,), 1) == 0


def test_toric_multiplicity():
    m = toric_multiplicity(LatticePolytope.interval(0, 1))
    assert [m((j,), 3) for j in range(-1, 5)] == [0, 1, 1, 1, 1, 0]
    sq = toric_multiplicity(LatticePolytope.box((0, 0), (1, 1)))
    for k in range(1, 4):
        assert sum(v for _, v in sq.table(k)) == (k + 1) ** 2
    seg = toric_multiplicity(LatticePolytope.interval(-2, 0))
    assert seg((-2 * 3,), 3) == 1 and seg((1,), 3) == 0


def test_convolution_gives_the_tent():
    a = toric_multiplicity(LatticePolytope.interval(-2, 0))
    b = toric_multiplicity(LatticePolytope.interval(0, 2))
    tent = convolve_multiplicities(a, b)
    for k in range(1, 6):
        for j in range(-2 * k - 3, 2 * k + 4):
            assert tent((j,), k) == table(j, k)
    assert tent((0,), 4) == 9


def test_convolution_identity_and_commutativity():
    a = toric_multiplicity(LatticePolytope.interval(-1, 2))
    b = toric_multiplicity(LatticePolytope.interval(0, 3))
    c = toric_multiplicity(LatticePolytope.interval(-2, 0))
    one = delta_multiplicity(1)
    ab, ba = convolve_multiplicities(a, b), convolve_multiplicities(b, a)
    abc1 = convolve_multiplicities(ab, c)
    abc2 = convolve_multiplicities(a, convolve_multiplicities(b, c))
    for k in range(1, 4):
        for j in range(-8 * k, 8 * k + 1):
            assert convolve_multiplicities(one, a)((j,), k) == a((j,), k)
            assert ab((j,), k) == ba((j,), k)
            assert abc1((j,), k) == abc2((j,), k)


def test_convolution_refuses_infinite_support():
    with pytest.raises(InfiniteSupport):
        convolve_multiplicities(halfline_multiplicity(0), halfline_multiplicity(0))((1,), 1)


def test_character_eval():
    m = p1p1_multiplicity()
    assert character_eval(m, 1, 1) == 9
    assert character_eval(m, 1, -1) == 1
    assert character_eval(toric_multiplicity(LatticePolytope.interval(0, 1)), 2, 2) == 7
    with pytest.raises(InfiniteSupport):
        character_eval(halfline_multiplicity(0), 1, Fraction(1, 2))


@pytest.mark.parametrize("p", [
    LatticePolytope.interval(0, 1),
    LatticePolytope.interval(-2, 0),
    LatticePolytope.box((0, 0), (1, 1)),
    LatticePolytope.simplex(2),
    LatticePolytope.box((0, -1), (2, 1)),
])
def test_brion_pieces_sum_to_indicator(p):
    pieces = brion_decomposition(p)
    assert len(pieces) == len(p.vertices)
    for k in range(1, 5):
        kp = dilate(p, k)
        inside = set(lattice_points(kp))
        lo = [min(v[i] for v in kp.vertices) - 3 for i in range(p.dim)]
        hi = [max(v[i] for v in kp.vertices) + 3 for i in range(p.dim)]
        grid = [()]
        for a, b in zip(lo, hi):
            grid = [g + (x,) for g in grid for x in range(int(a), int(b) + 1)]
        for lam in grid:
            assert sum_pieces(pieces, lam, k) == (1 if lam in inside else 0), (lam, k)


def test_brion_closed_form_matches_character():
    rng = random.Random(3)
    for p in (LatticePolytope.interval(0, 1), LatticePolytope.interval(-2, 0)):
        m = toric_multiplicity(p)
        pieces = brion_decomposition(p)
        for k in range(1, 5):
            for _ in range(5):
                g = Fraction(rng.randint(2, 9), rng.randint(1, 7)) * rng.choice((1, -1))
                if g == 1:
                    continue
                assert sum(pc.closed_form(k, g) for pc in pieces) == character_eval(m, k, g)


def test_brion_refuses_non_delzant():
    with pytest.raises(NotImplementedError):
        brion_decomposition(LatticePolytope.from_vertices([(0, 0), (2, 0), (0, 1)]))


def test_paradan_pieces_match_closed_forms():
    pieces = paradan_pieces_p1p1(Fraction(-1, 2))
    by_beta = {(-2 if pc.apex[0] == -2 else 0 if pc.apex[0] == 0 else 2 if pc.apex[0] == 2 else "r"): pc
               for pc in pieces}
    assert set(by_beta) == {-2, "r", 0, 2}
    for k in range(1, 5):
        for j in range(-5 * k, 5 * k + 1):
            for beta, pc in by_beta.items():
                assert pc.value((j,), k) == piece_oracle(beta, j, k), (beta, j, k)
            assert sum_pieces(pieces, (j,), k) == table(j, k)
    assert by_beta["r"].value((5,), 1) == 8
    assert by_beta[0].value((5,), 1) == -10
    assert sum_pieces(pieces, (1,), 1) == 2


def test_wall_independence():
    assert wall_independence_check(Fraction(-1, 2), Fraction(-3, 2), 4)
    assert wall_independence_check(Fraction(-1, 2), Fraction(1), 4)
    assert wall_independence_check(Fraction(-1, 2), Fraction(7), 4)
    with pytest.raises(NonGenericParameter, match="non-generic r"):
        paradan_pieces_p1p1(Fraction(0))


def test_wall_independence_negative_control():
    def corrupted(r):
        pieces = paradan_pieces_p1p1(r)
        if r == Fraction(-3, 2):
            pc = pieces[0]
            pieces[0] = ConeCharacter(pc.apex, pc.generators, pc.open_, pc.lines, pc.multiplicity, -pc.sign)
        return pieces
    assert not wall_independence_check(Fraction(-1, 2), Fraction(-3, 2), 2, pieces_for=corrupted)


@given(st.fractions(min_value=-9, max_value=9, max_denominator=5))
@settings(max_examples=25, deadline=None)
def test_any_generic_r_reproduces_the_table(r):
    if r in (-2, 0, 2):
        return
    pieces = paradan_pieces_p1p1(r)
    for k in (1, 3):
        for j in range(-5 * k, 5 * k + 1):
            assert sum_pieces(pieces, (j,), k) == table(j, k)
