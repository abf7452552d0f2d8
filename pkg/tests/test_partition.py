import itertools
import random
from fractions import Fraction

import numpy as np
import pytest
from scipy import integrate

from toricrr.dh import laplace_series, canonical_parts, pair
from toricrr.partition import (
    NonGenericDirection,
    PartitionError,
    VectorList,
    continuity_check,
    d_series,
    kostant_count,
    t_piecewise,
    u_series,
)

A2 = VectorList.of([(1, 0), (0, 1), (1, 1)])
ONE = VectorList.of([(1,)])
TWO = VectorList.of([(1,), (1,)])


def brute_counts(vectors, bound=10):
    """Histogram of all nonnegative combinations with coefficients <= bound."""
    out = {}
    for coeffs in itertools.product(range(bound + 1), repeat=len(vectors)):
        lam = tuple(sum(c * v[i] for c, v in zip(coeffs, vectors)) for i in range(len(vectors[0])))
        out[lam] = out.get(lam, 0) + 1
    return out


def table_counts(vectors, size):
    """K on [0, size)^2 by the knapsack recursion T[lam] += T[lam - a]."""
    t = np.zeros((size, size), dtype=object)
    t[0, 0] = 1
    for a in vectors:
        for i in range(size):
            for j in range(size):
                if i >= a[0] and j >= a[1]:
                    t[i, j] += t[i - a[0], j - a[1]]
    return t


def test_count_examples():
    assert kostant_count(ONE, (5,)) == 1
    assert kostant_count(A2, (3, 2)) == 3
    assert kostant_count(VectorList.of([(1, 0), (0, 1)]), (-1, 0)) == 0


def test_count_matches_brute_force():
    lists = [[(1, 0), (0, 1), (1, 1)], [(1, 0), (0, 1), (1, 1), (1, 2)], [(1, 0), (1, 1), (1, -1)]]
    for vs in lists:
        dl = VectorList.of(vs, check_unimodular=False)
        hist = brute_counts(vs)
        for lam in itertools.product(range(-2, 6), range(-3, 6)):
            assert kostant_count(dl, lam) == hist.get(lam, 0), (vs, lam)


def test_count_is_order_independent():
    vs = [(1, 0), (0, 1), (1, 1), (1, 2)]
    base = VectorList.of(vs, check_unimodular=False)
    for perm in itertools.permutations(vs):
        dl = VectorList(tuple(perm), base.gamma)
        for lam in itertools.product(range(5), repeat=2):
            assert kostant_count(dl, lam) == kostant_count(base, lam)


def test_a2_count_is_min_plus_one():
    for lam in itertools.product(range(6), repeat=2):
        assert kostant_count(A2, lam) == min(lam) + 1


def test_generating_function_truncation():
    rng = random.Random(11)
    N = 8
    vecs = A2.vectors
    for _ in range(4):
        g = (Fraction(rng.randint(1, 5), 7), Fraction(rng.randint(1, 5), 9))
        # product of truncated geometric series, restricted to the box [0, N]^2
        poly = {(0, 0): 1}
        for a in vecs:
            new = {}
            for lam, c in poly.items():
                for n in range(N + 1):
                    mu = (lam[0] + n * a[0], lam[1] + n * a[1])
                    if mu[0] <= N and mu[1] <= N:
                        new[mu] = new.get(mu, 0) + c
            poly = new
        lhs = sum(kostant_count(A2, lam) * g[0] ** lam[0] * g[1] ** lam[1]
                  for lam in itertools.product(range(N + 1), repeat=2))
        rhs = sum(c * g[0] ** lam[0] * g[1] ** lam[1] for lam, c in poly.items())
        assert lhs == rhs
        full = 1 / ((1 - g[0]) * (1 - g[1]) * (1 - g[0] * g[1]))
        assert 0 < full - lhs < full * (max(g) ** (N + 1)) * 3


def test_invalid_lists():
    with pytest.raises(PartitionError, match="not pointed"):
        VectorList.of([(1,), (-1,)])
    with pytest.raises(PartitionError, match="unimodular"):
        VectorList.of([(1, 0), (1, 2)])
    with pytest.raises(PartitionError):
        VectorList.of([(0, 0)])


def test_d_series_one_vector():
    d0, d1, d2 = d_series(ONE, 2)
    segs, pts = canonical_parts(d0)
    assert segs == [(0, None, segs[0][2])] and segs[0][2].constant_term() == 1 and not pts
    segs, pts = canonical_parts(d1)
    assert not segs and pts == {(Fraction(0), 0): Fraction(1, 2)}


def test_d_series_two_equal_vectors():
    segs, pts = canonical_parts(d_series(TWO, 0)[0])
    assert len(segs) == 1 and segs[0][0] == 0 and segs[0][1] is None
    assert str(segs[0][2]) == "x"


def test_t_piecewise_rank_one():
    assert t_piecewise(ONE).value((Fraction(1, 3),)) == 1
    cx = t_piecewise(TWO)
    for x in (Fraction(1, 2), Fraction(3), Fraction(7, 2)):
        assert cx.value((x,)) == x + 1
    assert cx.value((Fraction(-1),)) == 0


def test_t_piecewise_a2():
    cx = t_piecewise(A2)
    pts = {(Fraction(1), Fraction(3)): 2, (Fraction(5, 2), Fraction(1, 2)): Fraction(3, 2)}
    for p, want in pts.items():
        assert cx.value(p) == want
    # D_0 part is min(xi1, xi2) in the quadrant
    for c in cx.chambers:
        if c.signs == cx.signs_at((1, 3)):
            assert c.parts[0].evaluate([Fraction(1), Fraction(3)]) == 1
    assert cx.value((Fraction(-1), Fraction(2))) == 0


def test_continuity_examples():
    assert continuity_check(TWO, (0,), (1,)) == (True, 1, 1)
    ok, k, t = continuity_check(A2, (2, 2), (2, 1))
    assert ok and k == 3
    ok, k, t = continuity_check(A2, (3, 1), (1, 2))
    assert ok and k == 2
    with pytest.raises(NonGenericDirection, match="non-generic direction"):
        continuity_check(A2, (2, 2), (1, 1))


def test_continuity_grid_two_directions():
    cx = t_piecewise(A2)
    for lam in itertools.product(range(6), repeat=2):
        a = continuity_check(A2, lam, (2, 1), cx)
        b = continuity_check(A2, lam, (1, 2), cx)
        assert a[0] and b[0] and a[2] == b[2] == min(lam) + 1


def test_continuity_for_a_longer_list():
    dl = VectorList.of([(1, 0), (0, 1), (1, 1), (1, 1)])
    cx = t_piecewise(dl)
    for lam in itertools.product(range(5), repeat=2):
        for eps in ((3, 1), (1, 3)):
            ok, k, t = continuity_check(dl, lam, eps, cx)
            assert ok, (lam, eps, k, t)


@pytest.mark.parametrize("delta", [A2, TWO, VectorList.of([(1, 0), (0, 1), (1, 1), (1, 1)])])
def test_laplace_transform_of_d_n_is_the_laurent_coefficient(delta):
    n_max = 4
    us = u_series(delta, n_max)
    dirs = [(-1,), (-3,)] if delta.rank == 1 else [(-1, -2), (-3, -1), (-2, -5)]
    for n, d in enumerate(d_series(delta, n_max)):
        e = n - delta.size
        for x in dirs:
            ser = laplace_series(d, x, e + 1)
            coeff = us.coefficient(e)
            want = coeff.evaluate(x) if coeff else Fraction(0)
            assert ser.coefficient(e) == want
            assert all(c == 0 for k, c in ser.coefficients.items() if k != e)


def test_bridge_to_the_leading_density():
    # k^{-|Delta|} sum_lambda K(lambda) f(lambda/k) -> int D_0 f
    c, w = 3.0, 0.5
    f = lambda x, y: np.exp(-((x - c) ** 2 + (y - c) ** 2) / w ** 2)
    d0 = t_piecewise(A2, 0)
    dens = lambda x, y: float(d0.value((Fraction(x), Fraction(y)), (2, 1))) if x > 0 and y > 0 else 0.0
    lim, _ = integrate.dblquad(lambda y, x: min(x, y) * f(x, y), c - 6 * w, c + 6 * w, c - 6 * w, c + 6 * w,
                               epsabs=1e-11)
    assert abs(dens(2.0, 3.5) - 2.0) < 1e-15
    k = 64
    lo, hi = int((c - 6 * w) * k), int((c + 6 * w) * k) + 1
    t = table_counts(A2.vectors, hi)
    assert all(t[i, j] == kostant_count(A2, (i, j)) for i, j in ((0, 0), (5, 9), (40, 17), (60, 75)))
    s = sum(int(t[i, j]) * f(i / k, j / k) for i in range(lo, hi) for j in range(lo, hi))
    assert abs(s / k ** 3 - lim) / lim < 0.01


def test_d0_density_is_cone_spline():
    # Delta = {(1),(1)}: D_0 has density xi on xi >= 0
    d0 = d_series(TWO, 0)[0]
    assert pair(d0.__class__(1, ()), 1) == 0
    segs, _ = canonical_parts(d0)
    assert segs[0][2].evaluate([Fraction(5)]) == 5
