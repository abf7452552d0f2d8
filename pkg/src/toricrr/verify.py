"""Verification suites shared by the command line and the acceptance tests.

Every suite returns a report dict with ``suite``, ``passed``,
``first_failure`` and a list of ``cases``.
"""
from __future__ import annotations

import itertools
from fractions import Fraction

from .algebra import MultiPoly, default_variables, monomials, rational_to_json
from .asymptotics import riemann_roch_number, verify_asymptotic_order, verify_exact
from .characters import p1p1_multiplicity, paradan_pieces_p1p1, sum_pieces, wall_independence_check
from .dh import dh_moment_oracle, pair_exact
from .models import COMPACT_CORPUS, ModelSpec, build_theta_model, corpus_model, multiplicity_of, routes, default_d
from .partition import VectorList, continuity_check, kostant_count, t_piecewise
from .testfunctions import TestFunction

A2 = ((1, 0), (0, 1), (1, 1))


def _report(suite, cases):
    failed = [c["name"] for c in cases if not c["passed"]]
    return {"suite": suite, "passed": not failed, "first_failure": failed[0] if failed else None,
            "cases": cases}


def monomial_list(rank: int, max_degree: int = 3) -> list[MultiPoly]:
    vs = default_variables(rank)
    out = []
    for deg in range(max_degree + 1):
        for e in monomials(rank, deg):
            out.append(MultiPoly(vs, {e: 1}))
    return out


def suite_exact(specs: list[ModelSpec] | None = None, k_range=range(1, 11), max_degree: int = 3,
                csv_rows: list | None = None) -> dict:
    specs = specs if specs is not None else [corpus_model(n) for n in COMPACT_CORPUS]
    cases = []
    for spec in specs:
        model = build_theta_model(spec)
        for p in monomial_list(model.rank, max_degree):
            rep = verify_exact(model, p, k_range)
            if csv_rows is not None:
                csv_rows += [(spec.name, str(p), k, str(a), str(b), str(a - b)) for k, a, b in rep.rows]
            cases.append({"name": f"{spec.name}:{p}", "passed": rep.passed, "first_failure_k": rep.first_failure,
                          "pairings": [str(c) for c in rep.pairings]})
    return _report("exact", cases)


def suite_rr(specs=None) -> dict:
    pairs = [(corpus_model("p1p1"), 1, 9), (corpus_model("square"), 2, 9), (corpus_model("simplex2"), 3, 10)]
    if specs is not None:
        pairs = [(s, k, None) for s in specs for k in range(1, 6)]
    cases = []
    for spec, k, expected in pairs:
        try:
            count, dh = riemann_roch_number(build_theta_model(spec), k)
            ok = expected is None or count == expected
            cases.append({"name": f"{spec.name}:k={k}", "passed": ok, "count": count, "dh_side": str(dh)})
        except AssertionError as e:
            cases.append({"name": f"{spec.name}:k={k}", "passed": False, "error": str(e)})
    return _report("rr", cases)


# (model, gaussian center, width, N); Gaussians have no beyond-all-orders tail at small k
ASYMPTOTIC_CASES = (
    ("halfline", (0.3,), 0.5, 2),
    ("p1p1", (0.5,), 1.0, 1),
    ("interval01", (0.5,), 1.0, 2),
)


def suite_asymptotic(specs=None, k_list=(8, 16, 32, 64), csv_rows: list | None = None) -> dict:
    cases = []
    plan = [(corpus_model(n), c, r, N) for n, c, r, N in ASYMPTOTIC_CASES]
    if specs is not None:
        plan = [(s, (0.3,) * build_theta_model(s).rank, 0.5, 1) for s in specs]
    for spec, center, radius, N in plan:
        model = build_theta_model(spec)
        f = TestFunction.gaussian(center, radius)
        rep = verify_asymptotic_order(model, f, N, k_list)
        if csv_rows is not None:
            csv_rows += [(spec.name, f.label, k, a, b, e) for k, a, b, e in rep.rows]
        cases.append({"name": f"{spec.name}:N={N}", "passed": rep.passed, "slope": rep.slope,
                      "bound": rep.bound, "status": rep.status})
    return _report("asymptotic", cases)


def suite_walls(r_pairs=((Fraction(-1, 2), Fraction(-3, 2)), (Fraction(-1, 2), Fraction(1)),
                         (Fraction(-1, 2), Fraction(3)), (Fraction(-1, 2), Fraction(-5))), k_max: int = 4) -> dict:
    m = p1p1_multiplicity()
    cases = []
    pieces = paradan_pieces_p1p1(Fraction(-1, 2))
    ok = all(sum_pieces(pieces, (j,), k) == m((j,), k)
             for k in range(1, k_max + 1) for j in range(-5 * k, 5 * k + 1))
    cases.append({"name": "pieces sum to multiplicity", "passed": ok})
    for r1, r2 in r_pairs:
        cases.append({"name": f"r={r1} vs r={r2}", "passed": wall_independence_check(r1, r2, k_max)})
    return _report("walls", cases)


def suite_continuity(delta=A2, grid: int = 5, directions=((2, 1), (1, 2))) -> dict:
    dl = VectorList.of(delta)
    cx = t_piecewise(dl)
    cases = []
    for lam in itertools.product(range(grid + 1), repeat=dl.rank):
        vals = []
        ok = True
        for eps in directions[:2] if dl.rank == 2 else ((1,), (2,)):
            good, k, t = continuity_check(dl, lam, eps, cx)
            ok = ok and good
            vals.append(str(t))
        ok = ok and len(set(vals)) == 1
        if tuple(dl.vectors) == tuple(sorted(A2)):
            ok = ok and kostant_count(dl, lam) == min(lam) + 1
        cases.append({"name": f"lambda={list(lam)}", "passed": ok, "K": kostant_count(dl, lam), "limits": vals})
    return _report("continuity", cases)


def suite_routes(specs=None, n_max: int = 4, max_degree: int = 3) -> dict:
    """All structural routes and the moment oracle give the same <DH_n, x^a>."""
    specs = specs if specs is not None else [corpus_model(n) for n in COMPACT_CORPUS]
    cases = []
    for spec in specs:
        rs = routes(spec)
        m = multiplicity_of(spec)
        d = default_d(spec)
        g = m.rank
        for p in monomial_list(g, max_degree):
            oracle = dh_moment_oracle(m, p, d, max(p.degree(), 0))
            for n in range(n_max + 1):
                want = oracle[n] if n < len(oracle) else Fraction(0)
                got = {name: pair_exact(fn(n), p) for name, fn in rs.items()}
                ok = all(v == want for v in got.values())
                cases.append({"name": f"{spec.name}:n={n}:{p}", "passed": ok, "oracle": rational_to_json(want),
                              "routes": {k: rational_to_json(v) for k, v in got.items()}})
    return _report("routes", cases)


SUITES = {
    "exact": suite_exact,
    "asymptotic": suite_asymptotic,
    "rr": suite_rr,
    "walls": suite_walls,
    "continuity": suite_continuity,
    "routes": suite_routes,
}
