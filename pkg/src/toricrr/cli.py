"""Command line entry point ``toricrr``.

Exit codes: 0 pass, 1 assertion failure, 2 input error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

import jsonschema
import sympy as sp

from .algebra import MultiPoly, default_variables, rational_to_json
from .characters import character_eval
from .dh import DivergentPairing, UnsupportedShape, pair_exact
from .models import ModelError, build_theta_model, load_model, load_schema, routes
from .partition import PartitionError, VectorList, kostant_count, t_piecewise
from .polytope import PolytopeError
from .testfunctions import TestFunction, pair_numeric
from .todd import graded_todd_diagonal, graded_todd_matrix
from .verify import SUITES

EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(ValueError):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _check(obj, schema: str) -> None:
    jsonschema.validate(obj, load_schema(schema))


def _window(spec, text, rank):
    raw = text if text is not None else spec.doc.get("window")
    if raw is None:
        return None
    vals = [float(x) for x in raw.split(",")] if isinstance(raw, str) else [float(x) for x in raw]
    if len(vals) != 2 * rank:
        raise InputError(f"window needs {2 * rank} numbers")
    return [(vals[2 * i], vals[2 * i + 1]) for i in range(rank)]


def _parse_vector(text: str) -> list[int]:
    try:
        v = json.loads(text) if text.strip().startswith("[") else [int(x) for x in text.split(",")]
        return [int(x) for x in v]
    except (ValueError, TypeError):
        raise InputError(f"cannot parse integer vector {text!r}") from None


def parse_test_function(text: str, rank: int, window=None) -> TestFunction:
    """A file (polynomial JSON or {"expression", "box"}) or an expression in xi / xi1, xi2."""
    vs = default_variables(rank)
    p = Path(text)
    if p.exists():
        doc = json.loads(p.read_text())
        if "terms" in doc:
            _check(doc, "polynomial.schema.json")
            return TestFunction.polynomial(MultiPoly.from_json(doc).with_variables(vs), rank)
        if "expression" in doc:
            return parse_test_function(doc["expression"], rank, doc.get("box", window))
        raise InputError(f"{p}: expected a polynomial or an expression document")
    syms = sp.symbols(vs)
    syms = syms if isinstance(syms, tuple) else (syms,)
    try:
        expr = sp.sympify(text, locals={v: s for v, s in zip(vs, syms)}, rational=True)
    except (sp.SympifyError, SyntaxError, TypeError):
        raise InputError(f"cannot parse test function {text!r}") from None
    if expr.free_symbols - set(syms):
        raise InputError(f"test function may only use {', '.join(vs)}")
    if expr.is_polynomial(*syms):
        poly = sp.Poly(expr, *syms)
        terms = {}
        for mon, c in poly.terms():
            c = sp.Rational(c)
            terms[tuple(mon)] = Fraction(int(c.p), int(c.q))
        return TestFunction.polynomial(MultiPoly(vs, terms), rank)
    if window is None:
        raise InputError("numeric test functions need a support box (--window)")
    return TestFunction(rank, expr=expr, box=window, label=text)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_enumerate(args) -> int:
    spec = load_model(args.model)
    model = build_theta_model(spec)
    box = _window(spec, args.window, model.rank)
    rows = model.multiplicity.table(args.k, box if not model.is_compact else None)
    if box is not None and model.is_compact:
        rows = [(lam, m) for lam, m in rows if all(lo * args.k <= x <= hi * args.k for x, (lo, hi) in zip(lam, box))]
    rows = sorted(rows)
    if args.format == "json":
        _emit(_dump({"model": spec.name, "k": args.k,
                     "points": [{"lambda": list(lam), "multiplicity": m} for lam, m in rows]}), args.out)
        return EXIT_PASS
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["j" if model.rank == 1 else f"l{i + 1}" for i in range(model.rank)] + ["m"])
    for lam, m in rows:
        w.writerow(list(lam) + [m])
    _emit(buf.getvalue(), args.out)
    return EXIT_PASS


def cmd_character(args) -> int:
    spec = load_model(args.model)
    model = build_theta_model(spec)
    g = [Fraction(x) for x in args.g.split(",")]
    val = character_eval(model.multiplicity, args.k, g if model.rank > 1 else g[0])
    _emit(_dump({"model": spec.name, "k": args.k, "g": [str(x) for x in g], "value": rational_to_json(val)}),
          args.out)
    return EXIT_PASS


def cmd_dh(args) -> int:
    spec = load_model(args.model)
    rs = routes(spec)
    route = args.route or next(iter(rs))
    if route not in rs:
        raise InputError(f"route {route} not available; choose from {', '.join(sorted(rs))}")
    model = build_theta_model(spec, route)
    dist = model.dh(args.n)
    out = {"model": spec.name, "n": args.n, "route": route, "distribution": dist.to_json()}
    if args.pair:
        f = parse_test_function(args.pair, model.rank, _window(spec, args.window, model.rank))
        if f.poly is not None:
            val = pair_exact(dist, f.poly)
            out["pairing"] = {"test_function": str(f.poly), "value": rational_to_json(val), "exact": True}
        else:
            val, err = pair_numeric(dist, f)
            out["pairing"] = {"test_function": f.label, "value": val, "exact": False, "error_estimate": err}
    _check(out, "distribution.schema.json")
    _emit(_dump(out), args.out)
    return EXIT_PASS


def cmd_verify(args) -> int:
    suite = SUITES[args.suite]
    csv_rows: list | None = [] if args.csv else None
    kwargs = {}
    if args.model:
        spec = load_model(args.model)
        if args.suite in ("exact", "rr", "asymptotic", "routes"):
            kwargs["specs"] = [spec]
        else:
            raise InputError(f"suite {args.suite} runs on its bundled data and takes no --model")
    if args.suite in ("exact", "asymptotic"):
        kwargs["csv_rows"] = csv_rows
    if args.k and args.suite == "exact":
        kwargs["k_range"] = range(1, args.k + 1)
    rep = suite(**kwargs)
    _check(rep, "report.schema.json")
    _emit(_dump(rep), args.out)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["model", "test_function", "k", "lhs", "rhs", "error"])
            w.writerows(csv_rows)
    if not rep["passed"]:
        print(f"FAIL: {rep['first_failure']}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_PASS


def cmd_partition(args) -> int:
    try:
        delta = VectorList.of(json.loads(args.delta) if not Path(args.delta).exists()
                              else json.loads(Path(args.delta).read_text()))
    except json.JSONDecodeError:
        raise InputError("--delta must be a JSON list of integer vectors") from None
    out = {"delta": delta.to_json()}
    if args.lam is not None:
        lam = _parse_vector(args.lam)
        out["lambda"] = lam
        out["count"] = kostant_count(delta, lam)
    if args.chambers:
        cx = t_piecewise(delta).to_json()
        out["walls"] = cx["walls"]
        out["chambers"] = cx["chambers"]
    if args.lam is None and not args.chambers:
        raise InputError("give --lambda and/or --chambers")
    _check(out, "partition.schema.json")
    _emit(_dump(out), args.out)
    return EXIT_PASS


def cmd_todd(args) -> int:
    if args.weights:
        weights = json.loads(args.weights)
        res = graded_todd_diagonal(weights, args.n).to_json()
    else:
        comps = [{"degree": n, "polynomial": graded_todd_matrix(n, args.dim).expression.to_json()}
                 for n in range(args.n + 1)]
        res = {"dim": args.dim, "components": comps}
    _check(res, "todd.schema.json")
    _emit(_dump(res), args.out)
    return EXIT_PASS


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="toricrr", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, model_required=True):
        p.add_argument("--model", required=model_required, help="model JSON file or bundled corpus name")
        p.add_argument("--out", help="write output to FILE")

    p = sub.add_parser("enumerate", help="lattice points and multiplicities of k*model")
    common(p)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--window", help="a,b[,c,d] box in xi = lambda/k units (noncompact models)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("character", help="exact character value sum m(lambda,k) g^lambda")
    common(p)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--g", required=True, help="rational point, comma separated")
    p.set_defaults(func=cmd_character)

    p = sub.add_parser("dh", help="twisted DH distribution DH_n")
    common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--route", help="construction route (default: first available)")
    p.add_argument("--pair", help="test function: expression in xi (or xi1, xi2) or a JSON file")
    p.add_argument("--window", help="support box a,b[,c,d] for numeric test functions")
    p.set_defaults(func=cmd_dh)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("suite", choices=sorted(SUITES))
    common(p, model_required=False)
    p.add_argument("--k", type=int, help="largest k for the exact suite")
    p.add_argument("--csv", help="write (k, lhs, rhs, error) rows to FILE")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("partition", help="Kostant partition function and chamber polynomials")
    p.add_argument("--delta", required=True, help="JSON list of vectors or a file")
    p.add_argument("--lambda", dest="lam", help="integer vector a,b or JSON list")
    p.add_argument("--chambers", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("todd", help="graded Todd components")
    p.add_argument("--n", type=int, default=4)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--weights", help="JSON list of integer weight vectors")
    g.add_argument("--dim", type=int, help="matrix size for the invariant polynomial form")
    p.add_argument("--out")
    p.set_defaults(func=cmd_todd)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code not in (0, None) else EXIT_PASS
    try:
        return args.func(args)
    except AssertionError as e:
        print(f"assertion failure: {e}", file=sys.stderr)
        return EXIT_FAIL
    except (InputError, ModelError, PolytopeError, PartitionError, UnsupportedShape, DivergentPairing,
            jsonschema.ValidationError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
