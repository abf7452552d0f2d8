"""JSON model specifications and the bundled corpus.

A model document names a multiplicity function, the exponent d, and
(implicitly) the routes used to build DH_n:

    {"type": "polytope", "halfspaces": [[[1, 0], 1], ...], "d": 2}
    {"type": "polytope", "vertices": [[0, 0], [1, 0], [0, 1]]}
    {"type": "convolution", "factors": [[-2, 0], [0, 2]], "d": 2}
    {"type": "p1p1"}
    {"type": "halfline", "start": 0, "direction": 1, "d": 1}
    {"type": "cone", "apex": [0, 0], "generators": [[1, 0], [0, 1]]}
    {"type": "partition", "delta": [[1, 0], [0, 1], [1, 1]]}
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Callable

import jsonschema

from .algebra import rational_from_json, to_rational
from .asymptotics import ThetaModel
from .characters import (
    MultiplicityFunction,
    cone_multiplicity,
    convolve_multiplicities,
    halfline_multiplicity,
    p1p1_multiplicity,
    paradan_pieces_p1p1,
    toric_multiplicity,
)
from .dh import (
    FaceDistribution,
    canonical_1d,
    dh_box,
    dh_delzant,
    dh_from_character,
    dh_halfline,
    dh_interval,
    dh_vertex_cone,
    dsum,
    graded_convolution,
)
from .partition import VectorList, d_series, partition_multiplicity
from .polytope import LatticePolytope, VertexCone, polytope_from_json

MODEL_TYPES = ("polytope", "convolution", "p1p1", "halfline", "cone", "partition")
CORPUS_NAMES = ("interval01", "interval-20", "square", "simplex2", "p1p1", "halfline", "quadrant", "a2")
COMPACT_CORPUS = ("interval01", "interval-20", "square", "simplex2", "p1p1")


class ModelError(ValueError):
    pass


def load_schema(name: str) -> dict:
    return json.loads(resources.files("toricrr").joinpath("schemas", name).read_text())


def validate_model(doc: dict) -> None:
    try:
        jsonschema.validate(doc, load_schema("model.schema.json"))
    except jsonschema.ValidationError as e:
        where = "/".join(str(p) for p in e.absolute_path) or "<root>"
        raise ModelError(f"model schema violation at {where}: {e.message}") from None


@dataclass
class ModelSpec:
    doc: dict

    @property
    def type(self) -> str:
        return self.doc["type"]

    @property
    def name(self) -> str:
        return self.doc.get("name", self.type)

    def to_json(self) -> dict:
        return dict(self.doc)

    @classmethod
    def from_json(cls, doc: dict) -> "ModelSpec":
        validate_model(doc)
        return cls(dict(doc))


def load_model(path_or_name) -> ModelSpec:
    """A path to a JSON file, or the name of a bundled corpus model."""
    p = Path(str(path_or_name))
    if p.exists():
        try:
            doc = json.loads(p.read_text())
        except json.JSONDecodeError as e:
            raise ModelError(f"{p}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}") from None
        return ModelSpec.from_json(doc)
    if str(path_or_name) in CORPUS_NAMES:
        return corpus_model(str(path_or_name))
    raise ModelError(f"no such model file or corpus name: {path_or_name}")


def corpus_model(name: str) -> ModelSpec:
    text = resources.files("toricrr").joinpath("models", f"{name}.json").read_text()
    return ModelSpec.from_json(json.loads(text))


def corpus(names=CORPUS_NAMES) -> list[ModelSpec]:
    return [corpus_model(n) for n in names]


# ---------------------------------------------------------------------------
# building models
# ---------------------------------------------------------------------------

def _polytope(doc) -> LatticePolytope:
    return polytope_from_json(doc)


def _box_bounds(p: LatticePolytope):
    """(lows, highs) if p is an axis-parallel box, else None."""
    g = p.dim
    lows, highs = [None] * g, [None] * g
    for u, c in p.halfspaces:
        nz = [i for i, a in enumerate(u) if a]
        if len(nz) != 1:
            return None
        i = nz[0]
        if u[i] == 1:
            highs[i] = c
        elif u[i] == -1:
            lows[i] = -c
        else:
            return None
    if any(x is None for x in lows + highs):
        return None
    return lows, highs


def multiplicity_of(spec: ModelSpec) -> MultiplicityFunction:
    doc = spec.doc
    t = spec.type
    if t == "polytope":
        return toric_multiplicity(_polytope(doc))
    if t == "convolution":
        ms = [toric_multiplicity(LatticePolytope.interval(rational_from_json(a), rational_from_json(b)))
              for a, b in doc["factors"]]
        out = ms[0]
        for m in ms[1:]:
            out = convolve_multiplicities(out, m)
        return out
    if t == "p1p1":
        return p1p1_multiplicity()
    if t == "halfline":
        return halfline_multiplicity(rational_from_json(doc.get("start", 0)), int(doc.get("direction", 1)))
    if t == "cone":
        return cone_multiplicity([rational_from_json(a) for a in doc["apex"]], doc["generators"])
    if t == "partition":
        return partition_multiplicity(VectorList.of(doc["delta"]))
    raise ModelError(f"unknown model type {t}")


def default_d(spec: ModelSpec) -> int:
    doc = spec.doc
    if "d" in doc:
        return int(doc["d"])
    t = spec.type
    if t == "polytope":
        return _polytope(doc).dim
    if t == "convolution":
        return len(doc["factors"])
    if t == "p1p1":
        return 2
    if t == "halfline":
        return 1
    if t == "cone":
        return len(doc["apex"])
    if t == "partition":
        return len(doc["delta"])
    raise ModelError(f"unknown model type {t}")


def routes(spec: ModelSpec) -> dict[str, Callable[[int], FaceDistribution]]:
    """Independent structural constructions of DH_n available for this model."""
    doc = spec.doc
    t = spec.type
    out: dict[str, Callable[[int], FaceDistribution]] = {}
    if t == "polytope":
        p = _polytope(doc)
        box = _box_bounds(p)
        if p.dim == 1:
            a, b = box
            out["interval"] = lambda n, a=a[0], b=b[0]: dh_interval(a, b, n)
        elif box is not None:
            out["tensor"] = lambda n, lo=box[0], hi=box[1]: dh_box(lo, hi, n)
        if p.dim <= 2:
            out["vertex-cone"] = lambda n, p=p: dh_delzant(p, n)
    elif t in ("convolution", "p1p1"):
        factors = [(-2, 0), (0, 2)] if t == "p1p1" else \
            [(rational_from_json(a), rational_from_json(b)) for a, b in doc["factors"]]
        d = default_d(spec)

        def conv(n, make):
            series = [[make(a, b, i) for i in range(n + 1)] for a, b in factors]
            acc = series[0]
            for s in series[1:]:
                acc = [graded_convolution(acc, s, i) for i in range(n + 1)]
            return acc[n]

        out["convolution"] = lambda n: conv(n, dh_interval)
        out["vertex-cone"] = lambda n: conv(n, lambda a, b, i: dh_delzant(LatticePolytope.interval(a, b), i))
        if t == "p1p1":
            r = to_rational(doc.get("r", Fraction(-1, 2)))
            out["paradan"] = lambda n: canonical_1d(
                dsum([dh_from_character(pc, n, d) for pc in paradan_pieces_p1p1(r)], 1))
    elif t == "halfline":
        a = rational_from_json(doc.get("start", 0))
        s = int(doc.get("direction", 1))
        out["halfline"] = lambda n: dh_halfline(a, s, n)
    elif t == "cone":
        cone = VertexCone(tuple(rational_from_json(a) for a in doc["apex"]),
                          tuple(tuple(w) for w in doc["generators"]))
        out["vertex-cone"] = lambda n: dh_vertex_cone(cone, n)
    elif t == "partition":
        delta = VectorList.of(doc["delta"])
        out["partition"] = lambda n: d_series(delta, n)[n]
    return out


def build_theta_model(spec: ModelSpec, route: str | None = None) -> ThetaModel:
    rs = routes(spec)
    if route is None:
        route = next(iter(rs))
    if route not in rs:
        raise ModelError(f"route {route} not available for {spec.type}; choose from {sorted(rs)}")
    moment = _polytope(spec.doc) if spec.type == "polytope" else None
    return ThetaModel(multiplicity_of(spec), default_d(spec), rs[route], moment, label=spec.name)
