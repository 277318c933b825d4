"""Canonical JSON serialization for every object the CLI exchanges, plus
DOT export for graphs.

All emitters produce byte-identical output for equal inputs: keys are
sorted, rationals are written as "p/q" strings, the absorbing element as
"inf", and orderings are fixed by the data structures themselves.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .complexes import ConeComplex
from .cones import Cone
from .extended import ExtConeMorphism, ExtendedPoint
from .graphs import ExtendedTropicalCurve, StableGraph, genus
from .logcurves import CombLogCurve, PointedLogPoint
from .monoids import INF, PointedMorphism, PointedToricMonoid, pointed


def canonical_dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


class SchemaError(ValueError):
    pass


def _require(cond, msg):
    if not cond:
        raise SchemaError(msg)


def _int_vec(v, msg="expected a list of integers"):
    _require(isinstance(v, list) and all(isinstance(x, int) for x in v), msg)
    return tuple(v)


def rational_str(x) -> str:
    f = Fraction(x)
    return f"{f.numerator}/{f.denominator}" if f.denominator != 1 else str(f.numerator)


def rational_from_str(s):
    if isinstance(s, int):
        return Fraction(s)
    _require(isinstance(s, str), "expected a rational 'p/q'")
    if "/" in s:
        p, q = s.split("/", 1)
        return Fraction(int(p), int(q))
    return Fraction(int(s))


def cone_to_json(c: Cone) -> dict:
    out = {"rank": c.rank, "rays": [list(r) for r in c.rays]}
    if c.lineality:
        out["lineality"] = [list(r) for r in c.lineality]
    return out


def cone_from_json(d) -> Cone:
    _require(isinstance(d, dict) and "rank" in d and "rays" in d, "cone needs rank and rays")
    _require(isinstance(d["rank"], int) and d["rank"] >= 0, "rank must be a nonnegative integer")
    rays = tuple(_int_vec(r, "rays must be integer vectors") for r in d["rays"])
    lin = tuple(_int_vec(r) for r in d.get("lineality", []))
    _require(all(len(r) == d["rank"] for r in rays + lin), "vector length must equal rank")
    if not lin:
        from .cones import cone_from_rays

        try:
            return cone_from_rays(d["rank"], rays) if rays else Cone(d["rank"], ())
        except ValueError as e:
            raise SchemaError(str(e))
    return Cone(d["rank"], rays, lin)


def monoid_to_json(m: PointedToricMonoid) -> dict:
    return {
        "cone": cone_to_json(m.cone),
        "hilbert_basis": [list(h) for h in m.hilbert_basis()],
    }


def monoid_from_json(d) -> PointedToricMonoid:
    _require(isinstance(d, dict) and "cone" in d, "monoid needs a cone")
    return pointed(cone_from_json(d["cone"]))


def element_to_json(x):
    return "inf" if x is INF else list(x)


def element_from_json(v, rank):
    if v == "inf":
        return INF
    x = _int_vec(v, "monoid element must be an integer vector or 'inf'")
    _require(len(x) == rank, "element length must equal rank")
    return x


def morphism_to_json(f: PointedMorphism) -> dict:
    return {
        "source": cone_to_json(f.source.cone),
        "target": cone_to_json(f.target.cone),
        "kernel_face": sorted(f.kernel_face),
        "matrix": [list(r) for r in f.matrix],
    }


def morphism_from_json(d) -> PointedMorphism:
    _require(
        isinstance(d, dict) and {"source", "target", "kernel_face", "matrix"} <= set(d),
        "morphism needs source, target, kernel_face, matrix",
    )
    src = pointed(cone_from_json(d["source"]))
    dst = pointed(cone_from_json(d["target"]))
    face = frozenset(_int_vec(d["kernel_face"], "kernel_face must be ray indices"))
    matrix = tuple(_int_vec(r) for r in d["matrix"])
    try:
        return PointedMorphism(src, dst, face, matrix)
    except AssertionError as e:
        raise SchemaError(f"invalid morphism: {e}")


def ext_morphism_to_json(e: ExtConeMorphism) -> dict:
    return {
        "source": cone_to_json(e.source),
        "target": cone_to_json(e.target),
        "target_face": sorted(e.target_face),
        "map": [list(r) for r in e.matrix],
    }


def ext_morphism_from_json(d) -> ExtConeMorphism:
    _require(
        isinstance(d, dict) and {"source", "target", "target_face", "map"} <= set(d),
        "extended morphism needs source, target, target_face, map",
    )
    try:
        return ExtConeMorphism(
            cone_from_json(d["source"]),
            cone_from_json(d["target"]),
            frozenset(_int_vec(d["target_face"])),
            tuple(_int_vec(r) for r in d["map"]),
        )
    except AssertionError as e:
        raise SchemaError(f"invalid extended morphism: {e}")


def ext_point_to_json(p: ExtendedPoint) -> dict:
    return {
        "face": sorted(p.stratum_face),
        "coords": [rational_str(x) for x in p.coords],
    }


def ext_point_from_json(d, base: Cone) -> ExtendedPoint:
    _require(
        isinstance(d, dict) and {"face", "coords"} <= set(d),
        "extended point needs face and coords",
    )
    return ExtendedPoint(
        base,
        frozenset(_int_vec(d["face"])),
        tuple(rational_from_str(x) for x in d["coords"]),
    )


def complex_to_json(c: ConeComplex) -> dict:
    return {
        "cells": [cone_to_json(cell) for cell in c.cells],
        "face_maps": [
            {"src": s, "dst": d, "matrix": [list(r) for r in m]}
            for s, d, m in c.face_maps
        ],
    }


def complex_from_json(d) -> ConeComplex:
    _require(
        isinstance(d, dict) and {"cells", "face_maps"} <= set(d),
        "complex needs cells and face_maps",
    )
    cells = tuple(cone_from_json(x) for x in d["cells"])
    fmaps = []
    for fm in d["face_maps"]:
        _require({"src", "dst", "matrix"} <= set(fm), "face map needs src, dst, matrix")
        fmaps.append((fm["src"], fm["dst"], tuple(_int_vec(r) for r in fm["matrix"])))
    try:
        return ConeComplex(cells, tuple(fmaps))
    except AssertionError as e:
        raise SchemaError(f"invalid complex: {e}")


def graph_to_json(g: StableGraph) -> dict:
    return {
        "g": genus(g),
        "n": len(g.legs),
        "vertices": [{"h": w} for w in g.weights],
        "edges": [list(e) for e in g.edges],
        "legs": [
            {"mark": i + 1, "vertex": v} for i, v in enumerate(g.legs)
        ],
    }


def graph_from_json(d) -> StableGraph:
    _require(
        isinstance(d, dict) and {"vertices", "edges", "legs"} <= set(d),
        "graph needs vertices, edges, legs",
    )
    weights = tuple(v["h"] for v in d["vertices"])
    edges = tuple(tuple(_int_vec(e, "edges must be vertex pairs")) for e in d["edges"])
    legs_by_mark = {leg["mark"]: leg["vertex"] for leg in d["legs"]}
    _require(
        sorted(legs_by_mark) == list(range(1, len(legs_by_mark) + 1)),
        "legs must be marked 1..n",
    )
    legs = tuple(legs_by_mark[i + 1] for i in range(len(legs_by_mark)))
    try:
        graph = StableGraph(weights, edges, legs)
    except AssertionError as e:
        raise SchemaError(f"invalid graph: {e}")
    if "g" in d:
        _require(genus(graph) == d["g"], "declared genus does not match the graph")
    if "n" in d:
        _require(len(legs) == d["n"], "declared marking count does not match")
    return graph


def trop_curve_to_json(c: ExtendedTropicalCurve) -> dict:
    return {
        "graph": graph_to_json(c.graph),
        "base": cone_to_json(c.base),
        "lengths": [element_to_json(x) for x in c.lengths],
    }


def trop_curve_from_json(d) -> ExtendedTropicalCurve:
    _require(
        isinstance(d, dict) and {"graph", "base", "lengths"} <= set(d),
        "tropical curve needs graph, base, lengths",
    )
    base = cone_from_json(d["base"])
    try:
        return ExtendedTropicalCurve(
            graph_from_json(d["graph"]),
            base,
            tuple(element_from_json(x, base.rank) for x in d["lengths"]),
        )
    except AssertionError as e:
        raise SchemaError(f"invalid tropical curve: {e}")


def log_curve_to_json(x: CombLogCurve) -> dict:
    return {
        "base": monoid_to_json(x.base.monoid),
        "components": [{"genus": h} for h in x.genera],
        "nodes": [
            {"ends": list(ends), "delta": element_to_json(d)}
            for ends, d in x.nodes
        ],
        "markings": list(x.markings),
    }


def log_curve_from_json(d) -> CombLogCurve:
    _require(
        isinstance(d, dict) and {"base", "components", "nodes", "markings"} <= set(d),
        "log curve needs base, components, nodes, markings",
    )
    base = monoid_from_json(d["base"])
    nodes = []
    for nd in d["nodes"]:
        _require({"ends", "delta"} <= set(nd), "node needs ends and delta")
        nodes.append(
            (
                tuple(_int_vec(nd["ends"], "node ends must be component indices")),
                element_from_json(nd["delta"], base.rank),
            )
        )
    try:
        return CombLogCurve(
            PointedLogPoint(base),
            tuple(c["genus"] for c in d["components"]),
            tuple(nodes),
            tuple(d["markings"]),
        )
    except AssertionError as e:
        raise SchemaError(f"invalid log curve: {e}")


def graph_to_dot(g: StableGraph, name="G") -> str:
    lines = [f"graph {name} {{"]
    for v, w in enumerate(g.weights):
        lines.append(f'  v{v} [label="h={w}"];')
    for a, b in g.edges:
        lines.append(f"  v{a} -- v{b};")
    for i, v in enumerate(g.legs):
        lines.append(f'  leg{i + 1} [shape=none,label="{i + 1}"];')
        lines.append(f"  v{v} -- leg{i + 1} [style=dashed];")
    lines.append("}")
    return "\n".join(lines) + "\n"
