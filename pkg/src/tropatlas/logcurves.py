"""Combinatorial model of pointed log curves over a pointed log point,
their dual tropical curves, log-side clutching and gluing, base change,
and machine-checked commutativity of the two with tropicalization.

Only the combinatorial shadow of a log curve is stored: component genera,
nodes with their smoothing parameters delta (elements of the base pointed
monoid, nonzero), and marked points. This is exactly the data driving the
dual tropical curve.
"""

from __future__ import annotations

from dataclasses import dataclass

from .graphs import (
    ExtendedTropicalCurve,
    StableGraph,
    clutch,
    contract,
    curve_isomorphisms,
    self_glue,
)
from .monoids import INF, PointedMorphism, PointedToricMonoid, pointed, product_monoid


@dataclass(frozen=True)
class PointedLogPoint:
    monoid: PointedToricMonoid


@dataclass(frozen=True)
class CombLogCurve:
    base: PointedLogPoint
    genera: tuple  # genus per component
    nodes: tuple  # ((i, j) with i <= j, delta) with delta nonzero or INF
    markings: tuple  # markings[k] = component carrying marking k+1

    def __post_init__(self):
        object.__setattr__(self, "genera", tuple(self.genera))
        object.__setattr__(
            self,
            "nodes",
            tuple((tuple(sorted(ends)), d) for ends, d in self.nodes),
        )
        object.__setattr__(self, "markings", tuple(self.markings))
        m = self.base.monoid
        for _, d in self.nodes:
            if d is INF:
                continue
            assert m.contains(d), "node parameter outside the base monoid"
            assert any(d), "a node with delta = 0 is a smoothed point"
        # connectedness is delegated to the dual graph constructor
        dual_tropical_curve(self)


def dual_tropical_curve(x: CombLogCurve) -> ExtendedTropicalCurve:
    """One vertex per component, one edge of length delta per node, one
    leg per marking."""
    graph = StableGraph(
        x.genera,
        tuple(ends for ends, _ in x.nodes),
        x.markings,
    )
    order = sorted(
        range(len(x.nodes)), key=lambda i: tuple(sorted(x.nodes[i][0]))
    )
    lengths = tuple(x.nodes[i][1] for i in order)
    return ExtendedTropicalCurve(graph, x.base.monoid.cone, lengths)


def _curve_from_tropical(c: ExtendedTropicalCurve) -> CombLogCurve:
    return CombLogCurve(
        PointedLogPoint(pointed(c.base)),
        c.graph.weights,
        tuple(zip(c.graph.edges, c.lengths)),
        c.graph.legs,
    )


def log_clutch(x: CombLogCurve, y: CombLogCurve, product_base=False) -> CombLogCurve:
    """Join the components carrying the last markings by a node with
    delta = infinity; the second curve's markings are shifted."""
    out = clutch(dual_tropical_curve(x), dual_tropical_curve(y), product_base)
    return _curve_from_tropical(out)


def log_self_glue(x: CombLogCurve) -> CombLogCurve:
    """Replace the last two markings by a node with delta = infinity."""
    return _curve_from_tropical(self_glue(dual_tropical_curve(x)))


def base_change(x: CombLogCurve, f: PointedMorphism) -> CombLogCurve:
    """Push every node parameter through f; nodes whose parameter maps to
    zero are smoothed, merging their branches (genus bookkeeping follows
    the dual graph contraction)."""
    assert f.source == x.base.monoid
    deltas = [d if d is INF else f.apply(d) for _, d in x.nodes]
    zero = [
        i for i, d in enumerate(deltas) if d is not INF and not any(d)
    ]
    dual = dual_tropical_curve(x)
    # node order in the dual curve is the sorted edge order
    order = sorted(range(len(x.nodes)), key=lambda i: tuple(sorted(x.nodes[i][0])))
    c = contract(dual.graph, [order.index(i) for i in zero])
    kept = [i for i in range(len(deltas)) if i not in set(zero)]
    nodes = []
    for i in kept:
        ends, _ = x.nodes[i]
        nodes.append(
            (tuple(sorted((c.vertex_map[ends[0]], c.vertex_map[ends[1]]))), deltas[i])
        )
    return CombLogCurve(
        PointedLogPoint(f.target),
        c.target.weights,
        tuple(nodes),
        tuple(c.vertex_map[v] for v in x.markings),
    )


@dataclass(frozen=True)
class CommutativityReport:
    mode: str
    ok: bool
    witness: tuple | None  # vertex bijection between the two results
    log_side: ExtendedTropicalCurve
    trop_side: ExtendedTropicalCurve

    def summary(self) -> str:
        if self.ok:
            return f"{self.mode}: squares commute (witness {self.witness})"
        return f"{self.mode}: counterexample found"


def verify_commutativity(x: CombLogCurve, y=None, mode="clutch") -> CommutativityReport:
    """Compute both paths around the clutching (or gluing) square and
    check the resulting extended tropical curves are isomorphic with
    exactly matching lengths."""
    if mode == "clutch":
        assert y is not None
        log_side = dual_tropical_curve(log_clutch(x, y))
        trop_side = clutch(dual_tropical_curve(x), dual_tropical_curve(y))
    elif mode == "glue":
        log_side = dual_tropical_curve(log_self_glue(x))
        trop_side = self_glue(dual_tropical_curve(x))
    else:
        raise ValueError("mode must be 'clutch' or 'glue'")
    isos = curve_isomorphisms(log_side, trop_side)
    return CommutativityReport(
        mode, bool(isos), isos[0] if isos else None, log_side, trop_side
    )


def verify_base_change_square(x: CombLogCurve, f: PointedMorphism) -> CommutativityReport:
    """Tropicalizing after base change equals pushing lengths through f
    and contracting zero edges."""
    from .graphs import curve_from_hom

    log_side = dual_tropical_curve(base_change(x, f))
    dual = dual_tropical_curve(x)
    values = [d if d is INF else f.apply(d) for d in dual.lengths]
    trop_side = curve_from_hom(dual.graph, f.target.cone, values)
    isos = curve_isomorphisms(log_side, trop_side)
    return CommutativityReport(
        "basechange", bool(isos), isos[0] if isos else None, log_side, trop_side
    )
