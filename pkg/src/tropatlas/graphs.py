"""Stable weighted marked graphs, weighted edge contractions,
isomorphisms, enumeration, and extended tropical curves with their
clutching and self-gluing maps.

A graph is stored with vertex weights, an edge multiset (unordered vertex
pairs, loops allowed) and a marking-indexed leg list. Automorphisms act
on half-edges, so a loop contributes a factor of 2 (swapping its two
ends) and parallel edges contribute factorials.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache

from .cones import Cone
from .linalg import identity_matrix
from .monoids import INF, pointed


@dataclass(frozen=True)
class StableGraph:
    weights: tuple  # weight per vertex
    edges: tuple  # (u, v) pairs with u <= v, multiplicity by repetition
    legs: tuple  # legs[i] = vertex carrying marking i+1

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(self.weights))
        object.__setattr__(
            self,
            "edges",
            tuple(sorted(tuple(sorted(e)) for e in self.edges)),
        )
        object.__setattr__(self, "legs", tuple(self.legs))
        v = len(self.weights)
        assert v >= 1
        assert all(w >= 0 for w in self.weights)
        assert all(0 <= a <= b < v for a, b in self.edges)
        assert all(0 <= x < v for x in self.legs)
        assert is_connected(self), "graph must be connected"

    @property
    def n(self):
        return len(self.legs)


def is_connected(g: StableGraph) -> bool:
    v = len(g.weights)
    seen = {0}
    stack = [0]
    adj = [[] for _ in range(v)]
    for a, b in g.edges:
        adj[a].append(b)
        adj[b].append(a)
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return len(seen) == v


def valences(g: StableGraph):
    """Incident edge-ends plus legs per vertex; loops count twice."""
    val = [0] * len(g.weights)
    for a, b in g.edges:
        val[a] += 1
        val[b] += 1
    for x in g.legs:
        val[x] += 1
    return tuple(val)


def genus(g: StableGraph) -> int:
    return len(g.edges) - len(g.weights) + 1 + sum(g.weights)


def is_stable(g: StableGraph) -> bool:
    return all(
        2 * w - 2 + v > 0 for w, v in zip(g.weights, valences(g))
    )


@dataclass(frozen=True)
class Contraction:
    source: StableGraph
    target: StableGraph
    edges: tuple  # contracted edge indices in the source
    vertex_map: tuple  # source vertex -> target vertex
    edge_map: tuple  # source edge index -> target edge index or None


def contract(g: StableGraph, edge_indices) -> Contraction:
    """Weighted contraction of a set of edges.

    Non-loop contractions merge endpoint weights; every independent cycle
    inside the contracted set adds 1 to the weight of the merged vertex,
    so the genus is preserved.
    """
    edge_indices = tuple(sorted(set(edge_indices)))
    v = len(g.weights)
    parent = list(range(v))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in edge_indices:
        a, b = g.edges[i]
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    roots = sorted({find(x) for x in range(v)})
    new_index = {r: i for i, r in enumerate(roots)}
    vmap = tuple(new_index[find(x)] for x in range(v))
    nv = len(roots)
    weights = [0] * nv
    for x in range(v):
        weights[vmap[x]] += g.weights[x]
    # one genus unit per independent cycle in each contracted component
    comp_vertices = Counter()
    comp_edges = Counter()
    touched = set()
    for i in edge_indices:
        a, b = g.edges[i]
        comp_edges[vmap[a]] += 1
        touched.add(a)
        touched.add(b)
    for x in touched:
        comp_vertices[vmap[x]] += 1
    for c in comp_edges:
        weights[c] += comp_edges[c] - comp_vertices[c] + 1
    contracted = set(edge_indices)
    kept = [i for i in range(len(g.edges)) if i not in contracted]
    new_pairs = [
        tuple(sorted((vmap[g.edges[i][0]], vmap[g.edges[i][1]]))) for i in kept
    ]
    order = sorted(range(len(kept)), key=lambda j: new_pairs[j])
    edge_map = [None] * len(g.edges)
    for pos, j in enumerate(order):
        edge_map[kept[j]] = pos
    legs = tuple(vmap[x] for x in g.legs)
    target = StableGraph(
        tuple(weights), tuple(new_pairs[j] for j in order), legs
    )
    return Contraction(g, target, edge_indices, vmap, tuple(edge_map))


def _color_refinement(g: StableGraph):
    v = len(g.weights)
    legs_at = [[] for _ in range(v)]
    for i, x in enumerate(g.legs):
        legs_at[x].append(i)
    loops = [0] * v
    adj = [Counter() for _ in range(v)]
    for a, b in g.edges:
        if a == b:
            loops[a] += 1
        else:
            adj[a][b] += 1
            adj[b][a] += 1
    colors = [
        (g.weights[x], tuple(legs_at[x]), loops[x], sum(adj[x].values()))
        for x in range(v)
    ]
    ranks = {c: i for i, c in enumerate(sorted(set(colors)))}
    colors = [ranks[c] for c in colors]
    while True:
        sig = [
            (colors[x], tuple(sorted((colors[y], m) for y, m in adj[x].items())))
            for x in range(v)
        ]
        ranks = {s: i for i, s in enumerate(sorted(set(sig)))}
        new = [ranks[s] for s in sig]
        if new == colors:
            return colors
        colors = new


def _relabel_key(g: StableGraph, perm):
    """Key of the graph with vertex x renamed to perm[x]."""
    weights = [0] * len(g.weights)
    for x, w in enumerate(g.weights):
        weights[perm[x]] = w
    edges = tuple(sorted(tuple(sorted((perm[a], perm[b]))) for a, b in g.edges))
    legs = tuple(perm[x] for x in g.legs)
    return (tuple(weights), edges, legs)


def _class_permutations(colors):
    """All vertex relabelings that keep the refined color classes."""
    v = len(colors)
    classes = {}
    for x in range(v):
        classes.setdefault(colors[x], []).append(x)
    blocks = [classes[c] for c in sorted(classes)]
    offsets = []
    o = 0
    for b in blocks:
        offsets.append(o)
        o += len(b)
    for arrangement in itertools.product(
        *[itertools.permutations(b) for b in blocks]
    ):
        perm = [0] * v
        for block, off in zip(arrangement, offsets):
            for i, x in enumerate(block):
                perm[x] = off + i
        yield tuple(perm)


@lru_cache(maxsize=262144)
def canonical_key(g: StableGraph):
    colors = _color_refinement(g)
    return min(_relabel_key(g, p) for p in _class_permutations(colors))


def vertex_isomorphisms(g: StableGraph, h: StableGraph):
    """All marking-preserving vertex bijections g -> h that preserve
    weights and edge multiplicities."""
    v = len(g.weights)
    if v != len(h.weights) or len(g.edges) != len(h.edges):
        return []
    if len(g.legs) != len(h.legs):
        return []
    gm = Counter(g.edges)
    hm = Counter(h.edges)
    out = []
    for perm in itertools.permutations(range(v)):
        if any(h.weights[perm[x]] != g.weights[x] for x in range(v)):
            continue
        if any(h.legs[i] != perm[g.legs[i]] for i in range(len(g.legs))):
            continue
        ok = True
        for (a, b), m in gm.items():
            if hm.get(tuple(sorted((perm[a], perm[b]))), 0) != m:
                ok = False
                break
        if ok:
            out.append(perm)
    return out


def automorphism_count(g: StableGraph) -> int:
    """Order of the half-edge automorphism group: vertex automorphisms
    times permutations of parallel edges times 2 per loop."""
    mult = Counter(g.edges)
    per_perm = 1
    for (a, b), m in mult.items():
        f = 1
        for i in range(2, m + 1):
            f *= i
        per_perm *= f
        if a == b:
            per_perm *= 2 ** m
    return len(vertex_isomorphisms(g, g)) * per_perm


def graphs_isomorphic(g: StableGraph, h: StableGraph) -> bool:
    return canonical_key(g) == canonical_key(h)


def _uncontractions(g: StableGraph):
    """All stable graphs with one more edge contracting back to g."""
    v = len(g.weights)
    out = []
    for x in range(v):
        if g.weights[x] >= 1:
            w = list(g.weights)
            w[x] -= 1
            out.append(StableGraph(tuple(w), g.edges + ((x, x),), g.legs))
        # split x into x and a new vertex joined by a new edge
        slots = []
        for i, (a, b) in enumerate(g.edges):
            if a == x and b == x:
                slots.append((i, 0))
                slots.append((i, 1))
            elif a == x:
                slots.append((i, 0))
            elif b == x:
                slots.append((i, 1))
        leg_slots = [i for i, lv in enumerate(g.legs) if lv == x]
        total = len(slots) + len(leg_slots)
        nv = v
        for w1 in range(g.weights[x] + 1):
            w2 = g.weights[x] - w1
            for mask in range(2 ** total):
                ends = [list(e) for e in g.edges]
                legs = list(g.legs)
                for t in range(len(slots)):
                    if mask >> t & 1:
                        i, side = slots[t]
                        ends[i][side] = nv
                for t in range(len(leg_slots)):
                    if mask >> (len(slots) + t) & 1:
                        legs[leg_slots[t]] = nv
                w = list(g.weights)
                w[x] = w1
                w.append(w2)
                edges = [tuple(sorted(e)) for e in ends] + [(x, nv)]
                cand = StableGraph(tuple(w), tuple(edges), tuple(legs))
                if is_stable(cand):
                    out.append(cand)
    return out


def enumerate_stable_graphs(g: int, n: int):
    """All isomorphism classes of stable weighted graphs of type (g, n),
    grown by repeated single-edge uncontraction from the one-vertex graph."""
    if 2 * g - 2 + n <= 0:
        raise ValueError("no stable graphs for this (g, n)")
    start = StableGraph((g,), (), (0,) * n)
    seen = {canonical_key(start)}
    result = [start]
    frontier = [start]
    while frontier:
        new = []
        for graph in frontier:
            for cand in _uncontractions(graph):
                k = canonical_key(cand)
                if k not in seen:
                    seen.add(k)
                    new.append(cand)
        result.extend(new)
        frontier = new
    return result


def _prufer_trees(v: int):
    """Edge lists of all labeled trees on v vertices."""
    if v == 1:
        yield ()
        return
    if v == 2:
        yield ((0, 1),)
        return
    import heapq

    for seq in itertools.product(range(v), repeat=v - 2):
        deg = [1] * v
        for x in seq:
            deg[x] += 1
        avail = [x for x in range(v) if deg[x] == 1]
        heapq.heapify(avail)
        edges = []
        for x in seq:
            leaf = heapq.heappop(avail)
            edges.append(tuple(sorted((leaf, x))))
            deg[leaf] -= 1
            deg[x] -= 1
            if deg[x] == 1:
                heapq.heappush(avail, x)
        u = heapq.heappop(avail)
        w = heapq.heappop(avail)
        edges.append(tuple(sorted((u, w))))
        yield tuple(sorted(edges))


def _shapes(v: int, extra: int):
    """Connected multigraph shapes on v vertices with v-1+extra edges,
    one per isomorphism class (weights and legs ignored)."""
    trees = {}
    for edges in _prufer_trees(v):
        sh = StableGraph((0,) * v, edges, ())
        trees.setdefault(canonical_key(sh), sh)
    if extra == 0:
        return list(trees.values())
    pairs = [(i, j) for i in range(v) for j in range(i, v)]
    shapes = {}
    for sh in trees.values():
        for added in itertools.combinations_with_replacement(pairs, extra):
            cand = StableGraph(sh.weights, sh.edges + tuple(added), ())
            shapes.setdefault(canonical_key(cand), cand)
    return list(shapes.values())


def _weight_vectors(v: int, total: int):
    if v == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _weight_vectors(v - 1, total - head):
            yield (head,) + rest


def _leg_assignments(counts, n):
    """All leg tuples with the given number of markings per vertex."""
    pool = list(range(n))

    def rec(vi, remaining):
        if vi == len(counts):
            if not remaining:
                yield {}
            return
        for chosen in itertools.combinations(remaining, counts[vi]):
            rest = [m for m in remaining if m not in chosen]
            for tail in rec(vi + 1, rest):
                d = dict(tail)
                for m in chosen:
                    d[m] = vi
                yield d

    for d in rec(0, pool):
        yield tuple(d[i] for i in range(n))


def enumerate_stable_graphs_direct(g: int, n: int):
    """Independent enumeration: build shapes (weighted multigraphs up to
    isomorphism) directly, then attach markings one orbit representative
    per automorphism orbit."""
    if 2 * g - 2 + n <= 0:
        raise ValueError("no stable graphs for this (g, n)")
    result = []
    max_v = 2 * g - 2 + n
    for v in range(1, max_v + 1):
        for b1 in range(g + 1):
            e = v - 1 + b1
            if e > 3 * g - 3 + n:
                continue
            total_weight = g - b1
            for shape in _shapes(v, b1):
                weighted = {}
                for w in _weight_vectors(v, total_weight):
                    cand = StableGraph(w, shape.edges, ())
                    weighted.setdefault(canonical_key(cand), cand)
                for wsh in weighted.values():
                    auts = vertex_isomorphisms(wsh, wsh)
                    val = valences(wsh)
                    lower = [
                        max(0, 3 - 2 * wsh.weights[x] - val[x]) for x in range(v)
                    ]
                    slack = n - sum(lower)
                    if slack < 0:
                        continue
                    for extra in _weight_vectors(v, slack):
                        counts = [lower[x] + extra[x] for x in range(v)]
                        for legs in _leg_assignments(counts, n):
                            if len(auts) > 1 and any(
                                tuple(p[x] for x in legs) < legs for p in auts
                            ):
                                continue
                            result.append(
                                StableGraph(wsh.weights, wsh.edges, legs)
                            )
    return result


def cone_of_graph(g: StableGraph) -> Cone:
    """The orthant with one coordinate per edge; faces correspond to edge
    subsets, and the face where a subset vanishes is the contraction."""
    e = len(g.edges)
    return Cone(e, identity_matrix(e))


@dataclass(frozen=True)
class ModuliAtlas:
    g: int
    n: int
    graphs: tuple  # one representative per isomorphism class
    cones: tuple  # cone_of_graph per graph
    contractions: tuple  # (source index, edge subset, target index)
    automorphisms: tuple  # automorphism group order per graph


def moduli_atlas(g: int, n: int) -> ModuliAtlas:
    graphs = enumerate_stable_graphs(g, n)
    keys = {canonical_key(gr): i for i, gr in enumerate(graphs)}
    arrows = []
    for i, gr in enumerate(graphs):
        e = len(gr.edges)
        for size in range(1, e + 1):
            for subset in itertools.combinations(range(e), size):
                c = contract(gr, subset)
                j = keys[canonical_key(c.target)]
                arrows.append((i, subset, j))
    return ModuliAtlas(
        g,
        n,
        tuple(graphs),
        tuple(cone_of_graph(gr) for gr in graphs),
        tuple(arrows),
        tuple(automorphism_count(gr) for gr in graphs),
    )


@dataclass(frozen=True)
class ExtendedTropicalCurve:
    graph: StableGraph
    base: Cone  # lengths live in the pointed monoid of this cone
    lengths: tuple  # per edge: lattice point of the base cone, or INF

    def __post_init__(self):
        object.__setattr__(self, "lengths", tuple(self.lengths))
        assert len(self.lengths) == len(self.graph.edges)
        m = pointed(self.base)
        for d in self.lengths:
            if d is INF:
                continue
            assert m.contains(d), "edge length outside the base monoid"
            assert any(d), "zero edge length is not allowed"


def curve_from_hom(g: StableGraph, base: Cone, values) -> ExtendedTropicalCurve:
    """Curve over the extended cone of the base from one monoid value per
    edge; edges with value 0 are contracted."""
    values = tuple(values)
    assert len(values) == len(g.edges)
    zero = tuple(
        i for i, d in enumerate(values) if d is not INF and not any(d)
    )
    c = contract(g, zero)
    lengths = [None] * len(c.target.edges)
    for i, d in enumerate(values):
        if c.edge_map[i] is not None:
            lengths[c.edge_map[i]] = d
    return ExtendedTropicalCurve(c.target, base, tuple(lengths))


def _embed_lengths(curve, morphism):
    new = []
    for d in curve.lengths:
        new.append(INF if d is INF else morphism.apply(d))
    return tuple(new)


def _common_base(c1, c2, force_product=False):
    from .monoids import product_monoid

    if c1.base == c2.base and not force_product:
        return c1, c2
    m, ia, ib = product_monoid(pointed(c1.base), pointed(c2.base))
    c1n = ExtendedTropicalCurve(c1.graph, m.cone, _embed_lengths(c1, ia))
    c2n = ExtendedTropicalCurve(c2.graph, m.cone, _embed_lengths(c2, ib))
    return c1n, c2n


def clutch(c1: ExtendedTropicalCurve, c2: ExtendedTropicalCurve, product_base=False):
    """Join the last marking of each curve by a new edge of infinite
    length; markings of the second curve are shifted past the first's.

    Curves over distinct bases (or any pair when product_base is set) are
    first moved to the product of the two bases.
    """
    assert c1.graph.legs and c2.graph.legs
    c1, c2 = _common_base(c1, c2, product_base)
    v1 = len(c1.graph.weights)
    a = c1.graph.legs[-1]
    b = c2.graph.legs[-1] + v1
    weights = c1.graph.weights + c2.graph.weights
    edges = c1.graph.edges + tuple(
        (u + v1, w + v1) for u, w in c2.graph.edges
    ) + ((min(a, b), max(a, b)),)
    legs = c1.graph.legs[:-1] + tuple(x + v1 for x in c2.graph.legs[:-1])
    lengths = c1.lengths + c2.lengths + (INF,)
    return _with_sorted_lengths(weights, edges, legs, lengths, c1.base)


def self_glue(c: ExtendedTropicalCurve):
    """Join the last two markings of the curve by a new edge (possibly a
    loop) of infinite length; the genus rises by one."""
    assert len(c.graph.legs) >= 2
    a, b = c.graph.legs[-2], c.graph.legs[-1]
    edges = c.graph.edges + ((min(a, b), max(a, b)),)
    legs = c.graph.legs[:-2]
    lengths = c.lengths + (INF,)
    return _with_sorted_lengths(c.graph.weights, edges, legs, lengths, c.base)


def _with_sorted_lengths(weights, edges, legs, lengths, base):
    order = sorted(range(len(edges)), key=lambda i: tuple(sorted(edges[i])))
    graph = StableGraph(weights, tuple(edges[i] for i in order), legs)
    return ExtendedTropicalCurve(
        graph, base, tuple(lengths[i] for i in order)
    )


def curve_isomorphisms(c1: ExtendedTropicalCurve, c2: ExtendedTropicalCurve):
    """Marking-preserving graph isomorphisms matching edge lengths."""
    if c1.base != c2.base:
        return []

    def pair_lengths(c):
        d = {}
        for (a, b), ln in zip(c.graph.edges, c.lengths):
            key = (a, b)
            d.setdefault(key, []).append(INF if ln is INF else tuple(ln))
        return {k: sorted(v, key=repr) for k, v in d.items()}

    p1 = pair_lengths(c1)
    p2 = pair_lengths(c2)
    out = []
    for perm in vertex_isomorphisms(c1.graph, c2.graph):
        ok = True
        for (a, b), lens in p1.items():
            if p2.get(tuple(sorted((perm[a], perm[b])))) != lens:
                ok = False
                break
        if ok:
            out.append(perm)
    return out


def curves_isomorphic(c1, c2) -> bool:
    return bool(curve_isomorphisms(c1, c2))
