import random

import pytest

from corpus import monoid_corpus, random_pointed_morphism
from tropatlas.cones import cone_from_rays, zero_cone
from tropatlas.graphs import genus, graphs_isomorphic
from tropatlas.logcurves import (
    CombLogCurve,
    PointedLogPoint,
    base_change,
    dual_tropical_curve,
    log_clutch,
    log_self_glue,
    verify_base_change_square,
    verify_commutativity,
)
from tropatlas.monoids import (
    INF,
    PointedMorphism,
    pointed,
    prime_of_face,
    rees_quotient_by_prime,
)

RAY1 = cone_from_rays(1, [(1,)])
N1 = pointed(RAY1)
S1 = PointedLogPoint(N1)
SPT = PointedLogPoint(pointed(zero_cone(0)))


def _rational(marks, base=S1):
    return CombLogCurve(base, (0,), (), tuple(0 for _ in range(marks)))


def test_dual_tropical_curve_examples():
    x = CombLogCurve(S1, (1,), (), (0,))
    c = dual_tropical_curve(x)
    assert c.graph.weights == (1,) and not c.graph.edges and c.graph.legs == (0,)
    y = CombLogCurve(S1, (0, 0), (((0, 1), (1,)),), (0, 0, 1, 1))
    cy = dual_tropical_curve(y)
    assert cy.lengths == ((1,),) and genus(cy.graph) == 0
    z = CombLogCurve(S1, (0,), (((0, 0), INF),), (0,))
    cz = dual_tropical_curve(z)
    assert cz.graph.edges == ((0, 0),) and cz.lengths == (INF,)
    assert genus(cz.graph) == 1


def test_zero_delta_rejected():
    with pytest.raises(AssertionError):
        CombLogCurve(S1, (0, 1), (((0, 1), (0,)),), (0, 0))


def test_log_clutch():
    out = log_clutch(_rational(3), _rational(3))
    assert out.genera == (0, 0)
    assert len(out.nodes) == 1 and out.nodes[0][1] is INF
    assert len(out.markings) == 4
    # distinct bases combine by the product of pointed monoids
    out2 = log_clutch(_rational(3), _rational(3), product_base=True)
    assert out2.base.monoid.rank == 2
    # genus adds with a nodeless genus-1 curve
    g1 = CombLogCurve(S1, (1,), (), (0,))
    out3 = log_clutch(g1, _rational(3))
    assert genus(dual_tropical_curve(out3).graph) == 1


def test_log_self_glue():
    out = log_self_glue(_rational(4))
    assert len(out.genera) == 1 and out.nodes[0][0] == (0, 0)
    assert out.nodes[0][1] is INF and len(out.markings) == 2
    out2 = log_self_glue(_rational(3))
    assert genus(dual_tropical_curve(out2).graph) == 1
    two = CombLogCurve(S1, (0, 0), (((0, 1), (2,)),), (0, 0, 0, 1, 1))
    out3 = log_self_glue(two)
    assert len(out3.nodes) == 2
    assert genus(dual_tropical_curve(out3).graph) == 1


def test_base_change_identity():
    x = CombLogCurve(S1, (0, 0), (((0, 1), (1,)),), (0, 0, 1, 1))
    ident = PointedMorphism(N1, N1, frozenset(), ((1,),))
    assert base_change(x, ident) == x


def test_base_change_rees_sends_finite_to_infinity():
    x = CombLogCurve(S1, (0, 0), (((0, 1), (1,)),), (0, 0, 1, 1))
    _, rees = rees_quotient_by_prime(N1, prime_of_face(N1, frozenset({0})))
    out = base_change(x, rees)
    assert out.nodes[0][1] is INF
    assert out.base.monoid.rank == 0


def test_base_change_smoothing():
    # kill the second coordinate: one node survives, one is smoothed
    n2 = pointed(cone_from_rays(2, [(1, 0), (0, 1)]))
    s2 = PointedLogPoint(n2)
    x = CombLogCurve(
        s2,
        (0, 1, 0),
        (((0, 1), (1, 0)), ((1, 2), (0, 1))),
        (0, 0, 2, 2),
    )
    f = PointedMorphism(n2, N1, frozenset(), ((1, 0),))  # (a, b) -> a
    out = base_change(x, f)
    assert len(out.genera) == 2  # components 1 and 2 merged
    assert len(out.nodes) == 1 and out.nodes[0][1] == (1,)
    assert sum(out.genera) == 1
    g_before = genus(dual_tropical_curve(x).graph)
    assert genus(dual_tropical_curve(out).graph) == g_before


def test_base_change_smoothing_self_node():
    x = CombLogCurve(S1, (0,), (((0, 0), (1,)),), (0,))
    _, to_point = rees_quotient_by_prime(N1, prime_of_face(N1, frozenset()))
    f = PointedMorphism(N1, pointed(zero_cone(0)), frozenset(), ())
    out = base_change(x, f)
    assert out.genera == (1,) and not out.nodes
    del to_point


def test_verify_commutativity_clutch():
    r = verify_commutativity(_rational(3), _rational(3), mode="clutch")
    assert r.ok and r.witness is not None
    assert sum(1 for d in r.log_side.lengths if d is INF) == 1
    assert sum(1 for d in r.trop_side.lengths if d is INF) == 1


def test_verify_commutativity_glue():
    r = verify_commutativity(_rational(4), mode="glue")
    assert r.ok
    assert r.log_side.graph.edges == ((0, 0),)


def test_verify_commutativity_randomized():
    rng = random.Random(31)
    ms = [m for m in monoid_corpus(6) if m.rank <= 2]
    done = 0
    while done < 20:
        m = rng.choice(ms)
        base = PointedLogPoint(m)
        hb = m.hilbert_basis()

        def rand_delta():
            if rng.random() < 0.3 or not hb:
                return INF
            return rng.choice(hb)

        x = CombLogCurve(
            base,
            (0, 1),
            (((0, 1), rand_delta()),),
            (0, 0, 0),
        )
        y = CombLogCurve(base, (1,), (), (0, 0))
        r = verify_commutativity(x, y, mode="clutch")
        assert r.ok
        r2 = verify_commutativity(x, mode="glue")
        assert r2.ok
        done += 1


def test_base_change_square_random():
    rng = random.Random(37)
    ms = [m for m in monoid_corpus(6) if m.rank <= 2]
    done = 0
    while done < 15:
        src = rng.choice(ms)
        dst = rng.choice(ms)
        f = random_pointed_morphism(rng, src, dst)
        hb = src.hilbert_basis()
        if not hb:
            continue
        deltas = [rng.choice(hb), INF]
        x = CombLogCurve(
            PointedLogPoint(src),
            (0, 0, 1),
            (((0, 1), deltas[0]), ((1, 2), deltas[1])),
            (0, 0, 1),
        )
        r = verify_base_change_square(x, f)
        assert r.ok
        done += 1


def test_tropicalization_preserves_structure():
    x = log_clutch(_rational(3), _rational(4))
    c = dual_tropical_curve(x)
    assert graphs_isomorphic(
        c.graph, dual_tropical_curve(x).graph
    )
    assert len(c.graph.legs) == 5
