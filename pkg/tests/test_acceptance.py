"""Acceptance gate: seven end-to-end criteria, each printing one
pass/fail line. Run with -s to see the lines on success."""

import contextlib
import io
import itertools
import json
import os
import random
import time

from corpus import (
    composable_pairs,
    corpus_cones,
    monoid_corpus,
    morphism_corpus,
    random_pointed_morphism,
)
from tropatlas.cli import main as cli_main
from tropatlas.complexes import (
    compose_complex,
    extended_star_inclusion,
    factorize_complex,
    fan_complex,
    identity_complex_morphism,
    is_toroidal,
)
from tropatlas.cones import Cone, cone_from_rays, dual_cone, face_join, faces
from tropatlas.extended import compose_ext, dualize, factorize_ext, undualize
from tropatlas.graphs import (
    canonical_key,
    contract,
    enumerate_stable_graphs,
    enumerate_stable_graphs_direct,
)
from tropatlas.linalg import identity_matrix
from tropatlas.logcurves import (
    CombLogCurve,
    PointedLogPoint,
    verify_base_change_square,
    verify_commutativity,
)
from tropatlas.monoids import (
    INF,
    MonomialIdeal,
    PointedMorphism,
    compose,
    factorize_morphism,
    pointed,
    prime_closure,
    prime_of_face,
    pushout,
    rees_quotient_by_prime,
)


class _gate:
    """Prints one PASS/FAIL line per criterion."""

    def __init__(self, number, title):
        self.number = number
        self.title = title

    def __enter__(self):
        self.start = time.monotonic()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.monotonic() - self.start
        verdict = "PASS" if exc_type is None else "FAIL"
        print(f"CRITERION {self.number}: {verdict} ({self.title}, {elapsed:.1f}s)")
        return False


def test_criterion_1_duality_suite():
    with _gate(1, "duality equivalence suite") as g:
        cones = corpus_cones(60)
        assert len(cones) >= 50
        assert {c.rank for c in cones} >= {1, 2, 3, 4}
        assert any(len(c.rays) > c.rank for c in cones)  # non-simplicial
        for c in cones:
            assert dual_cone(dual_cone(c)) == c
        # faces of the cone correspond to primes of its pointed monoid,
        # order respected; membership is decided on monoid generators
        checked_order = 0
        for c in cones:
            m = pointed(c)
            fl = faces(c).faces
            primes = [prime_of_face(m, f) for f in fl]
            assert len({p.face for p in primes}) == len(fl)
        for m in monoid_corpus(20):
            fl = faces(m.cone).faces
            hb = m.hilbert_basis()
            for fa in fl:
                pa = prime_of_face(m, fa)
                for fb in fl:
                    pb = prime_of_face(m, fb)
                    contained = all(pb.contains(h) for h in hb if pa.contains(h))
                    assert contained == (fa <= fb)
                    checked_order += 1
        assert checked_order >= 50
        # round trips on stored pointed morphisms
        ms = morphism_corpus(220)
        assert len(ms) >= 200
        for f in ms:
            back = undualize(dualize(f))
            assert (back.source, back.target) == (f.source, f.target)
            assert (back.kernel_face, back.matrix) == (f.kernel_face, f.matrix)
        assert time.monotonic() - g.start < 60


def test_criterion_2_functoriality_oracle():
    with _gate(2, "duality functoriality vs composition oracle") as g:
        pairs = composable_pairs(220)
        assert len(pairs) >= 200
        for f, h in pairs:
            lhs = dualize(compose(f, h))
            rhs = compose_ext(dualize(h), dualize(f))
            assert (lhs.source, lhs.target) == (rhs.source, rhs.target)
            assert (lhs.target_face, lhs.matrix) == (rhs.target_face, rhs.matrix)
        assert time.monotonic() - g.start < 60


def _same_function(f, g, generators):
    for h in generators:
        if f.apply(h) != g.apply(h):
            return False
    return True


def test_criterion_3_pushout_lemma():
    with _gate(3, "pushout identities and universal property") as g:
        rng = random.Random(2023)
        monoids = [m for m in monoid_corpus(20) if m.rank >= 1]
        # identity: two Rees quotients push out to the join quotient
        done_join = 0
        while done_join < 60:
            m = rng.choice(monoids)
            fl = faces(m.cone).faces
            fa, fb = rng.choice(fl), rng.choice(fl)
            f = rees_quotient_by_prime(m, prime_of_face(m, fa))[1]
            h = rees_quotient_by_prime(m, prime_of_face(m, fb))[1]
            r = pushout(f, h)
            join = face_join(m.cone, fa, fb)
            q, rq = rees_quotient_by_prime(m, prime_of_face(m, join))
            assert r.apex == q
            assert _same_function(compose(f, r.leg_left), rq, m.hilbert_basis())
            done_join += 1
        # identity: toric against Rees equals the quotient by the pushed
        # ideal, reflected into the toric category
        done_toric = 0
        flagged = 0
        all_morphisms = morphism_corpus(220)
        while done_toric < 60:
            raw = rng.choice(all_morphisms)
            f = factorize_morphism(raw)[1]  # toric, from the Rees middle
            p = f.source
            fl = [x for x in faces(p.cone).faces if x]
            if not fl:
                continue
            fa = rng.choice(fl)
            h = rees_quotient_by_prime(p, prime_of_face(p, fa))[1]
            try:
                r = pushout(f, h)
            except ValueError:
                continue  # degenerate: a unit would be forced to infinity
            if r.non_integral_steps:
                flagged += 1
                continue
            q = f.target
            images = [
                f.apply(x)
                for x in p.hilbert_basis()
                if not all(
                    sum(a * b for a, b in zip(x, p.cone.rays[i])) == 0
                    for i in fa
                )
            ]
            images = [x for x in images if x is not INF]
            ideal = MonomialIdeal.from_gens(q, images)
            expected_apex, expected = rees_quotient_by_prime(q, prime_closure(ideal))
            assert r.apex == expected_apex
            assert _same_function(r.leg_left, expected, q.hilbert_basis())
            done_toric += 1
        assert done_join + done_toric >= 100
        # universal property, brute-forced over bounded candidates
        done_univ = 0
        small = [m for m in monoids if 1 <= m.rank <= 2]
        while done_univ < 20:
            p = rng.choice(small)
            f = random_pointed_morphism(rng, p, rng.choice(small))
            h = random_pointed_morphism(rng, p, rng.choice(small))
            try:
                r = pushout(f, h)
            except ValueError:
                continue
            if r.apex.rank > 2:
                continue
            t = rng.choice(small)
            w0 = random_pointed_morphism(rng, r.apex, t)
            u = compose(r.leg_left, w0)
            v = compose(r.leg_right, w0)
            bound = max(
                [2] + [abs(x) for row in w0.matrix for x in row]
            )
            hb_apex = r.apex.hilbert_basis()
            hb_left = f.target.hilbert_basis()
            hb_right = h.target.hilbert_basis()
            behaviors = set()
            for tau in faces(r.apex.cone).faces:
                from tropatlas.monoids import face_perp_basis

                k = len(face_perp_basis(r.apex.cone, tau))
                for entries in itertools.product(
                    range(-bound, bound + 1), repeat=t.rank * k
                ):
                    matrix = tuple(
                        entries[i * k : (i + 1) * k] for i in range(t.rank)
                    )
                    try:
                        w = PointedMorphism(r.apex, t, tau, matrix)
                    except (AssertionError, ValueError):
                        continue
                    if not _same_function(compose(r.leg_left, w), u, hb_left):
                        continue
                    if not _same_function(compose(r.leg_right, w), v, hb_right):
                        continue
                    behaviors.add(tuple(repr(w.apply(x)) for x in hb_apex))
            assert len(behaviors) == 1
            done_univ += 1
        # the diagonal example is flagged as non-integral
        n1 = pointed(cone_from_rays(1, [(1,)]))
        n2 = pointed(Cone(2, ((0, 1), (1, 0))))
        diag = PointedMorphism(n1, n2, frozenset(), ((1,), (1,)))
        to_pt = rees_quotient_by_prime(n1, prime_of_face(n1, frozenset({0})))[1]
        r = pushout(diag, to_pt)
        assert len(r.non_integral_steps) == 1
        raw = r.non_integral_steps[0]
        assert raw.add((1, 0), (0, 1)) is INF
        assert time.monotonic() - g.start < 120


def test_criterion_4_factorization_uniqueness():
    with _gate(4, "toric/toroidal factorization uniqueness") as g:
        count = 0
        for f in morphism_corpus(220):
            e = dualize(f)
            toric, incl = factorize_ext(e)
            assert toric.is_toric
            back = compose_ext(toric, incl)
            assert (back.target_face, back.matrix) == (e.target_face, e.matrix)
            # the trivial factorization only for genuinely toric inputs
            assert (incl.target_face == frozenset()) == e.is_toric
            count += 1
        # complex-level morphisms: star inclusions and identities over
        # several fans
        fans = [
            fan_complex([Cone(2, ((0, 1), (1, 0)))]),
            fan_complex(
                [Cone(2, ((0, 1), (1, 0))), Cone(2, ((1, -1), (1, 0)))]
            ),
            fan_complex([cone_from_rays(3, identity_matrix(3))]),
            fan_complex(
                [cone_from_rays(3, [(1, 1, 1), (1, -1, 1), (-1, 1, 1), (-1, -1, 1)])]
            ),
        ]
        for cx in fans:
            morphisms = [identity_complex_morphism(cx)]
            for sigma in range(len(cx.cells)):
                morphisms.append(extended_star_inclusion(sigma, cx))
            for fm in morphisms:
                toroidal, incl = factorize_complex(fm)
                assert is_toroidal(toroidal)
                back = compose_complex(toroidal, incl)
                for (t1, e1), (t2, e2) in zip(back.assignment, fm.assignment):
                    assert t1 == t2
                    assert (e1.target_face, e1.matrix) == (e2.target_face, e2.matrix)
                assert is_toroidal(incl) == is_toroidal(fm)
                count += 1
        assert count >= 200
        assert time.monotonic() - g.start < 60


FROZEN_COUNTS = {(0, 3): 1, (0, 4): 4, (1, 1): 2, (1, 2): 5, (2, 0): 7}


def test_criterion_5_enumeration_strategies():
    with _gate(5, "independent moduli enumeration strategies") as g:
        pairs = [
            (gg, n)
            for gg in range(0, 3)
            for n in range(0, 9)
            if 2 * gg - 2 + n > 0 and 3 * gg - 3 + n <= 5
        ]
        assert len(pairs) == 14
        for gg, n in pairs:
            a = enumerate_stable_graphs(gg, n)
            b = enumerate_stable_graphs_direct(gg, n)
            ka = {canonical_key(x) for x in a}
            kb = {canonical_key(x) for x in b}
            assert len(a) == len(ka) and len(b) == len(kb)
            assert ka == kb
            if (gg, n) in FROZEN_COUNTS:
                assert len(a) == FROZEN_COUNTS[(gg, n)]
            # contraction closure
            for gr in a:
                for i in range(len(gr.edges)):
                    assert canonical_key(contract(gr, [i]).target) in ka
        assert time.monotonic() - g.start < 300


def _random_curve(rng, graph, base_monoid):
    hb = base_monoid.hilbert_basis()

    def delta():
        if not hb or rng.random() < 0.3:
            return INF
        return rng.choice(hb)

    return CombLogCurve(
        PointedLogPoint(base_monoid),
        graph.weights,
        tuple((e, delta()) for e in graph.edges),
        graph.legs,
    )


def _inf_count(curve):
    return sum(1 for x in curve.lengths if x is INF)


def test_criterion_6_theorem_squares():
    with _gate(6, "clutch/glue commutes with tropicalization") as g:
        rng = random.Random(20230820)
        bases = [m for m in monoid_corpus(20) if m.rank <= 3]
        assert any(m.rank == 3 for m in bases)
        types = [
            (gg, n)
            for gg in range(0, 3)
            for n in range(0, 8)
            if 2 * gg - 2 + n > 0 and 3 * gg - 3 + n <= 4
        ]
        graphs_by_type = {
            t: enumerate_stable_graphs_direct(*t) for t in types
        }
        with_legs = [t for t in types if t[1] >= 1]
        two_legs = [t for t in types if t[1] >= 2]
        checked = saw_inf = 0
        while checked < 500:
            kind = rng.randrange(5)
            if kind <= 1:  # clutch
                x = _random_curve(
                    rng,
                    rng.choice(graphs_by_type[rng.choice(with_legs)]),
                    rng.choice(bases),
                )
                y = _random_curve(
                    rng,
                    rng.choice(graphs_by_type[rng.choice(with_legs)]),
                    rng.choice(bases),
                )
                r = verify_commutativity(x, y, mode="clutch")
                assert r.ok
                dx = sum(1 for _, d in x.nodes if d is INF)
                dy = sum(1 for _, d in y.nodes if d is INF)
                assert _inf_count(r.log_side) == dx + dy + 1
                assert _inf_count(r.trop_side) == dx + dy + 1
                saw_inf += dx + dy
            elif kind <= 3:  # self-glue
                x = _random_curve(
                    rng,
                    rng.choice(graphs_by_type[rng.choice(two_legs)]),
                    rng.choice(bases),
                )
                r = verify_commutativity(x, mode="glue")
                assert r.ok
                dx = sum(1 for _, d in x.nodes if d is INF)
                assert _inf_count(r.log_side) == dx + 1
                saw_inf += dx
            else:  # base change through a Rees quotient
                m = rng.choice([b for b in bases if b.rank >= 1])
                x = _random_curve(
                    rng,
                    rng.choice(graphs_by_type[rng.choice(with_legs)]),
                    m,
                )
                fl = faces(m.cone).faces
                f = rees_quotient_by_prime(
                    m, prime_of_face(m, rng.choice(fl))
                )[1]
                r = verify_base_change_square(x, f)
                assert r.ok
            checked += 1
        assert checked >= 500 and saw_inf > 0
        assert time.monotonic() - g.start < 300


def _run_cli(argv, cache):
    out, err = io.StringIO(), io.StringIO()
    old = os.environ.get("TROPATLAS_CACHE")
    os.environ["TROPATLAS_CACHE"] = cache
    try:
        with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
            code = cli_main(argv)
    finally:
        if old is None:
            os.environ.pop("TROPATLAS_CACHE", None)
        else:
            os.environ["TROPATLAS_CACHE"] = old
    return code, out.getvalue(), err.getvalue()


def test_criterion_7_cli_determinism(tmp_path):
    with _gate(7, "CLI byte-determinism and exit codes"):
        from tropatlas import serialize as ser
        from tropatlas.complexes import fan_complex_with_rays

        def write(name, obj):
            p = tmp_path / name
            p.write_text(json.dumps(obj))
            return str(p)

        orthant = {"rank": 2, "rays": [[1, 0], [0, 1]]}
        monoid = {"cone": {"rank": 1, "rays": [[1]]}, "hilbert_basis": [[1]]}
        mor = {
            "source": {"rank": 1, "rays": [[1]]},
            "target": {"rank": 2, "rays": [[1, 0], [0, 1]]},
            "kernel_face": [],
            "matrix": [[1], [2]],
        }
        ident = {
            "source": {"rank": 1, "rays": [[1]]},
            "target": {"rank": 1, "rays": [[1]]},
            "kernel_face": [],
            "matrix": [[2]],
        }
        ext = {
            "source": {"rank": 1, "rays": [[1]]},
            "target": {"rank": 1, "rays": [[1]]},
            "target_face": [],
            "map": [[1]],
        }
        curve = {
            "base": {"cone": {"rank": 1, "rays": [[1]]}},
            "components": [{"genus": 0}, {"genus": 0}],
            "nodes": [{"ends": [0, 1], "delta": [1]}],
            "markings": [0, 0, 1, 1],
        }
        cx, _ = fan_complex_with_rays([Cone(2, ((0, 1), (1, 0)))])
        runs = [
            ["dualize", write("cone.json", orthant)],
            ["dualize", write("monoid.json", monoid)],
            ["faces", write("cone2.json", orthant)],
            ["quotient", write("cone3.json", orthant), "--face", "0"],
            ["factorize", write("mor.json", mor)],
            ["factorize", write("ext.json", ext)],
            ["compose", write("id1.json", ident), write("id2.json", ident)],
            ["pushout", write("idp.json", ident), write("idq.json", ident)],
            ["fiberproduct", write("e1.json", ext), write("e2.json", ext)],
            [
                "star",
                write("cx.json", ser.complex_to_json(cx)),
                "--cell",
                "1",
            ],
            ["enumerate", "1", "1", "--count"],
            ["enumerate", "0", "4"],
            ["clutch", write("c1.json", curve), write("c2.json", curve)],
            ["glue", write("c3.json", curve)],
            ["trop", write("c4.json", curve)],
            ["trop", write("c5.json", curve), "--format", "dot"],
            ["basechange", write("c6.json", curve), write("f.json", ident)],
            ["verify-square", "--mode", "clutch", write("c7.json", curve), write("c8.json", curve)],
            ["verify-square", "--mode", "glue", write("c9.json", curve)],
        ]
        cache = str(tmp_path / "cache")
        for argv in runs:
            cold = _run_cli(argv, cache)
            warm = _run_cli(argv, cache)
            assert cold[0] == 0, argv
            assert cold == warm, argv
        # exit-code contract
        bad = tmp_path / "bad.json"
        bad.write_text("{nope")
        assert _run_cli(["dualize", str(bad)], cache)[0] == 1
        corrupted = {
            "curve": curve,
            "trop": {
                "graph": {
                    "vertices": [{"h": 0}, {"h": 0}],
                    "edges": [[0, 1]],
                    "legs": [
                        {"mark": 1, "vertex": 0},
                        {"mark": 2, "vertex": 0},
                        {"mark": 3, "vertex": 1},
                        {"mark": 4, "vertex": 1},
                    ],
                },
                "base": {"rank": 1, "rays": [[1]]},
                "lengths": [[7]],
            },
        }
        sq = write("sq.json", corrupted)
        c2 = _run_cli(["verify-square", "--mode", "glue", sq], cache)
        assert c2[0] == 2 and not json.loads(c2[1])["ok"]
