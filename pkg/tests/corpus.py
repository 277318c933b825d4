"""Deterministic test corpus: cones of ranks 1-4, simplicial and not.

Everything is seeded; the corpus is identical across runs so frozen
oracle values stay valid.
"""

import random

from tropatlas.cones import Cone, cone_from_rays
from tropatlas.linalg import identity_matrix, mat_vec

ORTHANTS = [Cone(n, identity_matrix(n)) for n in range(1, 5)]

CONE_OVER_SQUARE = cone_from_rays(
    3, [(1, 1, 1), (1, -1, 1), (-1, 1, 1), (-1, -1, 1)]
)

NAMED = ORTHANTS + [
    cone_from_rays(2, [(1, 0), (1, 2)]),
    cone_from_rays(2, [(0, 1), (2, -1)]),
    cone_from_rays(2, [(1, 0), (0, 1), (1, 1)]),  # redundant generator
    CONE_OVER_SQUARE,
    cone_from_rays(3, [(1, 0, 0), (1, 2, 0), (1, 0, 3), (1, 1, 1)]),
    cone_from_rays(4, [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (1, 1, 1, 2)]),
    # non-full-dimensional
    cone_from_rays(2, [(1, 0)]),
    cone_from_rays(3, [(1, 1, 0), (1, 0, 1)]),
    Cone(3, ()),  # zero cone
]


def random_unimodular(rng, n, steps=4):
    m = [list(r) for r in identity_matrix(n)]
    for _ in range(steps):
        i, j = rng.sample(range(n), 2) if n > 1 else (0, 0)
        if i == j:
            continue
        q = rng.choice([-1, 1])
        for k in range(n):
            m[i][k] += q * m[j][k]
    return tuple(tuple(r) for r in m)


def random_cone(rng, rank=None):
    n = rank if rank is not None else rng.randint(1, 4)
    k = rng.randint(1, n + 2)
    gens = set()
    while len(gens) < k:
        v = tuple(rng.randint(0, 3) for _ in range(n))
        if any(v):
            gens.add(v)
    u = random_unimodular(rng, n)
    return cone_from_rays(n, [mat_vec(u, g) for g in gens])


def corpus_cones(count=60, seed=20230817):
    rng = random.Random(seed)
    cones = list(NAMED)
    # guarantee each rank appears
    for n in range(1, 5):
        cones.append(random_cone(rng, rank=n))
    while len(cones) < count:
        cones.append(random_cone(rng))
    return cones


def strictly_convex_corpus(count=60, seed=20230817):
    return [c for c in corpus_cones(count, seed) if c.is_strictly_convex]


def _box_volume(c):
    """Rough cost of a Hilbert-basis search on dual(c)."""
    from tropatlas.cones import dual_cone

    d = dual_cone(c)
    if not d.rays:
        return 1
    vol = 1
    for j in range(d.rank):
        lo = sum(min(r[j], 0) for r in d.rays)
        hi = sum(max(r[j], 0) for r in d.rays)
        vol *= hi - lo + 1
    return vol


def tame_cones(count=30, seed=20230817):
    """Cones whose monoids are cheap to work with element-wise."""
    out = []
    for c in corpus_cones(count=120, seed=seed):
        if c.rank <= 3 and _box_volume(c) <= 40000:
            out.append(c)
        elif c.rank == 4 and _box_volume(c) <= 2000:
            out.append(c)
        if len(out) >= count:
            break
    return out


def monoid_corpus(count=20, seed=20230817):
    from tropatlas.monoids import pointed

    return [pointed(c) for c in tame_cones(count, seed)]


def random_pointed_morphism(rng, src, dst):
    """Random morphism of pointed monoids src -> dst.

    Built on the cone side: pick a kernel face tau of the source cone,
    then a cone map target-cone -> source-cone/tau as (nonnegative
    combinations of quotient rays) composed with the facet-normal
    embedding of the target cone into an orthant.
    """
    from tropatlas.cones import dual_cone, faces, quotient_cone
    from tropatlas.linalg import mat_mul, transpose
    from tropatlas.monoids import PointedMorphism

    fl = faces(src.cone).faces
    tau = rng.choice(fl)
    q, _ = quotient_cone(src.cone, tau)
    k = q.rank
    normals = dual_cone(dst.cone).rays
    t = len(normals)
    cols = []
    for _ in range(t):
        col = [0] * k
        for r in q.rays:
            c = rng.choice([0, 0, 1, 1, 2])
            for j in range(k):
                col[j] += c * r[j]
        cols.append(tuple(col))
    if k == 0:
        return PointedMorphism(src, dst, tau, tuple(() for _ in range(dst.rank)))
    cmat = transpose(tuple(cols))
    amat = mat_mul(cmat, tuple(normals)) if t else tuple((0,) * dst.rank for _ in range(k))
    return PointedMorphism(src, dst, tau, transpose(amat))


def morphism_corpus(count=220, seed=20230818):
    """Deterministic corpus of pointed morphisms between tame monoids."""
    rng = random.Random(seed)
    monoids = monoid_corpus()
    out = []
    while len(out) < count:
        src = rng.choice(monoids)
        dst = rng.choice(monoids)
        out.append(random_pointed_morphism(rng, src, dst))
    return out


def composable_pairs(count=220, seed=20230819):
    rng = random.Random(seed)
    monoids = monoid_corpus()
    out = []
    while len(out) < count:
        a, b, c = (rng.choice(monoids) for _ in range(3))
        f = random_pointed_morphism(rng, a, b)
        g = random_pointed_morphism(rng, b, c)
        out.append((f, g))
    return out
