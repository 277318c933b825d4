"""Rational polyhedral cones: duals, face lattices, quotients, morphisms.

A Cone is given by its extremal primitive rays inside a fixed lattice
Z^rank, plus an optional lineality basis (needed because the dual of a
non-full-dimensional cone is not strictly convex).  Equality of cones is
equality of canonical ray/lineality data in the same lattice.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .linalg import (
    Mat,
    Vec,
    coset_reduce,
    dot,
    hnf,
    identity_matrix,
    is_zero_vec,
    kernel_basis,
    lattice_rank,
    mat_vec,
    primitive,
    solve_int,
    transpose,
)


@dataclass(frozen=True)
class Cone:
    rank: int
    rays: Mat = ()
    lineality: Mat = ()  # HNF basis rows of the lineality space, () if strictly convex

    def __post_init__(self):
        for r in self.rays:
            assert len(r) == self.rank and not is_zero_vec(r)
        for l in self.lineality:
            assert len(l) == self.rank
        object.__setattr__(self, "rays", tuple(sorted(self.rays)))

    @property
    def is_strictly_convex(self) -> bool:
        return not self.lineality

    def dim(self) -> int:
        return lattice_rank(tuple(self.rays) + tuple(self.lineality))

    def contains(self, x) -> bool:
        d = dual_cone(self)
        return all(dot(m, x) >= 0 for m in d.rays) and all(
            dot(m, x) == 0 for m in d.lineality
        )


def zero_cone(rank: int) -> Cone:
    return Cone(rank, (), ())


def _dual_raw(rank: int, rays: Mat, lineality: Mat) -> Cone:
    """Dual of cone(rays) + span(lineality), by facet enumeration.

    Candidate dual rays are generators of rank-(dl+1) annihilator
    lattices of ray subsets; a candidate survives if it is nonnegative
    on every ray.  Desk scale: 2^|rays| subsets.
    """
    n = rank
    dual_lin = kernel_basis(tuple(rays) + tuple(lineality), cols=n)
    dl = len(dual_lin)
    proj = kernel_basis(dual_lin, cols=n) if dual_lin else identity_matrix(n)
    found = {}
    nr = len(rays)
    for mask in range(1 << nr):
        s = tuple(rays[i] for i in range(nr) if mask >> i & 1)
        w = kernel_basis(s + tuple(lineality), cols=n)
        if len(w) != dl + 1:
            continue
        # primitive generator of the rank-1 image lattice proj(W)
        imgs = tuple(mat_vec(proj, wr) for wr in w)
        h, u = hnf(imgs)
        v = h[0]
        assert not is_zero_vec(v) and all(is_zero_vec(r) for r in h[1:])
        c = u[0]  # v = sum c_i * imgs_i
        g = tuple(sum(ci * wr[j] for ci, wr in zip(c, w)) for j in range(n))
        g = coset_reduce(g, dual_lin)
        pair = [dot(g, r) for r in rays]
        if all(p >= 0 for p in pair):
            pass
        elif all(p <= 0 for p in pair):
            g = coset_reduce(tuple(-x for x in g), dual_lin)
        else:
            continue
        if is_zero_vec(g):
            continue
        # any candidate that lies in the dual is automatically extremal:
        # its tight constraints cut out a rank-(dl+1) wall by construction
        found[g] = True
    return Cone(n, tuple(sorted(primitive(g) for g in found)), dual_lin)


@lru_cache(maxsize=None)
def dual_cone(c: Cone) -> Cone:
    return _dual_raw(c.rank, c.rays, c.lineality)


def cone_from_rays(rank: int, gens) -> Cone:
    """Canonical strictly convex cone from an arbitrary generating set."""
    gens = tuple(
        sorted({primitive(tuple(g)) for g in gens if not is_zero_vec(tuple(g))})
    )
    d = _dual_raw(rank, gens, ())
    if d.dim() != rank:
        raise ValueError("generators span a nontrivial linear subspace")
    normals = tuple(d.rays) + tuple(d.lineality)
    extremal = []
    for g in gens:
        zero_on = tuple(m for m in normals if dot(m, g) == 0)
        # extremal iff the tight normals cut out a 1-dimensional wall
        if len(kernel_basis(zero_on, cols=rank)) == 1:
            extremal.append(g)
    return Cone(rank, tuple(sorted(extremal)), ())


@dataclass(frozen=True)
class FaceLattice:
    cone: Cone
    faces: tuple  # sorted tuple of frozensets of ray indices
    order: tuple = field(default=())  # pairs (i, j) with faces[i] < faces[j]

    def __contains__(self, fs) -> bool:
        return frozenset(fs) in set(self.faces)


@lru_cache(maxsize=None)
def faces(c: Cone) -> FaceLattice:
    assert c.is_strictly_convex, "face lattice needs a strictly convex cone"
    d = dual_cone(c)
    n = len(c.rays)
    full = frozenset(range(n))
    facets = [
        frozenset(i for i in range(n) if dot(m, c.rays[i]) == 0) for m in d.rays
    ]
    found = {full}
    frontier = [full]
    while frontier:
        f = frontier.pop()
        for ft in facets:
            g = f & ft
            if g not in found:
                found.add(g)
                frontier.append(g)
    ordered = tuple(sorted(found, key=lambda s: (len(s), sorted(s))))
    idx = {f: i for i, f in enumerate(ordered)}
    order = tuple(
        (idx[a], idx[b]) for a in ordered for b in ordered if a < b
    )
    return FaceLattice(c, ordered, order)


def smallest_face_containing(c: Cone, pts) -> frozenset:
    d = dual_cone(c)
    for p in pts:
        if not c.contains(p):
            raise ValueError("point outside cone")
    normals0 = [m for m in d.rays if all(dot(m, p) == 0 for p in pts)]
    return frozenset(
        i
        for i in range(len(c.rays))
        if all(dot(m, c.rays[i]) == 0 for m in normals0)
    )


def face_join(c: Cone, t1, t2) -> frozenset:
    pts = [c.rays[i] for i in sorted(t1)] + [c.rays[i] for i in sorted(t2)]
    return smallest_face_containing(c, pts)


@lru_cache(maxsize=None)
def face_perp_basis(c: Cone, face: frozenset) -> Mat:
    """HNF basis (rows, as covectors) of the saturated lattice of
    functionals vanishing on the face spanned by the given rays.

    Doubles as the projection matrix of the cone quotient: its kernel is
    the saturated span of the face, and it is surjective onto Z^(n-d).
    """
    rows = tuple(c.rays[i] for i in sorted(face))
    return kernel_basis(rows, cols=c.rank)


def quotient_cone(c: Cone, face: frozenset) -> tuple[Cone, Mat]:
    """Cone quotient sigma/tau with its projection matrix."""
    if face not in faces(c):
        raise ValueError("not a face of the cone")
    proj = face_perp_basis(c, frozenset(face))
    imgs = [mat_vec(proj, r) for r in c.rays]
    q = cone_from_rays(len(proj), [v for v in imgs if not is_zero_vec(v)])
    return q, proj


def quotient_face(c: Cone, face: frozenset, superface: frozenset) -> frozenset:
    """Image in sigma/face of a face of sigma containing `face`."""
    assert frozenset(face) <= frozenset(superface)
    q, proj = quotient_cone(c, face)
    imgs = [mat_vec(proj, c.rays[i]) for i in sorted(superface)]
    return smallest_face_containing(q, [v for v in imgs if not is_zero_vec(v)])


def face_lattice_interval(c: Cone, face: frozenset):
    """Faces of c containing `face`, i.e. the interval [face, c]."""
    return [f for f in faces(c).faces if frozenset(face) <= f]


@dataclass(frozen=True)
class ConeMorphism:
    source: Cone
    target: Cone
    matrix: Mat  # target.rank x source.rank

    def __post_init__(self):
        assert len(self.matrix) == self.target.rank
        assert all(len(r) == self.source.rank for r in self.matrix)
        for r in self.source.rays:
            if not self.target.contains(mat_vec(self.matrix, r)):
                raise ValueError("ray image leaves the target cone")
        for l in self.source.lineality:
            img = mat_vec(self.matrix, l)
            neg = tuple(-x for x in img)
            if not (self.target.contains(img) and self.target.contains(neg)):
                raise ValueError("lineality image leaves the target cone")

    def apply(self, x):
        return mat_vec(self.matrix, x)


def identity_morphism(c: Cone) -> ConeMorphism:
    return ConeMorphism(c, c, identity_matrix(c.rank))


def compose_cone_morphisms(f: ConeMorphism, g: ConeMorphism) -> ConeMorphism:
    assert f.target == g.source
    from .linalg import mat_mul

    return ConeMorphism(f.source, g.target, mat_mul(g.matrix, f.matrix))


def section_of_projection(proj: Mat, rank: int) -> Mat:
    """Integer right inverse of a surjective projection (rank x len(proj))."""
    cols = []
    k = len(proj)
    for i in range(k):
        e = tuple(1 if j == i else 0 for j in range(k))
        s = solve_int(proj, e, cols=rank)
        assert s is not None, "projection not surjective"
        cols.append(s)
    return transpose(tuple(cols))
