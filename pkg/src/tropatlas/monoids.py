"""Pointed toric monoids S_sigma with an absorbing element.

The monoid attached to a strictly convex cone sigma in N = Z^n is
S_sigma = dual(sigma) cap M; its pointification adjoins an absorbing
element INF.  Faces of sigma correspond to prime ideals of S_sigma, and
morphisms of pointed monoids are stored in factored form: a kernel face
tau (whose prime is the preimage of INF) together with an integer matrix
acting on coordinates in the canonical basis of the tau-perp lattice.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product

from .cones import (
    Cone,
    cone_from_rays,
    dual_cone,
    face_join,
    face_perp_basis,
    faces,
    quotient_cone,
)
from .linalg import (
    Mat,
    Vec,
    coset_reduce,
    dot,
    is_zero_vec,
    kernel_basis,
    mat_vec,
    solve_int,
    transpose,
)


class _Inf:
    """The absorbing element of a pointed monoid."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "inf"


INF = _Inf()


def _hb_core(d: Cone) -> tuple:
    """Hilbert basis of a pointed full-dimensional cone d (its own
    lattice points, not the dual's).

    Every irreducible element lies in the zonotope of the extremal rays,
    so a box search suffices at desk scale; minimality by greedy height
    order against the basis found so far.
    """
    k = d.rank
    if k == 0 or not d.rays:
        return ()
    assert not dual_cone(d).lineality, "cone must be full-dimensional"
    primal = dual_cone(d).rays

    def member(x):
        return all(dot(x, p) >= 0 for p in primal)

    los = [sum(min(r[j], 0) for r in d.rays) for j in range(k)]
    his = [sum(max(r[j], 0) for r in d.rays) for j in range(k)]
    pool = [
        x
        for x in product(*(range(lo, hi + 1) for lo, hi in zip(los, his)))
        if not is_zero_vec(x) and member(x)
    ]
    pool.sort(key=lambda x: (sum(dot(x, p) for p in primal), x))
    basis = []
    for x in pool:
        reducible = False
        for h in basis:
            if member(tuple(a - b for a, b in zip(x, h))):
                reducible = True
                break
        if not reducible:
            basis.append(x)
    return tuple(basis)


@lru_cache(maxsize=None)
def hilbert_basis(c: Cone) -> tuple:
    """Generators of S_sigma = dual(c) cap M.

    For full-dimensional c this is the unique minimal Hilbert basis; for
    lower-dimensional c the dual has lineality and the result appends a
    lineality basis with both signs.
    """
    assert c.is_strictly_convex
    d = dual_cone(c)
    if not d.lineality:
        return _hb_core(d)
    lin = d.lineality
    n = c.rank
    proj = kernel_basis(lin, cols=n)
    imgs = [mat_vec(proj, r) for r in d.rays]
    gens: list = []
    if imgs:
        dp = cone_from_rays(len(proj), imgs)
        for b in _hb_core(dp):
            x = solve_int(proj, b, cols=n)
            assert x is not None
            gens.append(coset_reduce(x, lin))
    for l in lin:
        gens.append(tuple(l))
        gens.append(tuple(-a for a in l))
    return tuple(gens)


@dataclass(frozen=True)
class ToricMonoid:
    cone: Cone

    @property
    def rank(self) -> int:
        return self.cone.rank

    def hilbert_basis(self) -> tuple:
        return hilbert_basis(self.cone)

    def contains(self, x) -> bool:
        # membership in dual(cone): nonnegative against every ray
        return len(x) == self.rank and all(dot(x, r) >= 0 for r in self.cone.rays)


@dataclass(frozen=True)
class PointedToricMonoid:
    base: ToricMonoid

    @property
    def cone(self) -> Cone:
        return self.base.cone

    @property
    def rank(self) -> int:
        return self.base.rank

    def hilbert_basis(self) -> tuple:
        return self.base.hilbert_basis()

    def contains(self, x) -> bool:
        return x is INF or self.base.contains(x)

    def zero(self) -> Vec:
        return tuple(0 for _ in range(self.rank))

    def add(self, x, y):
        if x is INF or y is INF:
            return INF
        return tuple(a + b for a, b in zip(x, y))


def pointed(c: Cone) -> PointedToricMonoid:
    return PointedToricMonoid(ToricMonoid(c))


def in_face_perp(c: Cone, face, x) -> bool:
    """Does x annihilate the face spanned by the given rays?"""
    return all(dot(x, c.rays[i]) == 0 for i in face)


@dataclass(frozen=True)
class PrimeIdeal:
    monoid: PointedToricMonoid
    face: frozenset

    def __post_init__(self):
        assert self.face in faces(self.monoid.cone)

    def contains(self, x) -> bool:
        if x is INF:
            return True
        assert self.monoid.contains(x)
        return not in_face_perp(self.monoid.cone, self.face, x)


def prime_of_face(m: PointedToricMonoid, face) -> PrimeIdeal:
    return PrimeIdeal(m, frozenset(face))


def face_of_prime(p: PrimeIdeal) -> frozenset:
    return p.face


@dataclass(frozen=True)
class MonomialIdeal:
    monoid: PointedToricMonoid
    generators: tuple  # minimal antichain, sorted

    @staticmethod
    def from_gens(m: PointedToricMonoid, gens) -> "MonomialIdeal":
        gens = sorted({tuple(g) for g in gens if g is not INF})
        for g in gens:
            assert m.contains(g) and not is_zero_vec(g)
        minimal = []
        for g in gens:
            if not any(
                h != g and m.base.contains(tuple(a - b for a, b in zip(g, h)))
                for h in gens
            ):
                minimal.append(g)
        return MonomialIdeal(m, tuple(minimal))

    def contains(self, x) -> bool:
        if x is INF:
            return True
        if not self.monoid.contains(x):
            raise ValueError("element outside the monoid")
        return any(
            self.monoid.base.contains(tuple(a - b for a, b in zip(x, g)))
            for g in self.generators
        )


def ideal_of_prime(p: PrimeIdeal) -> MonomialIdeal:
    gens = [
        h
        for h in p.monoid.hilbert_basis()
        if not in_face_perp(p.monoid.cone, p.face, h)
    ]
    return MonomialIdeal.from_gens(p.monoid, gens)


def prime_closure(i: MonomialIdeal) -> PrimeIdeal:
    """Smallest prime containing i, by our convention the prime of the
    join of the minimal faces tau such that no generator kills tau."""
    c = i.monoid.cone
    if not i.generators:
        return PrimeIdeal(i.monoid, frozenset())
    avoiding = [
        f
        for f in faces(c).faces
        if all(not in_face_perp(c, f, g) for g in i.generators)
    ]
    minimal = [
        f for f in avoiding if not any(g < f for g in avoiding)
    ]
    join = frozenset()
    for f in minimal:
        join = face_join(c, join, f)
    return PrimeIdeal(i.monoid, join)


@dataclass(frozen=True)
class PointedMorphism:
    """Morphism of pointed toric monoids, stored factored.

    kernel_face is the face tau of the source cone whose prime is the
    preimage of INF; matrix maps coordinates in the canonical basis of
    the tau-perp lattice (rows of face_perp_basis) to the target lattice.
    """

    source: PointedToricMonoid
    target: PointedToricMonoid
    kernel_face: frozenset
    matrix: Mat  # target.rank x len(perp basis)

    def __post_init__(self):
        assert self.kernel_face in faces(self.source.cone)
        b = self.perp_basis()
        assert len(self.matrix) == self.target.rank
        assert all(len(r) == len(b) for r in self.matrix)
        for h in self.source.hilbert_basis():
            y = self.apply(h)
            if y is not INF and not self.target.contains(y):
                raise ValueError("image of a generator leaves the target monoid")

    def perp_basis(self) -> Mat:
        return face_perp_basis(self.source.cone, self.kernel_face)

    def coords(self, x) -> Vec:
        """Coordinates of x (in the kernel-face perp lattice) in the
        canonical basis."""
        b = self.perp_basis()
        c = solve_int(transpose(b), x, cols=len(b))
        assert c is not None, "element not in the perp lattice"
        return c

    def apply(self, x):
        if x is INF:
            return INF
        assert self.source.contains(x)
        if not in_face_perp(self.source.cone, self.kernel_face, x):
            return INF
        return mat_vec(self.matrix, self.coords(x))

    def apply_linear(self, x):
        """Linear extension to the full perp lattice (x need not lie in
        the monoid)."""
        return mat_vec(self.matrix, self.coords(x))

    @property
    def is_toric(self) -> bool:
        return not self.kernel_face


def identity_pointed(m: PointedToricMonoid) -> PointedMorphism:
    from .linalg import identity_matrix

    return PointedMorphism(m, m, frozenset(), identity_matrix(m.rank))


def _face_of_finite_pattern(m: PointedToricMonoid, finite: frozenset) -> frozenset:
    """The face tau of the cone with tau-perp cap HB = `finite`."""
    c = m.cone
    hb = m.hilbert_basis()
    for f in faces(c).faces:
        if frozenset(h for h in hb if in_face_perp(c, f, h)) == finite:
            return f
    raise ValueError("finite set of a morphism is not a face pattern")


def morphism_from_function(
    src: PointedToricMonoid, dst: PointedToricMonoid, fn
) -> PointedMorphism:
    """Reconstruct the stored form of a morphism from its element-wise
    action on the Hilbert basis.  fn must be additive where finite."""
    hb = src.hilbert_basis()
    values = {h: fn(h) for h in hb}
    finite = frozenset(h for h in hb if values[h] is not INF)
    tau = _face_of_finite_pattern(src, finite)
    b = face_perp_basis(src.cone, tau)
    k = len(b)
    fin = sorted(finite)
    coords = [solve_int(transpose(b), h, cols=k) for h in fin]
    rows = []
    for r in range(dst.rank):
        rhs = tuple(values[h][r] for h in fin)
        t = solve_int(tuple(coords), rhs, cols=k)
        if t is None:
            raise ValueError("function is not induced by a lattice map")
        rows.append(t)
    f = PointedMorphism(src, dst, tau, tuple(rows))
    for h in hb:
        if f.apply(h) != values[h]:
            raise ValueError("function is not additive on the basis")
    return f


def compose(f: PointedMorphism, g: PointedMorphism) -> PointedMorphism:
    """Element-wise composition g after f, re-factored.

    Deliberately independent of the cone-side composition rule, so the
    two can be checked against each other.
    """
    assert f.target == g.source
    return morphism_from_function(
        f.source, g.target, lambda x: g.apply(f.apply(x))
    )


def rees_quotient_by_prime(
    m: PointedToricMonoid, p: PrimeIdeal
) -> tuple[PointedToricMonoid, PointedMorphism]:
    assert p.monoid == m
    q, proj = quotient_cone(m.cone, p.face)
    target = pointed(q)
    k = len(proj)
    from .linalg import identity_matrix

    # the perp basis of the kernel face is exactly the quotient
    # projection, so the coordinate map is the identity
    return target, PointedMorphism(m, target, p.face, identity_matrix(k))


def factorize_morphism(
    f: PointedMorphism,
) -> tuple[PointedMorphism, PointedMorphism]:
    """Unique factorization f = toric o rees."""
    mid, rees = rees_quotient_by_prime(
        f.source, PrimeIdeal(f.source, f.kernel_face)
    )
    toric = PointedMorphism(mid, f.target, frozenset(), f.matrix)
    return rees, toric


@dataclass(frozen=True)
class RawReesQuotient:
    """Element-wise Rees quotient Q_inf / I, kept only as a diagnostic
    witness; it need not be integral (= the image of a toric monoid)."""

    monoid: PointedToricMonoid
    ideal: MonomialIdeal

    def cls(self, x):
        if x is INF or self.ideal.contains(x):
            return INF
        return tuple(x)

    def add(self, x, y):
        if x is INF or y is INF:
            return INF
        return self.cls(tuple(a + b for a, b in zip(x, y)))

    def is_integral(self) -> bool:
        """Integral iff the ideal is already prime."""
        closure = prime_closure(self.ideal)
        return all(
            self.ideal.contains(h)
            for h in self.monoid.hilbert_basis()
            if closure.contains(h)
        )


@dataclass(frozen=True)
class PushoutResult:
    apex: PointedToricMonoid
    leg_left: PointedMorphism  # from target of f
    leg_right: PointedMorphism  # from target of g
    non_integral_steps: tuple  # RawReesQuotient witnesses that failed integrality
    raw_quotients: tuple  # all RawReesQuotient intermediates


def product_monoid(
    a: PointedToricMonoid, b: PointedToricMonoid
) -> tuple[PointedToricMonoid, PointedMorphism, PointedMorphism]:
    """Product of pointed toric monoids with the two coordinate
    inclusions on the monoid side."""
    na, nb = a.rank, b.rank
    rays = [tuple(r) + (0,) * nb for r in a.cone.rays] + [
        (0,) * na + tuple(r) for r in b.cone.rays
    ]
    c = Cone(na + nb, tuple(rays))
    m = pointed(c)
    inc_a = PointedMorphism(
        a,
        m,
        frozenset(),
        tuple(
            tuple(1 if (i < na and j == i) else 0 for j in range(na))
            for i in range(na + nb)
        ),
    )
    inc_b = PointedMorphism(
        b,
        m,
        frozenset(),
        tuple(
            tuple(1 if (i >= na and j == i - na) else 0 for j in range(nb))
            for i in range(na + nb)
        ),
    )
    return m, inc_a, inc_b


def _pushout_toric(f: PointedMorphism, g: PointedMorphism) -> PushoutResult:
    """Amalgamated sum of toric morphisms: dual of the fiber product of
    the dual cones, taken inside the saturated equalizer lattice."""
    q, qq = f.target, g.target
    nq, nqq = q.rank, qq.rank
    np_ = f.source.rank
    # one equalizer row per source coordinate: F u - G u' = 0 with the
    # dual cone maps F, G the transposes of the stored matrices
    rows = tuple(
        tuple(f.matrix[i][r] for i in range(nq))
        + tuple(-g.matrix[i][r] for i in range(nqq))
        for r in range(np_)
    )
    lat = kernel_basis(rows, cols=nq + nqq)  # basis of {(u,u'): Fu = Gu'}
    s = len(lat)
    # halfspace description of the fiber cone in lat-coordinates
    dq, dqq = dual_cone(q.cone), dual_cone(qq.cone)
    plus = []
    zero = []
    for m in dq.rays:
        plus.append(mat_vec(lat, tuple(m) + (0,) * nqq))
    for m in dq.lineality:
        zero.append(mat_vec(lat, tuple(m) + (0,) * nqq))
    for m in dqq.rays:
        plus.append(mat_vec(lat, (0,) * nq + tuple(m)))
    for m in dqq.lineality:
        zero.append(mat_vec(lat, (0,) * nq + tuple(m)))
    from .cones import _dual_raw
    from .linalg import hnf, primitive

    zh = tuple(r for r in hnf(tuple(zero))[0] if not is_zero_vec(r)) if zero else ()
    fiber = _dual_raw(
        s, tuple(primitive(p) for p in plus if not is_zero_vec(p)), zh
    )
    assert not fiber.lineality, "fiber cone of strictly convex cones is pointed"
    apex = pointed(fiber)
    # monoid legs are the column blocks of the kernel basis (s x n each)
    leg_l = PointedMorphism(q, apex, frozenset(), tuple(r[:nq] for r in lat))
    leg_r = PointedMorphism(qq, apex, frozenset(), tuple(r[nq:] for r in lat))
    return PushoutResult(apex, leg_l, leg_r, (), ())


def pushout(f: PointedMorphism, g: PointedMorphism) -> PushoutResult:
    """Pushout of f: P -> Q and g: P -> Q' in the pointed toric category.

    Non-toric legs are peeled off one Rees quotient at a time; each peel
    pushes an ideal into the other side and reflects it into the toric
    category by prime closure, recording a diagnostic witness whenever
    the raw Rees quotient fails to be integral.
    """
    assert f.source == g.source
    if f.is_toric and g.is_toric:
        return _pushout_toric(f, g)
    if g.is_toric:
        sw = pushout(g, f)
        return PushoutResult(
            sw.apex, sw.leg_right, sw.leg_left, sw.non_integral_steps, sw.raw_quotients
        )
    # peel the Rees part of g
    p = f.source
    qmon = f.target
    mid, rees_g = rees_quotient_by_prime(p, PrimeIdeal(p, g.kernel_face))
    toric_g = PointedMorphism(mid, g.target, frozenset(), g.matrix)
    # ideal generated in Q by the f-images of the prime of g
    gens = [
        f.apply(h)
        for h in p.hilbert_basis()
        if not in_face_perp(p.cone, g.kernel_face, h)
    ]
    if any(x is not INF and is_zero_vec(x) for x in gens):
        # a unit of Q would be forced to infinity; no target with
        # 0 != inf can receive such a cocone, so there is no pushout
        raise ValueError("pushout does not exist: a unit is forced to infinity")
    ideal = MonomialIdeal.from_gens(qmon, [x for x in gens if x is not INF])
    raw = RawReesQuotient(qmon, ideal)
    closure = prime_closure(ideal)
    qred, rees_q = rees_quotient_by_prime(qmon, closure)
    # descend f through the two quotients
    bb = face_perp_basis(p.cone, g.kernel_face)

    def descended(x):
        lifted = tuple(
            sum(bb[i][j] * x[i] for i in range(len(bb))) for j in range(p.rank)
        )
        return rees_q.apply(f.apply(lifted))

    d = morphism_from_function(mid, qred, descended)
    inner = pushout(d, toric_g)
    flags = inner.non_integral_steps
    if not raw.is_integral():
        flags = flags + (raw,)
    return PushoutResult(
        inner.apex,
        compose(rees_q, inner.leg_left),
        inner.leg_right,
        flags,
        inner.raw_quotients + (raw,),
    )
