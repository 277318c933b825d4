"""Extended cones: canonical compactifications, strata, morphisms as
(face at infinity, cone map) pairs, composition, and the contravariant
duality with pointed toric monoids.

A point of the compactification of sigma is stored as a stratum face tau
plus finite rational coordinates in sigma/tau; an extended morphism is a
pair (target face tau', lattice map source -> target/tau').
"""

from __future__ import annotations

from dataclasses import dataclass

from .cones import (
    Cone,
    ConeMorphism,
    face_lattice_interval,
    faces,
    quotient_cone,
    quotient_face,
    smallest_face_containing,
)
from .linalg import Mat, identity_matrix, mat_vec, solve_int, transpose
from .monoids import PointedMorphism, pointed, pushout


@dataclass(frozen=True)
class ExtendedCone:
    base: Cone


@dataclass(frozen=True)
class ExtendedPoint:
    base: Cone
    stratum_face: frozenset
    coords: tuple  # rational point of base/stratum_face

    def __post_init__(self):
        q, _ = quotient_cone(self.base, self.stratum_face)
        assert len(self.coords) == q.rank
        assert q.contains(self.coords), "coordinates outside the stratum cone"


def strata(e: ExtendedCone):
    """One stratum (face, quotient cone) per face of the base."""
    return [
        (f, quotient_cone(e.base, f)[0]) for f in faces(e.base).faces
    ]


@dataclass(frozen=True)
class ExtConeMorphism:
    source: Cone
    target: Cone
    target_face: frozenset
    matrix: Mat  # quotient_rank(target/target_face) x source.rank

    def __post_init__(self):
        q, _ = quotient_cone(self.target, self.target_face)
        # raises if some source ray leaves the quotient cone
        ConeMorphism(self.source, q, self.matrix)

    @property
    def is_toric(self) -> bool:
        return not self.target_face


def identity_ext(c: Cone) -> ExtConeMorphism:
    return ExtConeMorphism(c, c, frozenset(), identity_matrix(c.rank))


def stratum_inclusion(c: Cone, face) -> ExtConeMorphism:
    """The canonical inclusion of the extended face at infinity."""
    q, _ = quotient_cone(c, frozenset(face))
    return ExtConeMorphism(q, c, frozenset(face), identity_matrix(q.rank))


def _face_above(c: Cone, base_face: frozenset, qface: frozenset) -> frozenset:
    """The face of c containing base_face whose quotient image is qface."""
    for f in face_lattice_interval(c, base_face):
        if quotient_face(c, base_face, f) == qface:
            return f
    raise ValueError("no face above the given quotient face")


def _mm(a: Mat, b: Mat, cols: int) -> Mat:
    """a @ b where b is explicitly len(b) x cols (dimension-safe when the
    inner dimension is zero)."""
    return tuple(
        tuple(sum(row[k] * b[k][j] for k in range(len(b))) for j in range(cols))
        for row in a
    )


def _factor_through(proj: Mat, m: Mat, cols: int) -> Mat:
    """Solve h @ proj = m over the integers (proj a saturated basis)."""
    k = len(proj)
    pt = transpose(proj) if proj else tuple(() for _ in range(cols))
    rows = []
    for r in m:
        x = solve_int(pt, r, cols=k)
        assert x is not None, "matrix does not factor through the projection"
        rows.append(x)
    return tuple(rows)


def compose_ext(f: ExtConeMorphism, g: ExtConeMorphism) -> ExtConeMorphism:
    """g after f; the result lands in the smallest face of g's target
    containing g's face at infinity and the g-image of f's face."""
    assert f.target == g.source
    tau, a = f.target_face, f.matrix
    ups, b = g.target_face, g.matrix
    c3 = g.target
    q3, p_ups = quotient_cone(c3, ups)
    images = [mat_vec(b, g.source.rays[i]) for i in sorted(tau)]
    omega_q = smallest_face_containing(q3, images)
    omega = _face_above(c3, ups, omega_q)
    _, p_omega = quotient_cone(c3, omega)
    r = _factor_through(p_ups, p_omega, c3.rank)
    rb = _mm(r, b, g.source.rank)
    _, p_tau = quotient_cone(f.target, tau)
    h = _factor_through(p_tau, rb, f.target.rank)
    return ExtConeMorphism(f.source, c3, omega, _mm(h, a, f.source.rank))


def evaluate(f: ExtConeMorphism, p: ExtendedPoint) -> ExtendedPoint:
    """Image of a point; the image stratum is independent of the finite
    coordinates and the finite part descends linearly."""
    assert p.base == f.source
    q2, p_tp = quotient_cone(f.target, f.target_face)
    images = [mat_vec(f.matrix, f.source.rays[i]) for i in sorted(p.stratum_face)]
    omega_q = smallest_face_containing(q2, images)
    omega = _face_above(f.target, f.target_face, omega_q)
    _, p_omega = quotient_cone(f.target, omega)
    r = _factor_through(p_tp, p_omega, f.target.rank)
    ra = _mm(r, f.matrix, f.source.rank)
    _, p_tau = quotient_cone(f.source, p.stratum_face)
    abar = _factor_through(p_tau, ra, f.source.rank)
    return ExtendedPoint(f.target, omega, mat_vec(abar, p.coords))


def point_in_open_part(c: Cone, coords) -> ExtendedPoint:
    return ExtendedPoint(c, frozenset(), tuple(coords))


def _t(m: Mat, rows: int, cols: int) -> Mat:
    """Transpose of an explicitly rows x cols matrix (dimension-safe for
    zero-row or zero-column matrices)."""
    return tuple(tuple(m[r][c] for r in range(rows)) for c in range(cols))


def dualize(m: PointedMorphism) -> ExtConeMorphism:
    """Contravariant duality: a morphism of pointed monoids P -> Q gives
    the extended cone morphism cone(Q) -> cone(P) landing in the kernel
    face at infinity, with the transposed matrix."""
    k = len(m.perp_basis())
    return ExtConeMorphism(
        m.target.cone, m.source.cone, m.kernel_face, _t(m.matrix, m.target.rank, k)
    )


def undualize(e: ExtConeMorphism) -> PointedMorphism:
    src = pointed(e.target)
    dst = pointed(e.source)
    k = len(e.matrix)
    mat = _t(e.matrix, k, dst.rank)
    return PointedMorphism(src, dst, e.target_face, mat)


def factorize_ext(
    f: ExtConeMorphism,
) -> tuple[ExtConeMorphism, ExtConeMorphism]:
    """f = (stratum inclusion) o (toric part); the first leg is the
    identity inclusion exactly when f is already toric."""
    q, _ = quotient_cone(f.target, f.target_face)
    toric = ExtConeMorphism(f.source, q, frozenset(), f.matrix)
    incl = stratum_inclusion(f.target, f.target_face)
    return toric, incl


@dataclass(frozen=True)
class ExtFiberProduct:
    apex: ExtendedCone
    proj_left: ExtConeMorphism
    proj_right: ExtConeMorphism
    non_integral_steps: tuple


def fiber_product_ext(
    f: ExtConeMorphism, g: ExtConeMorphism
) -> ExtFiberProduct:
    """Dual of the pushout of the undualized morphisms."""
    assert f.target == g.target
    po = pushout(undualize(f), undualize(g))
    return ExtFiberProduct(
        ExtendedCone(po.apex.cone),
        dualize(po.leg_left),
        dualize(po.leg_right),
        po.non_integral_steps,
    )
