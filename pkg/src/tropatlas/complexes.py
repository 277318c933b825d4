"""Cone complexes in diagram form: explicit cells plus face maps that
identify a cell with a proper face of another cell.

A complex is a colimit diagram of cones and face inclusions; storing the
diagram instead of the glued point set makes strictness and the toroidal
factorization finite checks. Extended complexes replace every cell by its
canonical compactification; their morphisms carry one extended cone
morphism per cell.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cones import (
    Cone,
    ConeMorphism,
    face_perp_basis,
    faces,
    quotient_cone,
    smallest_face_containing,
)
from .extended import (
    ExtConeMorphism,
    _factor_through,
    _mm,
    compose_ext,
    factorize_ext,
    stratum_inclusion,
)
from .linalg import hnf, identity_matrix, kernel_basis, mat_vec, primitive, solve_int


def _full_face(c: Cone) -> frozenset:
    return frozenset(range(len(c.rays)))


def _saturated_span(rank: int, vectors) -> tuple:
    """HNF basis of the saturation of the span of the given vectors."""
    if not vectors:
        return ()
    return kernel_basis(kernel_basis(tuple(vectors), cols=rank), cols=rank)


def iso_onto_face(src: Cone, dst: Cone, matrix):
    """The face of dst that src maps isomorphically onto, or None.

    Isomorphically means: rays biject with the face's rays and the
    saturated span of src maps unimodularly onto the face's lattice.
    """
    images = [mat_vec(matrix, r) for r in src.rays]
    if not all(dst.contains(x) for x in images):
        return None
    face = smallest_face_containing(dst, images)
    face_rays = {dst.rays[i] for i in face}
    if len(src.rays) != len(face):
        return None
    if {primitive(x) for x in images if any(x)} != face_rays:
        return None
    src_lat = _saturated_span(src.rank, src.rays)
    img = tuple(mat_vec(matrix, b) for b in src_lat)
    img_lat = tuple(r for r in hnf(img)[0] if any(r)) if img else ()
    face_lat = _saturated_span(dst.rank, [dst.rays[i] for i in face])
    if img_lat != face_lat:
        return None
    if len(img_lat) != len(src_lat):
        return None
    return face


@dataclass(frozen=True)
class ConeComplex:
    cells: tuple
    face_maps: tuple  # (src index, dst index, matrix), src iso a proper face of dst

    def __post_init__(self):
        object.__setattr__(self, "cells", tuple(self.cells))
        object.__setattr__(self, "face_maps", tuple(self.face_maps))
        self._validate()

    def _validate(self):
        n = len(self.cells)
        seen_pairs = set()
        image = {}
        for s, d, m in self.face_maps:
            assert 0 <= s < n and 0 <= d < n and s != d
            assert (s, d) not in seen_pairs, "at most one face map per cell pair"
            seen_pairs.add((s, d))
            ConeMorphism(self.cells[s], self.cells[d], m)
            f = iso_onto_face(self.cells[s], self.cells[d], m)
            assert f is not None, "face map is not an isomorphism onto a face"
            assert f != _full_face(self.cells[d]), "face map onto the whole cell"
            image[(s, d)] = (f, m)
        # closed under composition
        for (a, b), (_, m1) in image.items():
            for (b2, c), (_, m2) in image.items():
                if b2 != b:
                    continue
                comp = _mm(m2, m1, self.cells[a].rank)
                assert (a, c) in image and image[(a, c)][1] == comp, (
                    "face maps not closed under composition"
                )
        # every proper face of every cell is the image of exactly one map
        for d, cell in enumerate(self.cells):
            proper = [f for f in faces(cell).faces if f != _full_face(cell)]
            hit = [image[(s, dd)][0] for (s, dd) in image if dd == d]
            assert sorted(hit, key=sorted) == sorted(
                (f for f in proper), key=sorted
            ), "faces of a cell are not in bijection with incoming face maps"

    def face_of_map(self, s, d):
        for ss, dd, m in self.face_maps:
            if (ss, dd) == (s, d):
                return iso_onto_face(self.cells[s], self.cells[d], m), m
        return None

    def cell_of_face(self, d, face):
        """The cell index identified with the given face of cell d."""
        if face == _full_face(self.cells[d]):
            return d
        for s, dd, m in self.face_maps:
            if dd == d and iso_onto_face(self.cells[s], self.cells[d], m) == face:
                return s
        raise ValueError("face is not covered by a cell")


@dataclass(frozen=True)
class ExtendedConeComplex:
    base: ConeComplex


def _coords_in(basis, n: int, v):
    """Coordinates of an ambient vector in a saturated basis (rows)."""
    k = len(basis)
    if k == 0:
        assert all(x == 0 for x in v)
        return ()
    bt = tuple(tuple(basis[i][j] for i in range(k)) for j in range(n))
    x = solve_int(bt, v, cols=k)
    assert x is not None, "vector outside the lattice spanned by the basis"
    return x


def fan_complex_with_rays(cones):
    """Complex of all faces of the given cones in a common lattice.

    Each cell is stored in its intrinsic lattice (the saturated span of
    its rays), so cells are full-dimensional and morphism matrices out of
    them are uniquely determined. Returns (complex, ambient ray sets) with
    the i-th ray set spanning the i-th cell.
    """
    cones = list(cones)
    rank = cones[0].rank
    assert all(c.rank == rank and c.is_strictly_convex for c in cones)
    raysets = []
    for c in cones:
        for f in faces(c).faces:
            rs = tuple(sorted(c.rays[i] for i in f))
            if rs not in raysets:
                raysets.append(rs)
    raysets.sort(key=lambda rs: (len(rs), rs))
    bases = [_saturated_span(rank, rs) for rs in raysets]
    cells = []
    for rs, b in zip(raysets, bases):
        cells.append(
            Cone(len(b), tuple(sorted(_coords_in(b, rank, r) for r in rs)))
        )
    fmaps = []
    for i, (rsa, ba) in enumerate(zip(raysets, bases)):
        for j, (rsb, bb) in enumerate(zip(raysets, bases)):
            if i == j or len(rsa) >= len(rsb) or not set(rsa) <= set(rsb):
                continue
            big = Cone(rank, rsb)
            ff = smallest_face_containing(big, rsa)
            if {big.rays[t] for t in ff} != set(rsa):
                continue
            cols = [_coords_in(bb, rank, row) for row in ba]
            m = tuple(
                tuple(col[t] for col in cols) for t in range(len(bb))
            )
            fmaps.append((i, j, m))
    return ConeComplex(tuple(cells), tuple(fmaps)), raysets


def fan_complex(cones) -> ConeComplex:
    return fan_complex_with_rays(cones)[0]


def _star_data(sigma: int, complex_: ConeComplex):
    """Cells of the star of a cell, as (ambient cell, face) pairs together
    with the quotient complex and its face maps."""
    pairs = [(sigma, _full_face(complex_.cells[sigma]))]
    incl = {sigma: identity_matrix(complex_.cells[sigma].rank)}
    for s, d, m in complex_.face_maps:
        if s == sigma:
            pairs.append((d, iso_onto_face(complex_.cells[s], complex_.cells[d], m)))
            incl[d] = m
    cells = []
    projs = []
    for d, tau in pairs:
        q, proj = quotient_cone(complex_.cells[d], tau)
        cells.append(q)
        projs.append(proj)
    fmaps = []
    for i, (d1, t1) in enumerate(pairs):
        for j, (d2, t2) in enumerate(pairs):
            if i == j:
                continue
            if d1 == sigma:
                found = incl[d2]
            else:
                found = None
                for s, d, n in complex_.face_maps:
                    if s == d1 and d == d2:
                        if _mm(n, incl[d1], complex_.cells[sigma].rank) == incl[d2]:
                            found = n
                        break
            if found is None:
                continue
            pn = _mm(projs[j], found, complex_.cells[d1].rank)
            h = _factor_through(projs[i], pn, complex_.cells[d1].rank)
            fmaps.append((i, j, h))
    return ConeComplex(tuple(cells), tuple(fmaps)), pairs


def star(sigma: int, complex_: ConeComplex) -> ConeComplex:
    """The complex of quotients delta/sigma over cells delta containing
    sigma."""
    return _star_data(sigma, complex_)[0]


@dataclass(frozen=True)
class ComplexMorphism:
    source: ConeComplex
    target: ConeComplex
    assignment: tuple  # per source cell: (target cell index, ExtConeMorphism)

    def __post_init__(self):
        object.__setattr__(self, "assignment", tuple(self.assignment))
        assert len(self.assignment) == len(self.source.cells)
        for c, (t, e) in enumerate(self.assignment):
            assert e.source == self.source.cells[c]
            assert e.target == self.target.cells[t]
        for s, d, m in self.source.face_maps:
            ts, es = self.assignment[s]
            td, ed = self.assignment[d]
            mbar = ExtConeMorphism(
                self.source.cells[s], self.source.cells[d], frozenset(), m
            )
            lhs = compose_ext(mbar, ed)
            if ts == td:
                rhs = es
            else:
                fm = self.target.face_of_map(ts, td)
                assert fm is not None, "assignments do not respect a face map"
                nbar = ExtConeMorphism(
                    self.target.cells[ts], self.target.cells[td], frozenset(), fm[1]
                )
                rhs = compose_ext(es, nbar)
            assert (lhs.target_face, lhs.matrix) == (rhs.target_face, rhs.matrix), (
                "assignments disagree on a shared face"
            )


def identity_complex_morphism(complex_: ConeComplex) -> ComplexMorphism:
    from .extended import identity_ext

    return ComplexMorphism(
        complex_,
        complex_,
        tuple((i, identity_ext(c)) for i, c in enumerate(complex_.cells)),
    )


def extended_star_inclusion(sigma: int, complex_: ConeComplex) -> ComplexMorphism:
    """The inclusion of the extended star of a cell into the extended
    complex, glued from the per-cone stratum inclusions."""
    st, pairs = _star_data(sigma, complex_)
    assignment = tuple(
        (d, stratum_inclusion(complex_.cells[d], tau)) for d, tau in pairs
    )
    return ComplexMorphism(st, complex_, assignment)


def is_strict(f: ComplexMorphism) -> bool:
    """True when every cell maps isomorphically onto a face of its target
    cell without touching the faces at infinity."""
    for c, (t, e) in enumerate(f.assignment):
        if not e.is_toric:
            return False
        if iso_onto_face(f.source.cells[c], f.target.cells[t], e.matrix) is None:
            return False
    return True


def is_toroidal(f: ComplexMorphism) -> bool:
    return all(e.is_toric for _, e in f.assignment)


def factorize_complex(f: ComplexMorphism):
    """Factor f as (star inclusion) after a toroidal morphism into the
    star of the unique cell all per-cell faces at infinity identify.

    Raises ValueError when the per-cell factorizations do not glue.
    """
    gammas = set()
    for c, (t, e) in enumerate(f.assignment):
        try:
            gammas.add(f.target.cell_of_face(t, e.target_face))
        except ValueError:
            raise ValueError("per-cell factorizations do not glue")
    if len(gammas) != 1:
        raise ValueError("per-cell factorizations do not glue")
    gamma = gammas.pop()
    st, pairs = _star_data(gamma, f.target)
    index = {pair: i for i, pair in enumerate(pairs)}
    assignment = []
    for c, (t, e) in enumerate(f.assignment):
        i = index[(t, e.target_face)]
        toric, _ = factorize_ext(e)
        assignment.append(
            (i, ExtConeMorphism(f.source.cells[c], st.cells[i], frozenset(), toric.matrix))
        )
    toroidal = ComplexMorphism(f.source, st, tuple(assignment))
    incl = extended_star_inclusion(gamma, f.target)
    return toroidal, incl


def compose_complex(f: ComplexMorphism, g: ComplexMorphism) -> ComplexMorphism:
    """g after f."""
    assert f.target == g.source
    assignment = []
    for c, (t, e) in enumerate(f.assignment):
        t2, e2 = g.assignment[t]
        assignment.append((t2, compose_ext(e, e2)))
    return ComplexMorphism(f.source, g.target, tuple(assignment))
