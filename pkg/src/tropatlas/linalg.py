"""Exact integer linear algebra: HNF, SNF, kernels, and linear solves.

Matrices are tuples of row tuples of Python ints; vectors are tuples of
ints (or Fractions where noted).  Everything here is exact; there is no
floating point anywhere in the package.
"""

from __future__ import annotations

from math import gcd

Vec = tuple[int, ...]
Mat = tuple[Vec, ...]


def identity_matrix(n: int) -> Mat:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def zero_matrix(rows: int, cols: int) -> Mat:
    return tuple(tuple(0 for _ in range(cols)) for _ in range(rows))


def transpose(m: Mat) -> Mat:
    if not m:
        return ()
    return tuple(zip(*m))


def mat_mul(a: Mat, b: Mat) -> Mat:
    """Matrix product a @ b; inner dimensions must agree."""
    bt = transpose(b)
    inner = len(b)
    assert all(len(r) == inner for r in a), "dimension mismatch"
    return tuple(tuple(sum(x * y for x, y in zip(ra, cb)) for cb in bt) for ra in a)


def mat_vec(m: Mat, v):
    """m @ v; works for int or Fraction entries of v."""
    assert all(len(r) == len(v) for r in m), "dimension mismatch"
    return tuple(sum(x * y for x, y in zip(r, v)) for r in m)


def dot(u, v):
    assert len(u) == len(v)
    return sum(x * y for x, y in zip(u, v))


def vec_gcd(v: Vec) -> int:
    g = 0
    for x in v:
        g = gcd(g, abs(x))
    return g


def primitive(v: Vec) -> Vec:
    """Divide out the gcd of the entries, preserving direction."""
    g = vec_gcd(v)
    if g <= 1:
        return tuple(v)
    return tuple(x // g for x in v)


def is_zero_vec(v) -> bool:
    return all(x == 0 for x in v)


def hnf(m: Mat) -> tuple[Mat, Mat]:
    """Row Hermite normal form.

    Returns (h, u) with h = u @ m, u unimodular, h in row-style HNF:
    pivots positive, entries above each pivot reduced into [0, pivot),
    zero rows at the bottom.
    """
    nr = len(m)
    nc = len(m[0]) if nr else 0
    rows = [list(r) for r in m]
    u = [list(r) for r in identity_matrix(nr)]

    def addmul(dst: int, src: int, q: int) -> None:
        if q == 0:
            return
        rows[dst] = [a + q * b for a, b in zip(rows[dst], rows[src])]
        u[dst] = [a + q * b for a, b in zip(u[dst], u[src])]

    def swap(i: int, j: int) -> None:
        rows[i], rows[j] = rows[j], rows[i]
        u[i], u[j] = u[j], u[i]

    pivots: list[tuple[int, int]] = []  # (row, col)
    pr = 0
    for col in range(nc):
        # Euclidean elimination below the pivot row in this column.
        while True:
            nz = [i for i in range(pr, nr) if rows[i][col] != 0]
            if not nz:
                break
            imin = min(nz, key=lambda i: abs(rows[i][col]))
            swap(pr, imin)
            done = True
            for i in range(pr + 1, nr):
                if rows[i][col] != 0:
                    q = rows[i][col] // rows[pr][col]
                    addmul(i, pr, -q)
                    if rows[i][col] != 0:
                        done = False
            if done:
                break
        if pr < nr and rows[pr][col] != 0:
            if rows[pr][col] < 0:
                rows[pr] = [-a for a in rows[pr]]
                u[pr] = [-a for a in u[pr]]
            piv = rows[pr][col]
            for i in range(pr):
                q = rows[i][col] // piv  # floor: leaves remainder in [0, piv)
                addmul(i, pr, -q)
            pivots.append((pr, col))
            pr += 1
            if pr == nr:
                break
    h = tuple(tuple(r) for r in rows)
    return h, tuple(tuple(r) for r in u)


def snf(m: Mat) -> tuple[Mat, Mat, Mat]:
    """Smith normal form.

    Returns (d, u, v) with d = u @ m @ v diagonal, d_1 | d_2 | ...,
    diagonal entries nonnegative, u and v unimodular.
    """
    nr = len(m)
    nc = len(m[0]) if nr else 0
    a = [list(r) for r in m]
    u = [list(r) for r in identity_matrix(nr)]
    v = [list(r) for r in identity_matrix(nc)]

    def row_addmul(dst, src, q):
        a[dst] = [x + q * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x + q * y for x, y in zip(u[dst], u[src])]

    def col_addmul(dst, src, q):
        for r in a:
            r[dst] += q * r[src]
        for r in v:
            r[dst] += q * r[src]

    def row_swap(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def col_swap(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]

    def row_neg(i):
        a[i] = [-x for x in a[i]]
        u[i] = [-x for x in u[i]]

    k = 0
    while k < min(nr, nc):
        # Move a nonzero entry of minimal absolute value to (k, k).
        pos = [(i, j) for i in range(k, nr) for j in range(k, nc) if a[i][j] != 0]
        if not pos:
            break
        i0, j0 = min(pos, key=lambda p: abs(a[p[0]][p[1]]))
        row_swap(k, i0)
        col_swap(k, j0)
        # Clear row and column k.
        while True:
            for i in range(k + 1, nr):
                if a[i][k] != 0:
                    row_addmul(i, k, -(a[i][k] // a[k][k]))
            nz = [i for i in range(k + 1, nr) if a[i][k] != 0]
            if nz:
                i0 = min(nz, key=lambda i: abs(a[i][k]))
                row_swap(k, i0)
                continue
            for j in range(k + 1, nc):
                if a[k][j] != 0:
                    col_addmul(j, k, -(a[k][j] // a[k][k]))
            nz = [j for j in range(k + 1, nc) if a[k][j] != 0]
            if nz:
                j0 = min(nz, key=lambda j: abs(a[k][j]))
                col_swap(k, j0)
                continue
            break
        if a[k][k] < 0:
            row_neg(k)
        k += 1
    # Enforce the divisibility chain.
    changed = True
    while changed:
        changed = False
        for i in range(min(nr, nc) - 1):
            di, dj = a[i][i], a[i + 1][i + 1]
            if dj % (di if di else 1) != 0 if di else dj != 0:
                # Standard trick: add column i+1 to column i, re-clear 2x2 block.
                col_addmul(i, i + 1, 1)
                while True:
                    if a[i + 1][i] != 0:
                        if a[i][i] == 0 or abs(a[i + 1][i]) < abs(a[i][i]):
                            row_swap(i, i + 1)
                        q = a[i + 1][i] // a[i][i]
                        row_addmul(i + 1, i, -q)
                        if a[i + 1][i] != 0:
                            continue
                    if a[i][i + 1] != 0:
                        col_addmul(i + 1, i, -(a[i][i + 1] // a[i][i]))
                    if a[i + 1][i] == 0 and a[i][i + 1] == 0:
                        break
                if a[i][i] < 0:
                    row_neg(i)
                if a[i + 1][i + 1] < 0:
                    row_neg(i + 1)
                changed = True
    d = tuple(tuple(r) for r in a)
    return d, tuple(tuple(r) for r in u), tuple(tuple(r) for r in v)


def kernel_basis(m: Mat, cols: int | None = None) -> Mat:
    """Basis of the saturated kernel lattice {x in Z^c : m @ x = 0}.

    Rows of the result form an HNF basis (canonical for a given input).
    Pass `cols` when m may have zero rows.
    """
    nr = len(m)
    nc = len(m[0]) if nr else cols
    if nc is None:
        raise ValueError("cols required for an empty matrix")
    if nr == 0 or all(is_zero_vec(r) for r in m):
        return identity_matrix(nc)
    h, u = hnf(transpose(m))  # h = u @ m^T, rows of u with zero h-row span the kernel
    ker = [u[i] for i in range(nc) if is_zero_vec(h[i])]
    if not ker:
        return ()
    kh, _ = hnf(tuple(ker))
    return tuple(r for r in kh if not is_zero_vec(r))


def solve_int(a: Mat, b: Vec, cols: int | None = None) -> Vec | None:
    """Solve a @ x = b over the integers; None if no integer solution.

    Pass `cols` when a has zero rows.
    """
    nr = len(a)
    nc = len(a[0]) if nr else cols
    if nc is None:
        raise ValueError("cols required for an empty matrix")
    if nr == 0:
        return tuple(0 for _ in range(nc))
    assert len(b) == nr
    h, u = hnf(transpose(a))  # h = u @ a^T, shape nc x nr
    # Solve y @ h = b by forward substitution, then x = y @ u.
    y = [0] * nc
    pivot_of_col: dict[int, int] = {}
    for i in range(nc):
        for j in range(nr):
            if h[i][j] != 0:
                if j not in pivot_of_col:
                    pivot_of_col[j] = i
                break
    for j in range(nr):
        acc = b[j] - sum(y[i] * h[i][j] for i in range(nc) if y[i])
        if j in pivot_of_col:
            i = pivot_of_col[j]
            piv = h[i][j]
            if acc % piv != 0:
                return None
            y[i] = acc // piv
        elif acc != 0:
            return None
    x = tuple(sum(y[i] * u[i][j] for i in range(nc)) for j in range(nc))
    # Final consistency check (guards against non-echelon corner cases).
    if mat_vec(a, x) != tuple(b):
        return None
    return x


def det(m: Mat) -> int:
    """Determinant of a square integer matrix (Bareiss, fraction-free)."""
    n = len(m)
    if n == 0:
        return 1
    assert all(len(r) == n for r in m)
    a = [list(r) for r in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def coset_reduce(v: Vec, basis: Mat) -> Vec:
    """Canonical representative of v modulo the lattice spanned by `basis`.

    `basis` must be in row HNF (as returned by kernel_basis / hnf).
    """
    w = list(v)
    for row in basis:
        p = next((j for j, x in enumerate(row) if x != 0), None)
        if p is None:
            continue
        q = w[p] // row[p]
        if q:
            w = [a - q * b for a, b in zip(w, row)]
    return tuple(w)


def lattice_rank(m: Mat) -> int:
    """Rank of the lattice spanned by the rows of m."""
    if not m:
        return 0
    h, _ = hnf(m)
    return sum(1 for r in h if not is_zero_vec(r))


def in_span(v: Vec, basis: Mat) -> bool:
    """Is v in the rational span of the rows of `basis`?"""
    if is_zero_vec(v):
        return True
    return lattice_rank(tuple(basis) + (tuple(v),)) == lattice_rank(basis)
