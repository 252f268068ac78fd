"""Small exact integer linear algebra: Smith normal form and lattice helpers.

Everything here operates on dense lists of Python ints.  The matrices that
show up in this package are tiny (at most ~8 x 10), so clarity beats speed.
"""

from __future__ import annotations

from typing import List, Sequence, Tuple

Matrix = List[List[int]]


def identity(k: int) -> Matrix:
    return [[1 if i == j else 0 for j in range(k)] for i in range(k)]


def mat_mul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> Matrix:
    rows, inner = len(a), len(b)
    cols = len(b[0]) if inner else 0
    out = [[0] * cols for _ in range(rows)]
    for i in range(rows):
        ai, oi = a[i], out[i]
        for k in range(inner):
            x = ai[k]
            if x:
                bk = b[k]
                for j in range(cols):
                    oi[j] += x * bk[j]
    return out


def smith_normal_form(mat: Sequence[Sequence[int]]) -> Tuple[Matrix, Matrix, Matrix, Matrix, Matrix]:
    """Return (S, U, V, Uinv, Vinv) with U * mat * V = S.

    S is diagonal with nonnegative entries d_1 | d_2 | ... followed by zeros;
    U, V are unimodular.  Uinv and Vinv are maintained alongside so that
    U*Uinv = I and V*Vinv = I exactly.
    """
    s = [list(row) for row in mat]
    m = len(s)
    n = len(s[0]) if m else 0
    u, uinv = identity(m), identity(m)
    v, vinv = identity(n), identity(n)

    def swap_rows(i, j):
        if i == j:
            return
        s[i], s[j] = s[j], s[i]
        u[i], u[j] = u[j], u[i]
        for r in uinv:
            r[i], r[j] = r[j], r[i]

    def swap_cols(i, j):
        if i == j:
            return
        for r in s:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]
        vinv[i], vinv[j] = vinv[j], vinv[i]

    def add_row(src, dst, c):
        # row dst += c * row src; inverse op on uinv keeps U*Uinv = I
        srow, urow = s[src], u[src]
        sdst, udst = s[dst], u[dst]
        for j in range(n):
            sdst[j] += c * srow[j]
        for j in range(m):
            udst[j] += c * urow[j]
        for r in uinv:
            r[src] -= c * r[dst]

    def add_col(src, dst, c):
        for r in s:
            r[dst] += c * r[src]
        for r in v:
            r[dst] += c * r[src]
        vsrc = vinv[src]
        vdst = vinv[dst]
        vinv[src] = [a - c * b for a, b in zip(vsrc, vdst)]

    def negate_row(i):
        s[i] = [-x for x in s[i]]
        u[i] = [-x for x in u[i]]
        for r in uinv:
            r[i] = -r[i]

    t = 0
    while t < m and t < n:
        pivot = None
        best = None
        for i in range(t, m):
            for j in range(t, n):
                x = s[i][j]
                if x != 0 and (best is None or abs(x) < best):
                    best = abs(x)
                    pivot = (i, j)
        if pivot is None:
            break
        swap_rows(t, pivot[0])
        swap_cols(t, pivot[1])
        while True:
            # reduce column t
            for i in range(t + 1, m):
                if s[i][t]:
                    add_row(t, i, -(s[i][t] // s[t][t]))
            if any(s[i][t] for i in range(t + 1, m)):
                # a nonzero remainder is strictly smaller: make it the pivot
                for i in range(t + 1, m):
                    if s[i][t]:
                        swap_rows(t, i)
                        break
                continue
            # reduce row t
            for j in range(t + 1, n):
                if s[t][j]:
                    add_col(t, j, -(s[t][j] // s[t][t]))
            if any(s[t][j] for j in range(t + 1, n)):
                for j in range(t + 1, n):
                    if s[t][j]:
                        swap_cols(t, j)
                        break
                continue
            # pivot must divide every remaining entry
            offender = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if s[i][j] % s[t][t] != 0:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            add_row(offender, t, 1)
        if s[t][t] < 0:
            negate_row(t)
        t += 1
    return s, u, v, uinv, vinv


def diagonal(s: Sequence[Sequence[int]]) -> List[int]:
    if not s or not s[0]:
        return []
    return [s[i][i] for i in range(min(len(s), len(s[0])))]


def elementary_divisors(mat: Sequence[Sequence[int]]) -> List[int]:
    """Nonzero diagonal entries of the Smith normal form."""
    if not mat or not mat[0]:
        return []
    s, *_ = smith_normal_form(mat)
    return [d for d in diagonal(s) if d != 0]


def kernel_basis(mat: Sequence[Sequence[int]]) -> List[List[int]]:
    """Basis of the integer kernel {x : mat @ x = 0}, as a list of vectors."""
    if not mat:
        return []
    n = len(mat[0])
    if n == 0:
        return []
    s, _u, v, *_ = smith_normal_form(mat)
    rank = len([d for d in diagonal(s) if d != 0])
    return [[v[i][j] for i in range(n)] for j in range(rank, n)]


def solve_in_lattice(basis: Sequence[Sequence[int]], target: Sequence[int]) -> List[int]:
    """Express target as an integer combination y of the basis rows (y @ basis = target).

    Raises ValueError when no exact integer solution exists.
    """
    k = len(basis)
    if k == 0:
        if any(target):
            raise ValueError("target not in lattice")
        return []
    s, u, v, _uinv, _vinv = smith_normal_form(basis)
    # y @ basis = target  <=>  z @ S = target @ V with z = y @ Uinv, y = z @ U
    n = len(target)
    tv = [sum(target[i] * v[i][j] for i in range(n)) for j in range(len(v[0]))]
    diag = diagonal(s)
    rank = len([d for d in diag if d != 0])
    z = [0] * k
    for j, val in enumerate(tv):
        if j < rank and j < k:
            if val % diag[j] != 0:
                raise ValueError("target not in lattice")
            z[j] = val // diag[j]
        elif val != 0:
            raise ValueError("target not in lattice")
    return [sum(z[i] * u[i][j] for i in range(k)) for j in range(k)]
