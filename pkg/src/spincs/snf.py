"""Exact integer and rational matrix utilities.

Everything here operates on plain lists of lists (rows) holding ints or
Fractions; matrices are desk-scale, so clarity beats asymptotics.
"""
from __future__ import annotations

from fractions import Fraction

Matrix = list[list[int]]


def identity(n: int) -> Matrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def matmul(a, b):
    rows, inner, cols = len(a), len(b), len(b[0]) if b else 0
    return [
        [sum(a[i][k] * b[k][j] for k in range(inner)) for j in range(cols)]
        for i in range(rows)
    ]


def matvec(a, v):
    return [sum(a[i][k] * v[k] for k in range(len(v))) for i in range(len(a))]


def transpose(a):
    return [list(col) for col in zip(*a)] if a else []


def smith_normal_form(mat: Matrix) -> tuple[Matrix, Matrix, Matrix]:
    """Return (U, D, V) with U @ mat @ V = D, U and V unimodular and D
    diagonal with d_1 | d_2 | ... and nonnegative entries."""
    rows = len(mat)
    cols = len(mat[0]) if rows else 0
    d = [list(r) for r in mat]
    u = identity(rows)
    v = identity(cols)

    def swap_rows(i, j):
        d[i], d[j] = d[j], d[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for r in d:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]

    def add_row(src, dst, factor):
        d[dst] = [x + factor * y for x, y in zip(d[dst], d[src])]
        u[dst] = [x + factor * y for x, y in zip(u[dst], u[src])]

    def add_col(src, dst, factor):
        for r in d:
            r[dst] += factor * r[src]
        for r in v:
            r[dst] += factor * r[src]

    def negate_row(i):
        d[i] = [-x for x in d[i]]
        u[i] = [-x for x in u[i]]

    t = 0
    while t < min(rows, cols):
        # Find a pivot in the remaining block.
        pivot = None
        for i in range(t, rows):
            for j in range(t, cols):
                if d[i][j] != 0:
                    if pivot is None or abs(d[i][j]) < abs(d[pivot[0]][pivot[1]]):
                        pivot = (i, j)
        if pivot is None:
            break
        swap_rows(t, pivot[0])
        swap_cols(t, pivot[1])
        while True:
            for i in range(t + 1, rows):
                if d[i][t]:
                    add_row(t, i, -(d[i][t] // d[t][t]))
            nonzero = [i for i in range(t + 1, rows) if d[i][t]]
            if nonzero:
                i = min(nonzero, key=lambda k: abs(d[k][t]))
                swap_rows(t, i)
                continue
            for j in range(t + 1, cols):
                if d[t][j]:
                    add_col(t, j, -(d[t][j] // d[t][t]))
            nonzero_c = [j for j in range(t + 1, cols) if d[t][j]]
            if nonzero_c:
                j = min(nonzero_c, key=lambda k: abs(d[t][k]))
                swap_cols(t, j)
                continue
            break
        if d[t][t] < 0:
            negate_row(t)
        t += 1

    # Enforce the divisibility chain d_i | d_{i+1}.
    changed = True
    while changed:
        changed = False
        for i in range(min(rows, cols) - 1):
            a, b = d[i][i], d[i + 1][i + 1]
            if a and b % a != 0:
                add_col(i + 1, i, 1)
                # Re-clear the 2x2 block with euclidean steps.
                while d[i + 1][i]:
                    if abs(d[i][i]) >= abs(d[i + 1][i]):
                        add_row(i + 1, i, -(d[i][i] // d[i + 1][i]))
                    swap_rows(i, i + 1)
                while d[i][i + 1]:
                    add_col(i, i + 1, -(d[i][i + 1] // d[i][i]))
                if d[i][i] < 0:
                    negate_row(i)
                if d[i + 1][i + 1] < 0:
                    negate_row(i + 1)
                changed = True
    return u, d, v


def diagonal(d: Matrix) -> list[int]:
    return [d[i][i] for i in range(min(len(d), len(d[0]) if d else 0))]


def integer_kernel_basis(mat: Matrix) -> list[list[int]]:
    """Basis (as columns) of the integer kernel of ``mat`` viewed as a map
    Z^cols -> Z^rows."""
    rows = len(mat)
    cols = len(mat[0]) if rows else 0
    if cols == 0:
        return []
    if rows == 0:
        return [[1 if i == j else 0 for i in range(cols)] for j in range(cols)]
    _, d, v = smith_normal_form(mat)
    rank = sum(1 for x in diagonal(d) if x != 0)
    return [[v[i][j] for i in range(cols)] for j in range(rank, cols)]


def rational_inverse(mat) -> list[list[Fraction]]:
    """Inverse of a square matrix over Q by Gaussian elimination."""
    n = len(mat)
    work = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
            for i, row in enumerate(mat)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if work[r][col] != 0), None)
        if pivot is None:
            raise ZeroDivisionError("matrix is singular")
        work[col], work[pivot] = work[pivot], work[col]
        inv = Fraction(1) / work[col][col]
        work[col] = [x * inv for x in work[col]]
        for r in range(n):
            if r != col and work[r][col]:
                factor = work[r][col]
                work[r] = [x - factor * y for x, y in zip(work[r], work[col])]
    return [row[n:] for row in work]


def determinant(mat) -> Fraction:
    n = len(mat)
    work = [[Fraction(x) for x in row] for row in mat]
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if work[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            work[col], work[pivot] = work[pivot], work[col]
            det = -det
        det *= work[col][col]
        inv = Fraction(1) / work[col][col]
        for r in range(col + 1, n):
            if work[r][col]:
                factor = work[r][col] * inv
                work[r] = [x - factor * y for x, y in zip(work[r], work[col])]
    return det


def column_lattice_basis(gens: list[list[Fraction]]) -> list[list[Fraction]]:
    """Square basis matrix (columns) of the lattice spanned over Z by the
    given columns of a full-rank rational generating set."""
    rows = len(gens)
    cols = len(gens[0]) if rows else 0
    # Clear denominators, take a Hermite-style column basis, scale back.
    scale = 1
    for row in gens:
        for x in row:
            scale = scale * Fraction(x).denominator // _gcd(scale, Fraction(x).denominator)
    integral = [[int(Fraction(x) * scale) for x in row] for row in gens]
    basis_cols = _column_hermite(integral)
    if len(basis_cols) != rows:
        raise ValueError("generators do not span a full-rank lattice")
    return [
        [Fraction(basis_cols[j][i], scale) for j in range(rows)]
        for i in range(rows)
    ]


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


def _column_hermite(mat: Matrix) -> list[list[int]]:
    """Columns forming a basis of the column span of ``mat`` over Z."""
    rows = len(mat)
    cols = [list(c) for c in zip(*mat)]
    basis: list[list[int]] = []
    for r in range(rows):
        live = [c for c in cols if c[r] != 0]
        rest = [c for c in cols if c[r] == 0]
        while len(live) > 1:
            live.sort(key=lambda c: abs(c[r]))
            a, b = live[0], live[1]
            q = b[r] // a[r]
            b[:] = [x - q * y for x, y in zip(b, a)]
            if b[r] == 0:
                rest.append(b)
                live = [a] + live[2:]
            else:
                live = [b, a] + live[2:]
        if live:
            pivot = live[0]
            if pivot[r] < 0:
                pivot = [-x for x in pivot]
            basis.append(pivot)
            # Eliminate the pivot row from the rest to keep entries small.
            for c in rest:
                if c[r] != 0:
                    q = c[r] // pivot[r]
                    c[:] = [x - q * y for x, y in zip(c, pivot)]
            cols = rest
    return basis
