"""Small exact integer/rational linear algebra used by the lattice geometry.

Everything here works on plain Python ints and ``fractions.Fraction`` so the
results are exact. Matrices are lists of row lists.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence


def det_int(rows: Sequence[Sequence[int]]) -> int:
    """Determinant of a square integer matrix (fraction-free Bareiss)."""
    a = [list(r) for r in rows]
    n = len(a)
    if n == 0:
        return 1
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
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i = a[i]
            row_k = a[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
        prev = akk
    return sign * a[n - 1][n - 1]


def cramer_int(rows: Sequence[Sequence[int]], rhs: Sequence[int]) -> tuple[int, list[int]]:
    """Solve ``rows @ x = rhs`` over the rationals as ``x = y / D``.

    Returns ``(D, y)`` with ``D = det(rows)``. When ``D == 0`` the returned
    ``y`` is empty.
    """
    n = len(rows)
    d = det_int(rows)
    if d == 0:
        return 0, []
    y = []
    for j in range(n):
        m = [list(r) for r in rows]
        for i in range(n):
            m[i][j] = rhs[i]
        y.append(det_int(m))
    return d, y


def rank_int(rows: Sequence[Sequence[int]]) -> int:
    """Rank of an integer matrix by gcd-reduced cross-multiplication."""
    a = [list(r) for r in rows if any(r)]
    if not a:
        return 0
    n = len(a[0])
    rank = 0
    for col in range(n):
        piv = next((i for i in range(rank, len(a)) if a[i][col] != 0), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        pr = a[rank]
        p = pr[col]
        for i in range(rank + 1, len(a)):
            ri = a[i]
            c = ri[col]
            if c:
                new = [x * p - c * y for x, y in zip(ri, pr)]
                g = 0
                for x in new:
                    g = math.gcd(g, x)
                a[i] = [x // g for x in new] if g > 1 else new
        rank += 1
        if rank == len(a):
            break
    return rank


def rank_frac(rows: Sequence[Sequence]) -> int:
    """Rank of a rational (or integer) matrix."""
    a = [[Fraction(x) for x in r] for r in rows]
    if not a:
        return 0
    m, n = len(a), len(a[0])
    rank = 0
    for col in range(n):
        piv = next((i for i in range(rank, m) if a[i][col] != 0), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        p = a[rank][col]
        for i in range(m):
            if i != rank and a[i][col] != 0:
                f = a[i][col] / p
                a[i] = [x - f * y for x, y in zip(a[i], a[rank])]
        rank += 1
        if rank == m:
            break
    return rank


def affine_rank(points: Sequence[Sequence[int]]) -> int:
    """Dimension of the affine hull of ``points`` (-1 for no points)."""
    if not points:
        return -1
    p0 = points[0]
    diffs = [[a - b for a, b in zip(p, p0)] for p in points[1:]]
    return rank_frac(diffs) if diffs else 0


def independent_rows(rows: Sequence[Sequence[int]]) -> list[int]:
    """Indices of a maximal linearly independent subset of ``rows``, greedy in order."""
    basis: list[list[Fraction]] = []
    pivots: list[int] = []
    chosen = []
    for idx, r in enumerate(rows):
        v = [Fraction(x) for x in r]
        for b, pc in zip(basis, pivots):
            if v[pc] != 0:
                f = v[pc] / b[pc]
                v = [x - f * y for x, y in zip(v, b)]
        pc = next((j for j, x in enumerate(v) if x != 0), None)
        if pc is None:
            continue
        basis.append(v)
        pivots.append(pc)
        chosen.append(idx)
    return chosen


def solve_frac(rows: Sequence[Sequence], rhs: Sequence) -> list[Fraction] | None:
    """Unique solution of a square rational system, or None if singular."""
    n = len(rows)
    a = [[Fraction(x) for x in r] + [Fraction(b)] for r, b in zip(rows, rhs)]
    for col in range(n):
        piv = next((i for i in range(col, n) if a[i][col] != 0), None)
        if piv is None:
            return None
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        a[col] = [x / p for x in a[col]]
        for i in range(n):
            if i != col and a[i][col] != 0:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[col])]
    return [a[i][n] for i in range(n)]


def lattice_combination(vectors: Sequence[Sequence[int]], n: int) -> list[list[int]] | None:
    """Express each unit vector e_i as an integer combination of ``vectors``.

    Returns a matrix ``K`` (n rows, one per unit vector) with
    ``sum_j K[i][j] * vectors[j] == e_i``, or None if the vectors do not
    generate the full lattice Z^n.
    """
    m = len(vectors)
    # Row-reduce [V | I_m] over Z; rows of the right block track combinations.
    rows = [list(v) + [1 if k == j else 0 for k in range(m)] for j, v in enumerate(vectors)]
    r = 0
    for col in range(n):
        while True:
            nz = [i for i in range(r, m) if rows[i][col] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(rows[i][col]))
            rows[r], rows[piv] = rows[piv], rows[r]
            done = True
            for i in range(r + 1, m):
                if rows[i][col] != 0:
                    q = rows[i][col] // rows[r][col]
                    rows[i] = [x - q * y for x, y in zip(rows[i], rows[r])]
                    if rows[i][col] != 0:
                        done = False
            if done:
                break
        if r < m and rows[r][col] != 0:
            if rows[r][col] < 0:
                rows[r] = [-x for x in rows[r]]
            r += 1
        else:
            return None
    # Upper-triangular block in rows[:n]; need unit diagonal for Z^n.
    if any(rows[i][i] != 1 for i in range(n)):
        return None
    for col in range(n - 1, -1, -1):
        for i in range(col):
            q = rows[i][col]
            if q:
                rows[i] = [x - q * y for x, y in zip(rows[i], rows[col])]
    return [rows[i][n:] for i in range(n)]
