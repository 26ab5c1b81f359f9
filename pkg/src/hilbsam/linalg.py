"""Small exact linear algebra over Z and Q on lists of lists."""

from __future__ import annotations

from fractions import Fraction

__all__ = [
    "identity",
    "is_symmetric",
    "mat_mul",
    "psd_decomposition",
    "rational_det",
    "rational_inverse",
    "rational_rank",
    "smith_normal_form",
    "transpose",
]


def identity(n, one=1):
    return [[one if i == j else 0 * one for j in range(n)] for i in range(n)]


def transpose(A):
    if not A:
        return []
    return [list(col) for col in zip(*A)]


def mat_mul(A, B):
    if not A or not B:
        return [[0] * (len(B[0]) if B else 0) for _ in A]
    Bt = list(zip(*B))
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def is_symmetric(A) -> bool:
    n = len(A)
    return all(len(row) == n for row in A) and all(A[i][j] == A[j][i] for i in range(n) for j in range(i))


def rational_det(A) -> Fraction:
    n = len(A)
    if n == 0:
        return Fraction(1)
    M = [[Fraction(x) for x in row] for row in A]
    det = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if M[r][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            M[c], M[p] = M[p], M[c]
            det = -det
        piv = M[c][c]
        det *= piv
        for r in range(c + 1, n):
            f = M[r][c]
            if f:
                f /= piv
                Mr, Mc = M[r], M[c]
                for k in range(c, n):
                    Mr[k] -= f * Mc[k]
    return det


def rational_inverse(A):
    n = len(A)
    M = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(A)]
    for c in range(n):
        p = next((r for r in range(c, n) if M[r][c] != 0), None)
        if p is None:
            raise ZeroDivisionError("singular matrix")
        M[c], M[p] = M[p], M[c]
        piv = M[c][c]
        M[c] = [x / piv for x in M[c]]
        for r in range(n):
            if r != c and M[r][c]:
                f = M[r][c]
                M[r] = [a - f * b for a, b in zip(M[r], M[c])]
    return [row[n:] for row in M]


def rational_rank(A) -> int:
    M = [[Fraction(x) for x in row] for row in A]
    if not M:
        return 0
    rows, cols = len(M), len(M[0])
    rank = 0
    for c in range(cols):
        p = next((r for r in range(rank, rows) if M[r][c] != 0), None)
        if p is None:
            continue
        M[rank], M[p] = M[p], M[rank]
        piv = M[rank][c]
        for r in range(rank + 1, rows):
            if M[r][c]:
                f = M[r][c] / piv
                M[r] = [a - f * b for a, b in zip(M[r], M[rank])]
        rank += 1
        if rank == rows:
            break
    return rank


def psd_decomposition(G):
    """Diagonally pivoted symmetric elimination.

    Returns ``(is_psd, pivots)`` where ``pivots`` lists ``(index, value)`` of the
    positive pivots; the rank is ``len(pivots)``.
    """
    n = len(G)
    M = [[Fraction(x) for x in row] for row in G]
    alive = list(range(n))
    pivots = []
    while alive:
        i = max(alive, key=lambda k: M[k][k])
        d = M[i][i]
        if d < 0:
            return False, pivots
        if d == 0:
            # PSD forces the whole remaining block to vanish
            if any(M[a][b] != 0 for a in alive for b in alive):
                return False, pivots
            break
        pivots.append((i, d))
        alive.remove(i)
        row = M[i]
        for a in alive:
            f = M[a][i] / d
            if f:
                Ma = M[a]
                for b in alive:
                    Ma[b] -= f * row[b]
    return True, pivots


def smith_normal_form(A):
    """Return (U, D, V) with U, V unimodular and D = U A V diagonal, d1 | d2 | ...

    Also usable for integer kernels: the columns of V past the rank span ker A.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    D = [[int(x) for x in row] for row in A]
    U = identity(m)
    V = identity(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, f):  # row_dst += f * row_src
        D[dst] = [a + f * b for a, b in zip(D[dst], D[src])]
        U[dst] = [a + f * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, f):
        for row in D:
            row[dst] += f * row[src]
        for row in V:
            row[dst] += f * row[src]

    t = 0
    while t < min(m, n):
        nonzero = [(abs(D[i][j]), i, j) for i in range(t, m) for j in range(t, n) if D[i][j]]
        if not nonzero:
            break
        _, i, j = min(nonzero)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            done = True
            for i in range(t + 1, m):
                if D[i][t]:
                    q = D[i][t] // D[t][t]
                    add_row(i, t, -q)
                    if D[i][t]:
                        swap_rows(t, i)
                        done = False
            for j in range(t + 1, n):
                if D[t][j]:
                    q = D[t][j] // D[t][t]
                    add_col(j, t, -q)
                    if D[t][j]:
                        swap_cols(t, j)
                        done = False
            if not done:
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if D[i][j] % D[t][t]), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    return U, D, V
