"""Slow, direct reference implementations used to cross-check the package."""

from __future__ import annotations

import itertools
import math


def dense_snf(M) -> list[int]:
    """Invariant factors (nonzero diagonal, 1s kept) by textbook elimination."""
    A = [list(map(int, row)) for row in M]
    rows = len(A)
    cols = len(A[0]) if rows else 0
    diag = []
    t = 0
    while t < min(rows, cols):
        nz = [(abs(A[i][j]), i, j) for i in range(t, rows) for j in range(t, cols) if A[i][j]]
        if not nz:
            break
        _, i, j = min(nz)
        A[t], A[i] = A[i], A[t]
        for row in A:
            row[t], row[j] = row[j], row[t]
        while True:
            p = A[t][t]
            bad = False
            for i in range(t + 1, rows):
                q = A[i][t] // p
                if q:
                    A[i] = [a - q * b for a, b in zip(A[i], A[t])]
                if A[i][t]:
                    bad = True
            for j in range(t + 1, cols):
                q = A[t][j] // p
                if q:
                    for row in A:
                        row[j] -= q * row[t]
                if A[t][j]:
                    bad = True
            if not bad:
                # make the pivot divide the rest of the block
                fix = next(((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols)
                            if A[i][j] % p), None)
                if fix is None:
                    break
                i, _ = fix
                A[t] = [a + b for a, b in zip(A[t], A[i])]
                continue
            nz = [(abs(A[i][t]), i, t) for i in range(t, rows) if A[i][t]]
            nz += [(abs(A[t][j]), t, j) for j in range(t, cols) if A[t][j]]
            _, i, j = min(nz)
            A[t], A[i] = A[i], A[t]
            for row in A:
                row[t], row[j] = row[j], row[t]
        diag.append(abs(A[t][t]))
        t += 1
    return diag


def determinant_divisors(M) -> list[int]:
    """Invariant factors from gcds of k x k minors (small matrices only)."""
    rows = len(M)
    cols = len(M[0]) if rows else 0
    d = [1]
    for k in range(1, min(rows, cols) + 1):
        g = 0
        for R in itertools.combinations(range(rows), k):
            for C in itertools.combinations(range(cols), k):
                g = math.gcd(g, _det([[M[r][c] for c in C] for r in R]))
        if g == 0:
            break
        d.append(g)
    return [d[i] // d[i - 1] for i in range(1, len(d))]


def _det(A) -> int:
    n = len(A)
    if n == 1:
        return A[0][0]
    return sum((-1) ** j * A[0][j] * _det([row[:j] + row[j + 1:] for row in A[1:]])
               for j in range(n))


def tuples(op, n: int, variant: str = "rack", orbit_set=None) -> list[tuple]:
    size = len(op)
    out = []
    for x in itertools.product(range(size), repeat=n):
        repeat = any(x[i] == x[i + 1] for i in range(n - 1))
        if variant == "quandle" and repeat:
            continue
        if variant == "degenerate" and not repeat:
            continue
        if variant == "orbit" and x[0] not in orbit_set:
            continue
        out.append(x)
    return out


def dense_boundary(op, n: int, variant: str = "rack", orbit_set=None) -> list[list[int]]:
    """Matrix of the rack boundary on n-tuples, written straight from the formula."""
    src = tuples(op, n, variant, orbit_set)
    if n == 1:
        return []  # C_0 = 0: no rows
    dst = tuples(op, n - 1, variant, orbit_set)
    index = {x: i for i, x in enumerate(dst)}
    M = [[0] * len(src) for _ in dst]
    for j, x in enumerate(src):
        for i in range(1, n):
            s = 1 if i % 2 == 1 else -1  # (-1)^(i+1) with 0-based i
            face = x[:i] + x[i + 1:]
            acted = tuple(op[a][x[i]] for a in x[:i]) + x[i + 1:]
            for y, sign in ((face, s), (acted, -s)):
                if y in index:
                    M[index[y]][j] += sign
    return M


def brute_homology(op, n: int, variant: str = "rack", orbit_set=None) -> tuple[int, tuple]:
    """(free rank, torsion factors > 1) of H_n by dense SNF."""
    dim = len(tuples(op, n, variant, orbit_set))
    dn = dense_boundary(op, n, variant, orbit_set)
    dn1 = dense_boundary(op, n + 1, variant, orbit_set)
    rn = len(dense_snf(dn)) if n > 1 and dn else 0
    f1 = dense_snf(dn1) if dn1 else []
    return dim - rn - len(f1), tuple(d for d in f1 if d > 1)


def satisfies(op, law: str) -> bool:
    n = len(op)
    R = range(n)
    if law == "shelf":
        return all(op[op[a][b]][c] == op[op[a][c]][op[b][c]] for a in R for b in R for c in R)
    if law == "idempotent":
        return all(op[a][a] == a for a in R)
    if law == "right_bijective":
        return all(len({op[a][b] for a in R}) == n for b in R)
    if law == "graphic":
        return all(op[op[a][b]][a] == op[a][b] for a in R for b in R)
    if law == "kei":
        return all(op[op[a][b]][b] == a for a in R for b in R)
    if law == "entropic":
        return all(op[op[a][b]][op[c][d]] == op[op[a][c]][op[b][d]]
                   for a in R for b in R for c in R for d in R)
    if law == "associative":
        return all(op[op[a][b]][c] == op[a][op[b][c]] for a in R for b in R for c in R)
    if law == "left_bijective":
        return all(len({op[a][x] for x in R}) == n for a in R)
    raise ValueError(law)


def brute_isomorphic(op1, op2) -> tuple | None:
    """Least permutation (lexicographic) carrying op1 onto op2."""
    n = len(op1)
    if len(op2) != n:
        return None
    for s in itertools.permutations(range(n)):
        if all(s[op1[a][b]] == op2[s[a]][s[b]] for a in range(n) for b in range(n)):
            return s
    return None


def all_racks(n: int) -> list[list[list[int]]]:
    """Every rack structure on {0..n-1} (labelled), via right translations."""
    perms = list(itertools.permutations(range(n)))
    found = []

    def ok(R):
        for c in range(n):
            if R[c] is None:
                continue
            inv = [0] * n
            for i, x in enumerate(R[c]):
                inv[x] = i
            for b in range(n):
                tb = R[c][b]
                if R[b] is None or R[tb] is None:
                    continue
                conj = tuple(R[c][R[b][inv[x]]] for x in range(n))
                if conj != R[tb]:
                    return False
        return True

    def search(R, b):
        if b == n:
            found.append([[R[y][x] for y in range(n)] for x in range(n)])
            return
        for p in perms:
            R[b] = p
            if ok(R):
                search(R, b + 1)
        R[b] = None

    search([None] * n, 0)
    return found


def brute_colorings(diagram: list[tuple], op) -> list[dict]:
    """All edge colorings checked crossing by crossing; diagram terms are (sign, a, b, c, d)."""
    labels = sorted({e for x in diagram for e in x[1:]})
    n = len(op)
    out = []
    for vals in itertools.product(range(n), repeat=len(labels)):
        col = dict(zip(labels, vals))
        good = True
        for s, a, b, c, d in diagram:
            if col[b] != col[d]:
                good = False
                break
            if s > 0 and op[col[a]][col[b]] != col[c]:
                good = False
                break
            if s < 0 and op[col[c]][col[b]] != col[a]:
                good = False
                break
        if good:
            out.append(col)
    return out
