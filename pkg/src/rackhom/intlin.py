"""Exact sparse integer matrices, Smith normal form and homology groups.

Matrices are stored column-wise as ``{col: {row: value}}`` with Python
integers, so entries never overflow.  The Smith form is computed by sparse
elimination: unit pivots are taken greedily from the sparsest columns, and
whatever survives is finished by a gcd-driven pivot loop.
"""

from __future__ import annotations

import heapq
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator

__all__ = [
    "SparseIntMat",
    "SmithForm",
    "HomologyGroup",
    "BoundaryError",
    "SNFBudgetError",
    "smith_normal_form",
    "homology_of_pair",
    "invariant_factors_from_diagonal",
]


class BoundaryError(ArithmeticError):
    """Raised when a pair of maps does not compose to zero."""


@dataclass(frozen=True, eq=False)
class SparseIntMat:
    rows: int
    cols: int
    columns: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("negative dimension")
        clean = {}
        for c, col in self.columns.items():
            if not 0 <= c < self.cols:
                raise IndexError(f"column {c} out of range")
            kept = {}
            for r, v in col.items():
                if not 0 <= r < self.rows:
                    raise IndexError(f"row {r} out of range")
                if v:
                    kept[r] = int(v)
            if kept:
                clean[c] = kept
        object.__setattr__(self, "columns", clean)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "SparseIntMat":
        return cls(rows, cols, {})

    @classmethod
    def identity(cls, n: int) -> "SparseIntMat":
        return cls(n, n, {i: {i: 1} for i in range(n)})

    @classmethod
    def from_dense(cls, dense, cols: int | None = None) -> "SparseIntMat":
        dense = [list(r) for r in dense]
        nrows = len(dense)
        ncols = len(dense[0]) if dense else (cols or 0)
        columns: dict = {}
        for i, row in enumerate(dense):
            if len(row) != ncols:
                raise ValueError("ragged dense matrix")
            for j, v in enumerate(row):
                if v:
                    columns.setdefault(j, {})[i] = int(v)
        return cls(nrows, ncols, columns)

    @classmethod
    def from_entries(cls, rows: int, cols: int,
                     entries: Iterable[tuple[int, int, int]]) -> "SparseIntMat":
        columns: dict = {}
        for r, c, v in entries:
            col = columns.setdefault(c, {})
            col[r] = col.get(r, 0) + v
        return cls(rows, cols, columns)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def nnz(self) -> int:
        return sum(len(c) for c in self.columns.values())

    def entries(self) -> Iterator[tuple[int, int, int]]:
        """Yield ``(row, col, value)`` triples in column-major order."""
        for c in sorted(self.columns):
            col = self.columns[c]
            for r in sorted(col):
                yield r, c, col[r]

    def __getitem__(self, rc: tuple[int, int]) -> int:
        r, c = rc
        return self.columns.get(c, {}).get(r, 0)

    def to_dense(self) -> list[list[int]]:
        out = [[0] * self.cols for _ in range(self.rows)]
        for r, c, v in self.entries():
            out[r][c] = v
        return out

    def transpose(self) -> "SparseIntMat":
        cols: dict = {}
        for r, c, v in self.entries():
            cols.setdefault(r, {})[c] = v
        return SparseIntMat(self.cols, self.rows, cols)

    def is_zero(self) -> bool:
        return not self.columns

    def __matmul__(self, other: "SparseIntMat") -> "SparseIntMat":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        out: dict = {}
        mine = self.columns
        for c, col in other.columns.items():
            acc: dict = {}
            for k, v in col.items():
                left = mine.get(k)
                if left is None:
                    continue
                for r, w in left.items():
                    acc[r] = acc.get(r, 0) + w * v
            acc = {r: v for r, v in acc.items() if v}
            if acc:
                out[c] = acc
        return SparseIntMat(self.rows, other.cols, out)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseIntMat):
            return NotImplemented
        return self.shape == other.shape and self.columns == other.columns

    def mod(self, m: int) -> "SparseIntMat":
        return SparseIntMat(self.rows, self.cols, {
            c: {r: v % m for r, v in col.items()} for c, col in self.columns.items()})

    # coordinate text format: "rows cols nnz" then "r c v" lines
    def to_coordinate_text(self) -> str:
        lines = [f"{self.rows} {self.cols} {self.nnz}"]
        lines.extend(f"{r} {c} {v}" for r, c, v in self.entries())
        return "\n".join(lines) + "\n"

    @classmethod
    def from_coordinate_text(cls, text: str) -> "SparseIntMat":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise ValueError("empty coordinate text")
        rows, cols, nnz = (int(x) for x in lines[0].split())
        body = lines[1:]
        if len(body) != nnz:
            raise ValueError(f"header announces {nnz} entries, found {len(body)}")
        triples = []
        for ln in body:
            r, c, v = (int(x) for x in ln.split())
            triples.append((r, c, v))
        return cls.from_entries(rows, cols, triples)


@dataclass(frozen=True)
class SmithForm:
    """Invariant factors ``d1 | d2 | ... | dr`` (ones included) and the rank."""

    invariant_factors: tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)

    @property
    def torsion(self) -> tuple[int, ...]:
        return tuple(d for d in self.invariant_factors if d != 1)


def invariant_factors_from_diagonal(diag: Iterable[int]) -> tuple[int, ...]:
    """Turn the nonzero diagonal of an equivalent matrix into a divisibility chain."""
    ones = 0
    rest = []
    for d in diag:
        d = abs(d)
        if d == 0:
            continue
        if d == 1:
            ones += 1
        else:
            rest.append(d)
    rest.sort()
    k = len(rest)
    for i in range(k):
        for j in range(i + 1, k):
            a, b = rest[i], rest[j]
            if b % a:
                g = math.gcd(a, b)
                rest[i], rest[j] = g, a // g * b
    moved = sum(1 for d in rest if d == 1)
    rest = sorted(d for d in rest if d != 1)
    return (1,) * (ones + moved) + tuple(rest)


class SNFBudgetError(MemoryError):
    """Elimination fill-in exceeded the caller's entry budget."""


class _Workspace:
    """Mutable row/column view of a matrix, private to one SNF call."""

    def __init__(self, M: SparseIntMat, max_entries: int | None = None):
        self.R: dict[int, dict[int, int]] = {}
        self.C: dict[int, set[int]] = {}
        for c, col in M.columns.items():
            self.C[c] = set(col)
            for r, v in col.items():
                self.R.setdefault(r, {})[c] = v
        self.dirty: set[int] = set()
        self.nnz = sum(len(col) for col in M.columns.values())
        self.max_entries = max_entries

    def _grew(self) -> None:
        self.nnz += 1
        if self.max_entries is not None and self.nnz > self.max_entries:
            raise SNFBudgetError(f"elimination fill-in passed {self.max_entries} entries")

    def axpy(self, target: int, f: int, source: int) -> None:
        """row[target] += f * row[source]."""
        tr = self.R[target]
        C = self.C
        for j, v in self.R[source].items():
            nv = tr.get(j, 0) + f * v
            if nv:
                if j not in tr:
                    C[j].add(target)
                    self._grew()
                tr[j] = nv
            else:
                del tr[j]
                C[j].discard(target)
                self.nnz -= 1
            self.dirty.add(j)

    def set_entry(self, r: int, c: int, v: int) -> None:
        row = self.R[r]
        if v:
            if c not in row:
                self.C[c].add(r)
                self._grew()
            row[c] = v
        elif c in row:
            del row[c]
            self.C[c].discard(r)
            self.nnz -= 1
        self.dirty.add(c)

    def drop(self, r: int, c: int) -> None:
        row = self.R.pop(r)
        self.nnz -= len(row)
        for j in row:
            self.C[j].discard(r)
            self.dirty.add(j)
        del self.C[c]
        self.dirty.discard(c)

    def pivot(self, r: int, c: int) -> int:
        """Reduce at (r, c) until row r and column c are cleared.

        Returns the absolute value of the diagonal entry produced.  The pivot
        may migrate to a smaller remainder along the way.
        """
        R, C = self.R, self.C
        while True:
            p = R[r][c]
            best = None
            for i in list(C[c]):
                if i == r:
                    continue
                q = R[i][c] // p
                if q:
                    self.axpy(i, -q, r)
                rem = R[i].get(c, 0)
                if rem and (best is None or abs(rem) < abs(R[best][c])):
                    best = i
            if best is not None:
                r = best
                continue
            if abs(p) != 1:
                best_col = None
                for j in list(R[r]):
                    if j == c:
                        continue
                    # column c is zero off row r, so this column operation touches row r only
                    rem = R[r][j] - (R[r][j] // p) * p
                    self.set_entry(r, j, rem)
                    if rem and (best_col is None or abs(rem) < abs(R[r][best_col])):
                        best_col = j
                if best_col is not None:
                    c = best_col
                    continue
            self.drop(r, c)
            return abs(p)


def smith_normal_form(M: SparseIntMat, max_entries: int | None = None) -> SmithForm:
    """Invariant factors of ``M`` under unimodular row and column operations.

    ``max_entries`` caps the nonzeros held during elimination; exceeding it
    raises SNFBudgetError.
    """
    if M.is_zero():
        return SmithForm(())
    ws = _Workspace(M, max_entries)
    R, C = ws.R, ws.C
    diag: list[int] = []

    # unit pivots first, sparsest column first
    heap = [(len(rows), c) for c, rows in C.items()]
    heapq.heapify(heap)
    while heap:
        n, c = heapq.heappop(heap)
        rows = C.get(c)
        if rows is None:
            continue
        if n != len(rows):
            continue  # stale; a fresh key was pushed when the column changed
        if not rows:
            del C[c]
            continue
        best = None
        best_len = 0
        for i in rows:
            if abs(R[i][c]) == 1:
                ln = len(R[i])
                if best is None or ln < best_len:
                    best, best_len = i, ln
        if best is None:
            continue
        ws.dirty.clear()
        diag.append(ws.pivot(best, c))
        for j in ws.dirty:
            rows_j = C.get(j)
            if rows_j is not None:
                heapq.heappush(heap, (len(rows_j), j))

    # general phase on what remains
    for c in [c for c, rows in C.items() if not rows]:
        del C[c]
    while C:
        best = None
        for c, rows in C.items():
            for i in rows:
                v = abs(R[i][c])
                key = (v, (len(R[i]) - 1) * (len(rows) - 1))
                if best is None or key < best[0]:
                    best = (key, i, c)
        _, r, c = best
        diag.append(ws.pivot(r, c))
        for c in [c for c, rows in C.items() if not rows]:
            del C[c]
    return SmithForm(invariant_factors_from_diagonal(diag))


def _primary_parts(n: int) -> list[int]:
    parts = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            q = 1
            while n % p == 0:
                n //= p
                q *= p
            parts.append(q)
        p += 1
    if n > 1:
        parts.append(n)
    return parts


@dataclass(frozen=True)
class HomologyGroup:
    """A finitely generated abelian group ``Z^free_rank + torsion``."""

    free_rank: int
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        if self.free_rank < 0:
            raise ValueError("negative free rank")
        chain = invariant_factors_from_diagonal(self.torsion)
        object.__setattr__(self, "torsion", tuple(d for d in chain if d != 1))

    @classmethod
    def free(cls, r: int) -> "HomologyGroup":
        return cls(r, ())

    def __add__(self, other: "HomologyGroup") -> "HomologyGroup":
        return HomologyGroup(self.free_rank + other.free_rank, self.torsion + other.torsion)

    def __mul__(self, k: int) -> "HomologyGroup":
        """Direct sum of ``k`` copies."""
        return HomologyGroup(self.free_rank * k, self.torsion * k)

    __rmul__ = __mul__

    def tensor(self, other: "HomologyGroup") -> "HomologyGroup":
        free = self.free_rank * other.free_rank
        tors = list(self.torsion) * other.free_rank + list(other.torsion) * self.free_rank
        tors += [math.gcd(a, b) for a in self.torsion for b in other.torsion]
        return HomologyGroup(free, tuple(tors))

    def tor(self, other: "HomologyGroup") -> "HomologyGroup":
        return HomologyGroup(0, tuple(math.gcd(a, b) for a in self.torsion for b in other.torsion))

    @property
    def order_of_torsion(self) -> int:
        return math.prod(self.torsion)

    def primary_decomposition(self) -> Counter:
        """Multiset of prime powers, e.g. ``Counter({2: 3, 4: 1})``."""
        out: Counter = Counter()
        for d in self.torsion:
            out.update(_primary_parts(d))
        return out

    def contains_cyclic(self, d: int) -> bool:
        """True iff the torsion subgroup has an element of order ``d``."""
        if d <= 1:
            return True
        return all(any(t % q == 0 for t in self.torsion) for q in _primary_parts(d))

    def annihilated_by(self, m: int) -> bool:
        return all(m % d == 0 for d in self.torsion)

    def count_factor(self, d: int) -> int:
        return sum(1 for t in self.torsion if t == d)

    def primary(self, free: bool = True) -> str:
        """Render as e.g. ``Z^4 x Z_2^3 x Z_4``; the trivial group is ``0``."""
        bits = []
        if free and self.free_rank:
            bits.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        parts = self.primary_decomposition()
        for q in sorted(parts, key=lambda q: (_prime_of(q), q)):
            k = parts[q]
            bits.append(f"Z_{q}" if k == 1 else f"Z_{q}^{k}")
        return " x ".join(bits) if bits else "0"

    def to_json(self) -> dict:
        return {"free_rank": self.free_rank, "torsion": list(self.torsion),
                "primary": self.primary()}

    @classmethod
    def from_json(cls, d: dict) -> "HomologyGroup":
        return cls(int(d["free_rank"]), tuple(int(x) for x in d["torsion"]))

    def __str__(self) -> str:
        return self.primary()


def _prime_of(q: int) -> int:
    p = 2
    while q % p:
        p += 1
    return p


def homology_of_pair(d_n: SparseIntMat, d_np1: SparseIntMat,
                     check: bool = True,
                     snf_n: SmithForm | None = None,
                     snf_np1: SmithForm | None = None) -> HomologyGroup:
    """Homology ``ker d_n / im d_np1`` at the shared middle group.

    Precomputed Smith forms may be passed in to avoid recomputation.
    """
    if d_n.cols != d_np1.rows:
        raise ValueError(f"dimension mismatch: d_n is {d_n.shape}, d_n+1 is {d_np1.shape}")
    if check and not (d_n @ d_np1).is_zero():
        raise BoundaryError("composition of consecutive boundary maps is nonzero")
    snf_n = snf_n or smith_normal_form(d_n)
    snf_np1 = snf_np1 or smith_normal_form(d_np1)
    nullity = d_n.cols - snf_n.rank
    return HomologyGroup(nullity - snf_np1.rank, snf_np1.torsion)
