"""Finite binary operation tables and their structural predicates."""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = [
    "MagmaTable",
    "AlgebraClass",
    "OrbitDecomposition",
    "FLAGS",
    "classify",
    "orbits",
    "is_isomorphic",
    "is_distributive_pair",
    "find_quasigroup_subspindles",
    "NotASpindleError",
]

FLAGS = ("shelf", "rack", "spindle", "quandle", "graphic", "kei",
         "entropic", "quasigroup", "associative", "connected")

# exhaustive identity checks are cubic (quartic for entropic)
CLASSIFY_WARN_SIZE = 64


class NotASpindleError(ValueError):
    pass


@dataclass(frozen=True)
class MagmaTable:
    """A binary operation on ``{0, ..., n-1}``; ``op[a][b]`` is ``a * b``."""

    n: int
    op: tuple

    def __post_init__(self):
        op = tuple(tuple(int(x) for x in row) for row in self.op)
        if self.n < 1:
            raise ValueError("a magma table needs at least one element")
        if len(op) != self.n or any(len(row) != self.n for row in op):
            raise ValueError(f"operation table must be {self.n}x{self.n}")
        for row in op:
            for x in row:
                if not 0 <= x < self.n:
                    raise ValueError(f"entry {x} outside [0, {self.n})")
        object.__setattr__(self, "op", op)

    @classmethod
    def from_rows(cls, rows) -> "MagmaTable":
        rows = [list(r) for r in rows]
        return cls(len(rows), tuple(tuple(r) for r in rows))

    @classmethod
    def from_array(cls, arr) -> "MagmaTable":
        arr = np.asarray(arr)
        return cls(arr.shape[0], tuple(map(tuple, arr.tolist())))

    def __call__(self, a: int, b: int) -> int:
        return self.op[a][b]

    def __len__(self) -> int:
        return self.n

    @cached_property
    def array(self) -> np.ndarray:
        arr = np.array(self.op, dtype=np.int64)
        arr.setflags(write=False)
        return arr

    def right_translation(self, b: int) -> tuple[int, ...]:
        """The map ``a -> a * b`` as a tuple."""
        return tuple(row[b] for row in self.op)

    def right_translations_bijective(self) -> bool:
        return all(len(set(self.right_translation(b))) == self.n for b in range(self.n))

    @cached_property
    def right_division(self) -> tuple:
        """``rdiv[c][b]`` is the unique ``a`` with ``a * b == c`` (racks only)."""
        if not self.right_translations_bijective():
            raise ValueError("right translations are not bijections")
        out = [[0] * self.n for _ in range(self.n)]
        for a in range(self.n):
            for b in range(self.n):
                out[self.op[a][b]][b] = a
        return tuple(map(tuple, out))

    def relabel(self, sigma) -> "MagmaTable":
        """Transport the operation along the bijection ``sigma``."""
        sigma = list(sigma)
        out = [[0] * self.n for _ in range(self.n)]
        for a in range(self.n):
            for b in range(self.n):
                out[sigma[a]][sigma[b]] = sigma[self.op[a][b]]
        return MagmaTable.from_rows(out)

    def subtable(self, elements) -> "MagmaTable":
        """Induced table on a closed subset, relabelled in increasing order."""
        elements = sorted(elements)
        index = {x: i for i, x in enumerate(elements)}
        try:
            rows = [[index[self.op[a][b]] for b in elements] for a in elements]
        except KeyError:
            raise ValueError("subset is not closed under the operation") from None
        return MagmaTable.from_rows(rows)

    def to_text(self) -> str:
        lines = [str(self.n)] + [" ".join(map(str, row)) for row in self.op]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "MagmaTable":
        tokens = text.split()
        if not tokens:
            raise ValueError("empty table text")
        n = int(tokens[0])
        body = tokens[1:]
        if len(body) != n * n:
            raise ValueError(f"expected {n * n} entries after the size, found {len(body)}")
        vals = [int(x) for x in body]
        return cls(n, tuple(tuple(vals[i * n:(i + 1) * n]) for i in range(n)))

    def to_json(self) -> dict:
        return {"n": self.n, "op": [list(r) for r in self.op]}

    @classmethod
    def from_json(cls, data) -> "MagmaTable":
        if isinstance(data, str):
            data = json.loads(data)
        t = cls.from_rows(data["op"])
        if t.n != data["n"]:
            raise ValueError("declared size does not match table")
        return t

    def key(self) -> bytes:
        return bytes(x for row in self.op for x in row) if self.n <= 256 else repr(self.op).encode()

    def __str__(self) -> str:
        w = len(str(self.n - 1))
        return "\n".join(" ".join(f"{x:>{w}}" for x in row) for row in self.op)


@dataclass(frozen=True)
class OrbitDecomposition:
    orbits: tuple[tuple[int, ...], ...]
    orbit_of: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.orbits)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(o) for o in self.orbits)


@dataclass(frozen=True)
class AlgebraClass:
    flags: frozenset
    n_quandle_order: int | None

    def __contains__(self, flag: str) -> bool:
        return flag in self.flags

    def __getattr__(self, name):
        if name in FLAGS:
            return name in self.flags
        raise AttributeError(name)

    def as_dict(self) -> dict:
        d = {f: (f in self.flags) for f in FLAGS}
        d["n_quandle_order"] = self.n_quandle_order
        return d


def orbits(t: MagmaTable) -> OrbitDecomposition:
    """Classes of the equivalence generated by ``a ~ a*b``, ordered by least element."""
    parent = list(range(t.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a in range(t.n):
        for x in t.op[a]:
            ra, rx = find(a), find(x)
            if ra != rx:
                parent[max(ra, rx)] = min(ra, rx)
    groups: dict[int, list[int]] = {}
    for a in range(t.n):
        groups.setdefault(find(a), []).append(a)
    ordered = sorted(groups.values(), key=lambda g: g[0])
    orbit_of = [0] * t.n
    for i, g in enumerate(ordered):
        for a in g:
            orbit_of[a] = i
    return OrbitDecomposition(tuple(map(tuple, ordered)), tuple(orbit_of))


def _perm_order(p) -> int:
    seen = [False] * len(p)
    order = 1
    for s in range(len(p)):
        if seen[s]:
            continue
        length = 0
        x = s
        while not seen[x]:
            seen[x] = True
            x = p[x]
            length += 1
        order = math.lcm(order, length)
    return order


def _holds_shelf(T: np.ndarray) -> bool:
    # (a*b)*c == (a*c)*(b*c)
    n = T.shape[0]
    c = np.arange(n)
    lhs = T[T[:, :, None], c[None, None, :]]
    rhs = T[T[:, None, :], T[None, :, :]]
    return bool(np.array_equal(lhs, rhs))


def _holds_entropic(T: np.ndarray) -> bool:
    # (a*b)*(c*d) == (a*c)*(b*d), one slice of a at a time
    for a in range(T.shape[0]):
        ab = T[a][:, None, None]           # indexed by b
        cd = T[None, :, :]                 # indexed by c, d
        lhs = T[ab, cd]                    # [b, c, d]
        ac = T[a][None, :, None]           # indexed by c
        bd = T[:, None, :]                 # indexed by b, d
        rhs = T[ac, bd]
        if not np.array_equal(lhs, rhs):
            return False
    return True


def classify(t: MagmaTable) -> AlgebraClass:
    """Evaluate every structural identity exhaustively."""
    if t.n > CLASSIFY_WARN_SIZE:
        warnings.warn(f"classify on {t.n} elements is slow (exhaustive identity checks)",
                      stacklevel=2)
    T = t.array
    n = t.n
    idx = np.arange(n)
    flags = set()
    shelf = _holds_shelf(T)
    right_bij = all(len(np.unique(T[:, b])) == n for b in range(n))
    idem = bool(np.array_equal(T[idx, idx], idx))
    if shelf:
        flags.add("shelf")
        if right_bij:
            flags.add("rack")
        if idem:
            flags.add("spindle")
        if right_bij and idem:
            flags.add("quandle")
    # a*b == (a*b)*a
    if np.array_equal(T, T[T, idx[:, None]]):
        flags.add("graphic")
    # (a*b)*b == a
    if np.array_equal(T[T, idx[None, :]], np.broadcast_to(idx[:, None], (n, n))):
        flags.add("kei")
    if _holds_entropic(T):
        flags.add("entropic")
    if all(len(np.unique(T[a])) == n for a in range(n)):
        flags.add("quasigroup")
    # (a*b)*c == a*(b*c)
    if np.array_equal(T[T[:, :, None], idx[None, None, :]], T[idx[:, None, None], T[None, :, :]]):
        flags.add("associative")
    if len(orbits(t)) == 1:
        flags.add("connected")
    order = None
    if right_bij:
        order = 1
        for b in range(n):
            order = math.lcm(order, _perm_order(T[:, b].tolist()))
    return AlgebraClass(frozenset(flags), order)


def _translation_shape(col) -> tuple:
    """Cycle type of a bijection, otherwise the sorted fibre sizes; both are label-free."""
    n = len(col)
    if len(set(col)) < n:
        fibres = [0] * n
        for x in col:
            fibres[x] += 1
        return ("fibres",) + tuple(sorted(fibres))
    cycle_type = []
    seen = [False] * n
    for s in range(n):
        if not seen[s]:
            k, x = 0, s
            while not seen[x]:
                seen[x] = True
                x = col[x]
                k += 1
            cycle_type.append(k)
    return ("cycles",) + tuple(sorted(cycle_type))


def _element_signature(t: MagmaTable, orb: OrbitDecomposition):
    sigs = []
    for a in range(t.n):
        row = t.op[a]
        sigs.append((
            len(orb.orbits[orb.orbit_of[a]]),
            _translation_shape(t.right_translation(a)),
            len(set(row)),
            sum(1 for b in range(t.n) if row[b] == a),
            row[a] == a,
        ))
    return sigs


def is_isomorphic(t1: MagmaTable, t2: MagmaTable) -> tuple[int, ...] | None:
    """Lexicographically least isomorphism ``t1 -> t2``, or ``None``.

    Backtracking over signature-compatible images of the least unassigned
    element; each choice is closed under products before branching again.
    """
    if t1.n != t2.n:
        return None
    n = t1.n
    o1, o2 = orbits(t1), orbits(t2)
    if sorted(o1.sizes) != sorted(o2.sizes):
        return None
    s1 = _element_signature(t1, o1)
    s2 = _element_signature(t2, o2)
    if sorted(s1) != sorted(s2):
        return None
    op1, op2 = t1.op, t2.op
    candidates = [[y for y in range(n) if s2[y] == s1[x]] for x in range(n)]

    sigma = [-1] * n
    used = [False] * n

    def assign(x, y, trail) -> bool:
        """Assign x -> y and close under products; record changes in trail."""
        queue = [(x, y)]
        while queue:
            x, y = queue.pop()
            if sigma[x] != -1:
                if sigma[x] != y:
                    return False
                continue
            if used[y] or s1[x] != s2[y]:
                return False
            sigma[x] = y
            used[y] = True
            trail.append(x)
            for z in trail:
                w = sigma[z]
                queue.append((op1[x][z], op2[y][w]))
                queue.append((op1[z][x], op2[w][y]))
        return True

    def undo(trail):
        for x in trail:
            used[sigma[x]] = False
            sigma[x] = -1

    assigned: list[int] = []

    def search() -> bool:
        try:
            x = sigma.index(-1)
        except ValueError:
            return True
        for y in candidates[x]:
            if used[y]:
                continue
            trail = list(assigned)
            start = len(trail)
            ok = assign(x, y, trail)
            new = trail[start:]
            if ok:
                assigned.extend(new)
                if search():
                    return True
                del assigned[len(assigned) - len(new):]
            undo(new)
        return False

    if search():
        return tuple(sigma)
    return None


def is_distributive_pair(f: MagmaTable, g: MagmaTable) -> bool:
    """Both tables are shelves and each distributes over the other."""
    if f.n != g.n:
        raise ValueError(f"size mismatch: {f.n} vs {g.n}")
    F, G = f.array, g.array
    if not (_holds_shelf(F) and _holds_shelf(G)):
        return False
    n = f.n
    c = np.arange(n)[None, None, :]
    for X, Y in ((F, G), (G, F)):
        # (a *X b) *Y c == (a *Y c) *X (b *Y c)
        lhs = Y[X[:, :, None], c]
        rhs = X[Y[:, None, :], Y[None, :, :]]
        if not np.array_equal(lhs, rhs):
            return False
    return True


def _closure(t: MagmaTable, seed) -> frozenset:
    current = set(seed)
    frontier = list(current)
    while frontier:
        new = []
        for a in frontier:
            for b in list(current):
                for x in (t.op[a][b], t.op[b][a]):
                    if x not in current:
                        current.add(x)
                        new.append(x)
        frontier = new
    return frozenset(current)


def subalgebras(t: MagmaTable) -> list[frozenset]:
    """Every nonempty subset closed under the operation."""
    found = {_closure(t, [a]) for a in range(t.n)}
    frontier = list(found)
    while frontier:
        new = []
        for S in frontier:
            for x in range(t.n):
                if x not in S:
                    U = _closure(t, S | {x})
                    if U not in found:
                        found.add(U)
                        new.append(U)
        frontier = new
    return sorted(found, key=lambda s: (len(s), sorted(s)))


def find_quasigroup_subspindles(t: MagmaTable) -> list[frozenset]:
    """Closed subsets of size >= 2 on which every left translation is a bijection."""
    if "spindle" not in classify(t):
        raise NotASpindleError("table is not a spindle")
    out = []
    for S in subalgebras(t):
        if len(S) < 2:
            continue
        if all({t.op[a][b] for b in S} == S for a in S):
            out.append(S)
    return out
