"""Builders for named quandle families and the block construction of graphic quandles.

A block construction takes disjoint blocks ``X_1, ..., X_k`` and maps
``f[i][j]: X_i -> X_i`` and sets ``x * y = f[i][j](x)`` for ``x`` in block
``i`` and ``y`` in block ``j``.  Blocks are laid out consecutively.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass

from .magma import MagmaTable, classify, orbits

__all__ = [
    "INF",
    "GraphicSpec",
    "SpecError",
    "GQParseError",
    "graphic_from_spec",
    "gq_uniform",
    "parse_gq",
    "format_gq",
    "trivial",
    "dihedral",
    "takasaki",
    "alexander",
    "conjugation",
    "symmetric_group",
    "cyclic_group",
    "recognize_example13",
]

INF = math.inf


class SpecError(ValueError):
    pass


class GQParseError(ValueError):
    pass


def _identity(n: int) -> tuple[int, ...]:
    return tuple(range(n))


def _shift(n: int) -> tuple[int, ...]:
    return tuple((p + 1) % n for p in range(n))


def _compose(f, g) -> tuple[int, ...]:
    """x -> f(g(x))."""
    return tuple(f[x] for x in g)


@dataclass(frozen=True)
class GraphicSpec:
    """Block sizes and the map family; ``perms[i][j]`` acts on local indices of block ``i``.

    With ``uniform_shift`` set, off-diagonal maps are the cycle ``p -> p+1`` and
    ``perms`` may be ``None`` (this is the only admissible form for infinite sizes).
    """

    sizes: tuple
    perms: tuple | None = None
    uniform_shift: bool = False

    def __post_init__(self):
        sizes = tuple(s if s == INF else int(s) for s in self.sizes)
        if not sizes:
            raise SpecError("a graphic spec needs at least one block")
        for s in sizes:
            if s != INF and s < 1:
                raise SpecError(f"block size {s} is not positive")
        object.__setattr__(self, "sizes", sizes)
        if self.perms is None:
            if not self.uniform_shift:
                raise SpecError("non-uniform spec requires explicit maps")
            if all(s != INF for s in sizes):
                object.__setattr__(self, "perms", _uniform_perms(sizes))
        else:
            if any(s == INF for s in sizes):
                raise SpecError("explicit maps are only supported on finite blocks")
            perms = tuple(tuple(tuple(int(x) for x in p) for p in row) for row in self.perms)
            object.__setattr__(self, "perms", perms)
            _validate(sizes, perms)

    @property
    def k(self) -> int:
        return len(self.sizes)

    @property
    def finite(self) -> bool:
        return all(s != INF for s in self.sizes)

    @property
    def offsets(self) -> tuple[int, ...]:
        if not self.finite:
            raise SpecError("offsets undefined for infinite blocks")
        return tuple(itertools.accumulate((0,) + self.sizes[:-1]))

    def __str__(self) -> str:
        return format_gq(self)


def _uniform_perms(sizes) -> tuple:
    return tuple(
        tuple(_identity(si) if i == j else _shift(si) for j in range(len(sizes)))
        for i, si in enumerate(sizes))


def _validate(sizes, perms) -> None:
    k = len(sizes)
    if len(perms) != k or any(len(row) != k for row in perms):
        raise SpecError(f"need a {k}x{k} family of maps")
    for i, row in enumerate(perms):
        for j, p in enumerate(row):
            if len(p) != sizes[i]:
                raise SpecError(f"map ({i},{j}) has length {len(p)}, block has {sizes[i]}")
            if sorted(p) != list(range(sizes[i])):
                raise SpecError(f"map ({i},{j}) is not a bijection of block {i}")
        if row[i] != _identity(sizes[i]):
            raise SpecError(f"diagonal map ({i},{i}) must be the identity")
        for j, l in itertools.combinations(range(k), 2):
            if _compose(row[j], row[l]) != _compose(row[l], row[j]):
                raise SpecError(f"maps ({i},{j}) and ({i},{l}) do not commute")


def graphic_from_spec(s: GraphicSpec) -> MagmaTable:
    if not s.finite:
        raise SpecError("cannot tabulate a spec with infinite blocks")
    offs = s.offsets
    block = [i for i, size in enumerate(s.sizes) for _ in range(size)]
    n = sum(s.sizes)
    rows = []
    for a in range(n):
        i = block[a]
        local = a - offs[i]
        rows.append([offs[i] + s.perms[i][block[b]][local] for b in range(n)])
    return MagmaTable.from_rows(rows)


def gq_uniform(sizes) -> MagmaTable:
    """GQ(o_1 | ... | o_k): every off-diagonal map is the full cycle of its block."""
    sizes = list(sizes)
    if not sizes:
        raise SpecError("empty size list")
    return graphic_from_spec(GraphicSpec(tuple(sizes), None, True))


# ---------------------------------------------------------------- GQ strings

_CYCLE = re.compile(r"\(([^()]*)\)")


def _split_top(text: str, sep: str) -> list[str]:
    out, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise GQParseError("unbalanced parentheses")
        if ch == sep and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if depth:
        raise GQParseError("unbalanced parentheses")
    out.append("".join(cur))
    return out


def _parse_word(word: str) -> list[list[int]] | None:
    """``Id`` -> None, else the list of cycles in global labels."""
    w = word.strip()
    if re.fullmatch(r"Id(_\{.*\})?", w):
        return None
    pos = 0
    cycles = []
    for m in _CYCLE.finditer(w):
        if w[pos:m.start()].strip():
            raise GQParseError(f"unexpected text {w[pos:m.start()]!r} in {word!r}")
        body = m.group(1).replace(",", " ").split()
        try:
            cyc = [int(x) for x in body]
        except ValueError:
            raise GQParseError(f"bad cycle ({m.group(1)}) in {word!r}") from None
        if len(set(cyc)) != len(cyc):
            raise GQParseError(f"repeated element in cycle ({m.group(1)})")
        cycles.append(cyc)
        pos = m.end()
    if w[pos:].strip() or not cycles:
        raise GQParseError(f"cannot parse permutation word {word!r}")
    return cycles


def parse_gq(text: str) -> GraphicSpec:
    """Parse ``GQ(2|2|2)`` or the extended ``GQ(Id,(0 1),... | ...)`` notation.

    Blocks are consecutive; a block's extent is read off from the largest
    label used in its row (a row of identities is a singleton block).
    """
    m = re.fullmatch(r"\s*GQ\s*\((.*)\)\s*", text, flags=re.S)
    if not m:
        raise GQParseError(f"not a GQ expression: {text!r}")
    body = m.group(1)
    rows = [r.strip() for r in _split_top(body, "|")]
    if any(not r for r in rows):
        raise GQParseError("empty block in GQ expression")
    if all(re.fullmatch(r"\d+", r) for r in rows):
        sizes = tuple(int(r) for r in rows)
        if any(s < 1 for s in sizes):
            raise GQParseError("block sizes must be positive")
        return GraphicSpec(sizes, None, True)
    if any(r.lower() in ("inf", "oo", "∞") for r in rows) and all(
            re.fullmatch(r"\d+|inf|oo|∞", r.lower()) for r in rows):
        return GraphicSpec(tuple(INF if not r.isdigit() else int(r) for r in rows), None, True)

    words = [[_parse_word(w) for w in _split_top(r, ",")] for r in rows]
    k = len(words)
    for i, row in enumerate(words):
        if len(row) != k:
            raise GQParseError(f"block {i} lists {len(row)} maps, expected {k}")
    sizes = []
    start = 0
    for i, row in enumerate(words):
        labels = [x for w in row if w for cyc in w for x in cyc]
        for x in labels:
            if x < start:
                raise GQParseError(f"element {x} in block {i} lies below the block start {start}")
        size = (max(labels) - start + 1) if labels else 1
        sizes.append(size)
        start += size
    offs = list(itertools.accumulate([0] + sizes[:-1]))
    perms = []
    for i, row in enumerate(words):
        prow = []
        for w in row:
            p = _identity(sizes[i])
            for cyc in (w or []):
                local = [x - offs[i] for x in cyc]
                c = list(range(sizes[i]))
                for a, b in zip(local, local[1:] + local[:1]):
                    c[a] = b
                # left-to-right product: apply earlier cycles first
                p = _compose(tuple(c), p)
            prow.append(p)
        perms.append(tuple(prow))
    try:
        return GraphicSpec(tuple(sizes), tuple(perms))
    except SpecError as e:
        raise GQParseError(str(e)) from e


def _cycles_text(p, offset: int) -> str:
    seen = set()
    parts = []
    for s in range(len(p)):
        if s in seen or p[s] == s:
            continue
        cyc = []
        x = s
        while x not in seen:
            seen.add(x)
            cyc.append(x + offset)
            x = p[x]
        parts.append("(" + " ".join(map(str, cyc)) + ")")
    return "".join(parts) or "Id"


def format_gq(s: GraphicSpec) -> str:
    def size_text(x):
        return "inf" if x == INF else str(x)

    if s.uniform_shift:
        return "GQ(" + "|".join(size_text(x) for x in s.sizes) + ")"
    offs = s.offsets
    rows = [",".join(_cycles_text(p, offs[i]) for p in row) for i, row in enumerate(s.perms)]
    return "GQ(" + " | ".join(rows) + ")"


# ------------------------------------------------------------ classic families

def trivial(k: int) -> MagmaTable:
    if k < 1:
        raise ValueError("trivial quandle needs k >= 1")
    return MagmaTable.from_rows([[a] * k for a in range(k)])


def takasaki(factors) -> MagmaTable:
    """``a * b = 2b - a`` on the product of cyclic groups, elements in lexicographic order."""
    factors = list(factors)
    if not factors or any(m < 1 for m in factors):
        raise ValueError("factors must be positive")
    elems = list(itertools.product(*(range(m) for m in factors)))
    index = {e: i for i, e in enumerate(elems)}
    rows = [[index[tuple((2 * y - x) % m for x, y, m in zip(a, b, factors))] for b in elems]
            for a in elems]
    return MagmaTable.from_rows(rows)


def dihedral(m: int) -> MagmaTable:
    return takasaki([m])


def alexander(m: int, t: int) -> MagmaTable:
    """``a * b = t*a + (1 - t)*b`` on Z_m."""
    if m < 1:
        raise ValueError("modulus must be positive")
    if math.gcd(t, m) != 1:
        raise ValueError(f"t={t} is not a unit mod {m}")
    return MagmaTable.from_rows([[(t * a + (1 - t) * b) % m for b in range(m)] for a in range(m)])


def _group_structure(g: MagmaTable):
    if "associative" not in classify(g):
        raise ValueError("Cayley table is not associative")
    ids = [e for e in range(g.n) if all(g(e, x) == x and g(x, e) == x for x in range(g.n))]
    if not ids:
        raise ValueError("Cayley table has no identity")
    e = ids[0]
    inv = []
    for a in range(g.n):
        cand = [b for b in range(g.n) if g(a, b) == e and g(b, a) == e]
        if not cand:
            raise ValueError(f"element {a} has no inverse")
        inv.append(cand[0])
    return e, inv


def conjugation(group: MagmaTable, n: int = 1) -> MagmaTable:
    """``a * b = b^-n a b^n`` on a group given by its Cayley table."""
    e, inv = _group_structure(group)

    def power(x, k):
        base = x if k >= 0 else inv[x]
        out = e
        for _ in range(abs(k)):
            out = group(out, base)
        return out

    rows = []
    for a in range(group.n):
        row = []
        for b in range(group.n):
            bn = power(b, n)
            row.append(group(group(inv[bn], a), bn))
        rows.append(row)
    return MagmaTable.from_rows(rows)


def cyclic_group(m: int) -> MagmaTable:
    return MagmaTable.from_rows([[(a + b) % m for b in range(m)] for a in range(m)])


def symmetric_group(k: int) -> MagmaTable:
    """Cayley table of S_k; elements in lexicographic order, ``(p*q)(x) = p(q(x))``."""
    elems = list(itertools.permutations(range(k)))
    index = {p: i for i, p in enumerate(elems)}
    return MagmaTable.from_rows([[index[_compose(p, q)] for q in elems] for p in elems])


# ------------------------------------------------------------- recognition

def recognize_example13(t: MagmaTable) -> GraphicSpec | None:
    """Block-construction witness for a quandle, with blocks taken to be its orbits.

    Returns a spec whose table is isomorphic to ``t`` (orbit elements are
    relabelled consecutively), or ``None`` when ``a * b`` is not a function of
    ``a`` and the orbit of ``b`` or the induced maps fail the construction's
    requirements.  When every off-diagonal map of a block is one common full
    cycle, that block is relabelled along the cycle; if this happens for all
    blocks the spec is returned in uniform form.
    """
    if "quandle" not in classify(t):
        raise ValueError("table is not a quandle")
    orb = orbits(t)
    k = len(orb)
    perms = []
    for i, Oi in enumerate(orb.orbits):
        local = {x: p for p, x in enumerate(Oi)}
        row = []
        for Oj in orb.orbits:
            f = []
            for a in Oi:
                vals = {t(a, b) for b in Oj}
                if len(vals) != 1:
                    return None
                f.append(local[vals.pop()])
            row.append(tuple(f))
        perms.append(row)
    try:
        spec = GraphicSpec(orb.sizes, tuple(map(tuple, perms)))
    except SpecError:
        return None

    # try to present each block with the standard cycle
    relabelled = []
    uniform = True
    for i, row in enumerate(spec.perms):
        size = spec.sizes[i]
        off = {row[j] for j in range(k) if j != i}
        if size == 1:
            relabelled.append(row)
            continue
        if len(off) != 1:
            uniform = False
            relabelled.append(row)
            continue
        cyc = off.pop()
        order = [0]
        while len(order) < size and cyc[order[-1]] != 0:
            order.append(cyc[order[-1]])
        if len(order) != size:
            uniform = False
            relabelled.append(row)
            continue
        pos = {x: p for p, x in enumerate(order)}
        relabelled.append(tuple(tuple(pos[f[order[p]]] for p in range(size)) for f in row))
    if uniform:
        return GraphicSpec(spec.sizes, None, True)
    return GraphicSpec(spec.sizes, tuple(relabelled))
