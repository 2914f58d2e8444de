"""Signed PD diagrams, quandle colorings and the 2-cocycle state sum.

A crossing ``X+(a,b,c,d)`` lists four edge labels: ``a`` enters as the
under-strand, ``c`` leaves as the under-strand, and the over-strand enters
as ``b`` and leaves as ``d``.  Coloring rule: color(b) == color(d) and
color(c) == color(a) * color(b) at a positive crossing, color(a) ∗̄ color(b)
at a negative one.  ``U(a)`` is a crossingless circle.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass

from .extensions import Cocycle2, is_2_cocycle
from .magma import MagmaTable, classify

__all__ = [
    "Crossing",
    "LinkDiagram",
    "Coloring",
    "InvariantMultiset",
    "PDParseError",
    "parse_pd",
    "colorings",
    "count_colorings",
    "cocycle_invariant",
    "FIXTURE_DIAGRAMS",
]

FIXTURE_DIAGRAMS = {
    "unknot": "U(1)",
    "unknot_kink": "X+(1,2,2,1)",
    "unknot_kink_neg": "X-(1,2,2,1)",
    "trefoil": "X+(1,4,2,5) X+(3,6,4,1) X+(5,2,6,3)",
    # positive kink inserted on edge 1
    "trefoil_r1": "X+(7,4,2,5) X+(3,6,4,1) X+(5,2,6,3) X+(1,8,8,7)",
    # negative kink inserted on edge 1
    "trefoil_r1_neg": "X+(7,4,2,5) X+(3,6,4,1) X+(5,2,6,3) X-(1,8,8,7)",
    # edge 4 pushed over edge 1 across their common bigon
    "trefoil_r2": "X+(10,8,2,5) X+(3,6,4,1) X+(5,2,6,3) X+(1,4,9,7) X-(9,7,10,8)",
}

_TERM = re.compile(r"^(X[+-]|U)\(([^()]*)\)$")


class PDParseError(ValueError):
    pass


@dataclass(frozen=True)
class Crossing:
    sign: int
    a: int
    b: int
    c: int
    d: int

    def __str__(self) -> str:
        s = "+" if self.sign > 0 else "-"
        return f"X{s}({self.a},{self.b},{self.c},{self.d})"


@dataclass(frozen=True)
class LinkDiagram:
    crossings: tuple[Crossing, ...]
    circles: tuple[int, ...] = ()

    @property
    def arcs(self) -> tuple[int, ...]:
        """Edge labels, sorted."""
        labels = set(self.circles)
        for x in self.crossings:
            labels.update((x.a, x.b, x.c, x.d))
        return tuple(sorted(labels))

    @property
    def components(self) -> int:
        parent = {e: e for e in self.arcs}

        def find(e):
            while parent[e] != e:
                parent[e] = parent[parent[e]]
                e = parent[e]
            return e

        for x in self.crossings:
            for u, v in ((x.a, x.c), (x.b, x.d)):
                parent[find(u)] = find(v)
        return len({find(e) for e in self.arcs})

    def __str__(self) -> str:
        return " ".join([str(x) for x in self.crossings] + [f"U({e})" for e in self.circles])


def parse_pd(s: str) -> LinkDiagram:
    terms = s.split()
    if not terms:
        raise PDParseError("empty diagram; write U(1) for the unknot")
    crossings = []
    circles = []
    starts: dict[int, str] = {}
    ends: dict[int, str] = {}
    for term in terms:
        m = _TERM.match(term)
        if not m:
            raise PDParseError(f"unknown token {term!r}")
        try:
            labels = [int(v) for v in m.group(2).split(",")]
        except ValueError:
            raise PDParseError(f"non-integer label in {term!r}") from None
        if any(v < 1 for v in labels):
            raise PDParseError(f"labels must be positive in {term!r}")
        if m.group(1) == "U":
            if len(labels) != 1:
                raise PDParseError(f"U takes one label: {term!r}")
            e = labels[0]
            for slots in (starts, ends):
                if e in slots:
                    raise PDParseError(f"label {e} in {term!r} already used by {slots[e]}")
                slots[e] = term
            circles.append(e)
            continue
        if len(labels) != 4:
            raise PDParseError(f"crossing needs four labels: {term!r}")
        a, b, c, d = labels
        for e, slots in ((a, ends), (b, ends), (c, starts), (d, starts)):
            if e in slots:
                raise PDParseError(f"label {e} in {term!r} already used by {slots[e]}")
            slots[e] = term
        crossings.append(Crossing(1 if m.group(1) == "X+" else -1, a, b, c, d))
    for e in sorted(set(starts) ^ set(ends)):
        where = starts.get(e) or ends.get(e)
        raise PDParseError(f"label {e} in {where} appears only once")
    return LinkDiagram(tuple(crossings), tuple(circles))


@dataclass(frozen=True)
class Coloring:
    assignment: dict

    def __getitem__(self, label: int) -> int:
        return self.assignment[label]


def _strands(d: LinkDiagram) -> tuple[dict, int]:
    """Map each edge label to a strand index (edges joined through over-passes)."""
    parent = {e: e for e in d.arcs}

    def find(e):
        while parent[e] != e:
            parent[e] = parent[parent[e]]
            e = parent[e]
        return e

    for x in d.crossings:
        parent[find(x.b)] = find(x.d)
    roots = sorted({find(e) for e in d.arcs})
    index = {r: i for i, r in enumerate(roots)}
    return {e: index[find(e)] for e in d.arcs}, len(roots)


def colorings(d: LinkDiagram, t: MagmaTable) -> list[Coloring]:
    """All colorings of ``d`` by ``t``, by propagation and backtracking over strands."""
    if "rack" not in classify(t):
        raise ValueError("colorings need a rack")
    strand, k = _strands(d)
    op, rdiv = t.op, t.right_division
    # (in, over, out, sign) on strand indices
    rules = [(strand[x.a], strand[x.b], strand[x.c], x.sign) for x in d.crossings]
    out: list[Coloring] = []
    color = [-1] * k

    def propagate(trail) -> bool:
        changed = True
        while changed:
            changed = False
            for i, o, j, s in rules:
                ci, co, cj = color[i], color[o], color[j]
                if co < 0:
                    continue
                if ci >= 0:
                    want = op[ci][co] if s > 0 else rdiv[ci][co]
                    if cj < 0:
                        color[j] = want
                        trail.append(j)
                        changed = True
                    elif cj != want:
                        return False
                elif cj >= 0:
                    color[i] = rdiv[cj][co] if s > 0 else op[cj][co]
                    trail.append(i)
                    changed = True
        return True

    def search():
        try:
            s = color.index(-1)
        except ValueError:
            out.append(Coloring({e: color[strand[e]] for e in d.arcs}))
            return
        for v in range(t.n):
            color[s] = v
            trail = [s]
            if propagate(trail):
                search()
            for x in trail:
                color[x] = -1

    search()
    return out


def count_colorings(d: LinkDiagram, t: MagmaTable) -> int:
    return len(colorings(d, t))


@dataclass(frozen=True)
class InvariantMultiset:
    m: int
    counts: dict

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def to_json(self) -> dict:
        return {"m": self.m, "multiset": {str(v): self.counts.get(v, 0) for v in range(self.m)}}


def cocycle_invariant(d: LinkDiagram, t: MagmaTable, c: Cocycle2) -> InvariantMultiset:
    """Multiset over colorings of the summed crossing weights in Z_m.

    A crossing with over color y contributes sign * phi(x, y), where x is the
    under color whose product with y is the other under color: the incoming
    one at a positive crossing, the outgoing one at a negative crossing.
    """
    if "quandle" not in classify(t):
        raise ValueError("the state sum is defined over quandles")
    if not is_2_cocycle(t, c):
        raise ValueError("phi is not a quandle 2-cocycle on this table")
    counts: Counter = Counter()
    for col in colorings(d, t):
        w = 0
        for x in d.crossings:
            src = col[x.a] if x.sign > 0 else col[x.c]
            w += x.sign * c(src, col[x.b])
        counts[w % c.m] += 1
    return InvariantMultiset(c.m, dict(sorted(counts.items())))
