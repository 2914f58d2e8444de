"""Rack, degenerate, quandle and orbit-restricted chain complexes and their homology.

The boundary of an n-tuple is

    d(x_1..x_n) = sum_{i=2..n} (-1)^i [ (x_1..^x_i..x_n)
                                        - (x_1*x_i, .., x_{i-1}*x_i, x_{i+1}, .., x_n) ]

with C_0 = 0.  Bases are lexicographic lists of tuples.  The quandle complex is
the quotient by tuples with an adjacent repeat: its boundary is the rack
boundary with degenerate terms dropped.
"""

from __future__ import annotations

import math
import threading
from collections import OrderedDict
from dataclasses import dataclass, field

import numpy as np

from .constructors import INF, GraphicSpec
from .intlin import (HomologyGroup, SmithForm, SparseIntMat, homology_of_pair,
                     smith_normal_form)
from .magma import MagmaTable, classify, orbits

__all__ = [
    "ChainSpec",
    "ChainBasis",
    "chain_basis",
    "boundary_matrix",
    "homology",
    "orbit_homology_sum",
    "H2Prediction",
    "predict_h2_graphic",
    "CocycleSpace",
    "cocycle_space_2",
    "kernel_mod",
    "span_size_mod",
    "VariantError",
]

VARIANTS = ("rack", "degenerate", "quandle", "orbit")


class VariantError(ValueError):
    pass


@dataclass(frozen=True)
class ChainSpec:
    variant: str
    degree: int
    orbit: int | None = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise VariantError(f"unknown variant {self.variant!r}")
        if self.degree < 0:
            raise VariantError("degree must be nonnegative")
        if (self.variant == "orbit") != (self.orbit is not None):
            raise VariantError("orbit index goes with the orbit variant only")

    def at(self, degree: int) -> "ChainSpec":
        return ChainSpec(self.variant, degree, self.orbit)

    @classmethod
    def parse(cls, text: str, degree: int) -> "ChainSpec":
        """``rack``, ``quandle``, ``degenerate`` or ``orbit=<i>``."""
        if text.startswith("orbit="):
            return cls("orbit", degree, int(text.split("=", 1)[1]))
        return cls(text, degree)

    def __str__(self) -> str:
        return f"orbit={self.orbit}" if self.variant == "orbit" else self.variant


@dataclass(frozen=True, eq=False)
class ChainBasis:
    """Lexicographically ordered basis tuples of one chain group."""

    n: int
    degree: int
    tuples: np.ndarray = field(repr=False)   # shape (len, degree)
    lookup: np.ndarray = field(repr=False)   # rack index -> basis position, -1 if absent

    def __len__(self) -> int:
        return self.tuples.shape[0]

    def index(self, tup) -> int:
        code = 0
        for x in tup:
            code = code * self.n + int(x)
        pos = int(self.lookup[code])
        if pos < 0:
            raise KeyError(tup)
        return pos

    def __getitem__(self, i: int) -> tuple[int, ...]:
        return tuple(int(x) for x in self.tuples[i])


def _check_variant(t: MagmaTable, spec: ChainSpec) -> None:
    cls = classify(t)
    if "shelf" not in cls:
        raise VariantError("chain complexes need a shelf")
    if spec.variant in ("degenerate", "quandle") and "spindle" not in cls:
        raise VariantError(f"the {spec.variant} complex needs a spindle")
    if spec.variant == "orbit":
        k = len(orbits(t))
        if not 0 <= spec.orbit < k:
            raise VariantError(f"orbit index {spec.orbit} out of range (k={k})")


def _all_tuples(n: int, degree: int) -> np.ndarray:
    if degree == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.indices((n,) * degree, dtype=np.int64).reshape(degree, -1)
    return grids.T.copy()


def chain_basis(t: MagmaTable, spec: ChainSpec) -> ChainBasis:
    n, d = t.n, spec.degree
    if d == 0:
        return ChainBasis(n, 0, np.zeros((0, 0), dtype=np.int64), np.full(1, -1, dtype=np.int64))
    tuples = _all_tuples(n, d)
    if spec.variant in ("degenerate", "quandle"):
        rep = np.zeros(tuples.shape[0], dtype=bool)
        for i in range(d - 1):
            rep |= tuples[:, i] == tuples[:, i + 1]
        keep = rep if spec.variant == "degenerate" else ~rep
    elif spec.variant == "orbit":
        orb = orbits(t)
        members = np.zeros(n, dtype=bool)
        members[list(orb.orbits[spec.orbit])] = True
        keep = members[tuples[:, 0]]
    else:
        keep = np.ones(tuples.shape[0], dtype=bool)
    lookup = np.full(tuples.shape[0], -1, dtype=np.int64)
    lookup[keep] = np.arange(int(keep.sum()))
    return ChainBasis(n, d, tuples[keep], lookup)


def _encode(arr: np.ndarray, n: int) -> np.ndarray:
    code = np.zeros(arr.shape[0], dtype=np.int64)
    for j in range(arr.shape[1]):
        code = code * n + arr[:, j]
    return code


def boundary_matrix(t: MagmaTable, spec: ChainSpec) -> SparseIntMat:
    """Matrix of the boundary from degree ``spec.degree`` to ``spec.degree - 1``."""
    _check_variant(t, spec)
    return _boundary(t, spec)


def _boundary(t: MagmaTable, spec: ChainSpec) -> SparseIntMat:
    d = spec.degree
    src = chain_basis(t, spec)
    dst = chain_basis(t, spec.at(d - 1)) if d >= 1 else None
    if d <= 1:
        return SparseIntMat.zeros(len(dst) if dst is not None else 0, len(src))
    T = t.array
    A = src.tuples
    N = A.shape[0]
    cols = np.arange(N, dtype=np.int64)
    rows_parts, cols_parts, vals_parts = [], [], []
    missed = []  # (column, encoded tuple, sign) for terms outside the target basis
    for i in range(1, d):  # 0-based position of x_{i+1}
        sign = 1 if (i + 1) % 2 == 0 else -1
        face = np.delete(A, i, axis=1)
        acted = face.copy()
        acted[:, :i] = T[A[:, :i], A[:, i:i + 1]]
        for tuples, s in ((face, sign), (acted, -sign)):
            pos = dst.lookup[_encode(tuples, t.n)]
            hit = pos >= 0
            if spec.variant == "degenerate" and not hit.all():
                codes = _encode(tuples[~hit], t.n)
                missed.append((cols[~hit], codes, np.full(len(codes), s, dtype=np.int64)))
            rows_parts.append(pos[hit])
            cols_parts.append(cols[hit])
            vals_parts.append(np.full(int(hit.sum()), s, dtype=np.int64))
    if missed:
        # nondegenerate faces of degenerate tuples must cancel in pairs
        mc = np.concatenate([m[0] for m in missed])
        mk = np.concatenate([m[1] for m in missed])
        mv = np.concatenate([m[2] for m in missed])
        key = mc * t.n ** (d - 1) + mk
        order = np.argsort(key, kind="stable")
        _, start = np.unique(key[order], return_index=True)
        if np.any(np.add.reduceat(mv[order], start)):
            raise VariantError("degenerate chains are not closed under the boundary")
    rows = np.concatenate(rows_parts)
    colv = np.concatenate(cols_parts)
    vals = np.concatenate(vals_parts)
    key = colv * len(dst) + rows
    order = np.argsort(key, kind="stable")
    key, vals = key[order], vals[order]
    uniq, start = np.unique(key, return_index=True)
    sums = np.add.reduceat(vals, start) if len(vals) else vals
    nz = sums != 0
    uniq, sums = uniq[nz], sums[nz]
    columns: dict = {}
    for k, v in zip((uniq // len(dst)).tolist(), zip((uniq % len(dst)).tolist(), sums.tolist())):
        columns.setdefault(k, {})[v[0]] = v[1]
    return SparseIntMat(len(dst), N, columns)


class _SNFCache:
    """Bounded cache of Smith forms keyed by (table, variant, degree)."""

    def __init__(self, maxsize: int = 256):
        self.maxsize = maxsize
        self._data: OrderedDict = OrderedDict()
        self._lock = threading.Lock()

    def get(self, key):
        with self._lock:
            if key in self._data:
                self._data.move_to_end(key)
                return self._data[key]
        return None

    def put(self, key, value):
        with self._lock:
            self._data[key] = value
            self._data.move_to_end(key)
            while len(self._data) > self.maxsize:
                self._data.popitem(last=False)

    def clear(self):
        with self._lock:
            self._data.clear()


snf_cache = _SNFCache()


def _boundary_snf(t: MagmaTable, spec: ChainSpec, M: SparseIntMat | None = None,
                  max_entries: int | None = None) -> SmithForm:
    key = (t.key(), t.n, spec)
    hit = snf_cache.get(key)
    if hit is not None:
        return hit
    if M is None:
        M = _boundary(t, spec)
    snf = smith_normal_form(M, max_entries)
    snf_cache.put(key, snf)
    return snf


def homology(t: MagmaTable, spec: ChainSpec, check: bool = True,
             max_entries: int | None = None) -> HomologyGroup:
    """H_n of the chosen complex, n = ``spec.degree`` >= 1.

    With ``check`` the composite of the two boundaries is verified to vanish.
    ``max_entries`` bounds the Smith-form workspace (see smith_normal_form).
    """
    if spec.degree < 1:
        raise VariantError("homology is computed in degrees >= 1")
    _check_variant(t, spec)
    d_n = _boundary(t, spec)
    d_np1 = _boundary(t, spec.at(spec.degree + 1))
    return homology_of_pair(d_n, d_np1, check=check,
                            snf_n=_boundary_snf(t, spec, d_n, max_entries),
                            snf_np1=_boundary_snf(t, spec.at(spec.degree + 1), d_np1, max_entries))


def orbit_homology_sum(t: MagmaTable, n: int, check: bool = True) -> list[HomologyGroup]:
    """Homology of each orbit subcomplex; the rack homology is their direct sum."""
    if "rack" not in classify(t):
        raise VariantError("orbit splitting needs a rack")
    k = len(orbits(t))
    return [homology(t, ChainSpec("orbit", n, i), check=check) for i in range(k)]


# ----------------------------------------------------------- closed form H_2

@dataclass(frozen=True)
class H2Prediction:
    """Second homology of a uniform GQ from the closed-form results."""

    sizes: tuple
    per_orbit: tuple[HomologyGroup, ...]
    rack: HomologyGroup
    degenerate: HomologyGroup
    quandle: HomologyGroup
    note: str = ""

    def to_json(self) -> dict:
        return {
            "sizes": ["inf" if s == INF else s for s in self.sizes],
            "per_orbit": [g.to_json() for g in self.per_orbit],
            "rack": self.rack.to_json(),
            "degenerate": self.degenerate.to_json(),
            "quandle": self.quandle.to_json(),
            "note": self.note,
        }


def _gcd_finite(values) -> int:
    g = 0
    for v in values:
        if v != INF:
            g = math.gcd(g, int(v))
    return g


def predict_h2_graphic(s: GraphicSpec) -> H2Prediction:
    """H_2 of GQ(o_1|...|o_k), k >= 2, with sizes possibly infinite.

    k = 2: each orbit gives Z^2 + Z_gcd when both sizes are finite, Z^2 when
    both are infinite, and Z + Z_o (o the finite size) otherwise.  k >= 3:
    each orbit gives Z^k + Z_gcd(2, o_1, ..., o_k), one Z fewer for an
    infinite orbit; infinite sizes are ignored by the gcd.
    """
    if not s.uniform_shift:
        raise ValueError("the closed form covers uniform GQ specs only")
    k = s.k
    if k < 2:
        raise ValueError("the closed form needs at least two orbits; use the matrix path")
    sizes = s.sizes
    per = []
    note = ""
    if k == 2:
        o1, o2 = sizes
        for mine, other in ((o1, o2), (o2, o1)):
            if mine != INF and other != INF:
                per.append(HomologyGroup(2, (math.gcd(mine, other),)))
            elif mine == INF and other == INF:
                per.append(HomologyGroup(2, ()))
            else:
                per.append(HomologyGroup(1, (_gcd_finite((mine, other)),)))
    else:
        g = _gcd_finite((2,) + sizes)
        for o in sizes:
            per.append(HomologyGroup(k - (1 if o == INF else 0), (g,)))
        if k == 3:
            note = "k=3: boundary case of the formula for three or more orbits"
    rack = HomologyGroup(0)
    for g in per:
        rack = rack + g
    degenerate = HomologyGroup.free(k)
    quandle = HomologyGroup(rack.free_rank - k, rack.torsion)
    return H2Prediction(tuple(sizes), tuple(per), rack, degenerate, quandle, note)


# ------------------------------------------------------------ 2-cocycles mod m

def kernel_mod(columns: list[list[int]], m: int, nrows: int) -> list[list[int]]:
    """Generators of ``{v : A v = 0 mod m}``, A given by its columns.

    Column reduction over Z_m with the identity carried alongside; after a
    row is pivoted, the multiple of the pivot column killing that row is fed
    back so the generating set stays complete when m is composite.
    """
    N = len(columns)
    if N == 0:
        return []
    top = np.array(columns, dtype=object).reshape(N, nrows) % m
    bot = np.eye(N, dtype=object) % m
    pool_top = [top[j] for j in range(N)]
    pool_bot = [bot[j] for j in range(N)]
    for r in range(nrows):
        live = [j for j in range(len(pool_top)) if pool_top[j][r] % m]
        if not live:
            continue
        keep = [j for j in range(len(pool_top)) if not pool_top[j][r] % m]
        rest_top = [pool_top[j] for j in keep]
        rest_bot = [pool_bot[j] for j in keep]
        t, b = pool_top[live[0]], pool_bot[live[0]]
        for j in live[1:]:
            u, w = pool_top[j], pool_bot[j]
            a, c = int(t[r]), int(u[r])
            g, x, y = _xgcd(a, c)
            ag, cg = a // g, c // g
            rest_top.append((cg * t - ag * u) % m)
            rest_bot.append((cg * b - ag * w) % m)
            t, b = (x * t + y * u) % m, (x * b + y * w) % m
        mult = m // math.gcd(int(t[r]), m)
        rest_top.append((mult * t) % m)
        rest_bot.append((mult * b) % m)
        pairs = [(pt, pb) for pt, pb in zip(rest_top, rest_bot) if pb.any()]
        pool_top = [p[0] for p in pairs]
        pool_bot = [p[1] for p in pairs]
    return [[int(x) for x in v] for v in pool_bot]


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q = a // b
        a, b = b, a - q * b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def span_size_mod(vectors: list[list[int]], m: int, dim: int) -> int:
    """Order of the subgroup of (Z_m)^dim generated by ``vectors``."""
    cols = {j: {i: v for i, v in enumerate(vec) if v % m} for j, vec in enumerate(vectors)}
    base = len(vectors)
    for i in range(dim):
        cols[base + i] = {i: m}
    snf = smith_normal_form(SparseIntMat(dim, base + dim, cols))
    return m ** dim // math.prod(snf.invariant_factors)


@dataclass(frozen=True)
class CocycleSpace:
    """Quandle 2-cocycles and 2-coboundaries with Z_m coefficients.

    Cochains are vectors over the ordered pairs ``(x, y)``, ``x != y``
    (``pairs``); the diagonal is zero by convention.
    """

    m: int
    pairs: tuple[tuple[int, int], ...]
    cocycles: tuple[tuple[int, ...], ...]
    coboundaries: tuple[tuple[int, ...], ...]

    def as_table(self, vec, n: int) -> list[list[int]]:
        out = [[0] * n for _ in range(n)]
        for (x, y), v in zip(self.pairs, vec):
            out[x][y] = v % self.m
        return out

    @property
    def cocycle_count(self) -> int:
        return span_size_mod([list(v) for v in self.cocycles], self.m, len(self.pairs))

    @property
    def coboundary_count(self) -> int:
        return span_size_mod([list(v) for v in self.coboundaries], self.m, len(self.pairs))

    @property
    def cohomology_order(self) -> int:
        return self.cocycle_count // self.coboundary_count


def cocycle_space_2(t: MagmaTable, m: int) -> CocycleSpace:
    """Generators of the quandle 2-cocycles and 2-coboundaries of ``t`` over Z_m."""
    if "quandle" not in classify(t):
        raise VariantError("cocycle spaces are computed for quandles")
    if m < 2:
        raise ValueError("modulus must be at least 2")
    d3 = _boundary(t, ChainSpec("quandle", 3))
    d2 = _boundary(t, ChainSpec("quandle", 2))
    basis2 = chain_basis(t, ChainSpec("quandle", 2))
    pairs = tuple(basis2[i] for i in range(len(basis2)))
    # delta^2 = transpose of d3: one row per triple, one column per pair
    d3t = d3.transpose()
    columns = [[0] * d3t.rows for _ in range(d3t.cols)]
    for r, c, v in d3t.entries():
        columns[c][r] = v
    cocycles = kernel_mod(columns, m, d3t.rows)
    d2t = d2.transpose()
    cob = [[0] * d2t.rows for _ in range(d2t.cols)]
    for r, c, v in d2t.entries():
        cob[c][r] = v % m
    # row x of cob is delta^1 of the indicator of x
    coboundaries = [v for v in cob if any(v)]
    return CocycleSpace(m, pairs, tuple(map(tuple, cocycles)), tuple(map(tuple, coboundaries)))
