"""Quandles of small order up to isomorphism.

A quandle is determined by its right translations R_b (a -> a*b), each a
permutation fixing b, subject to R_c R_b R_c^-1 = R_{R_c(b)}.  The search
picks R_0 up to conjugacy by permutations fixing 0, then the remaining
translations in order, filling every translation forced by the relation.
Each complete table is reduced to its lexicographically least relabelling.
"""

from __future__ import annotations

import itertools
import json
import logging
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .constructors import recognize_example13
from .magma import MagmaTable, classify, find_quasigroup_subspindles

__all__ = [
    "CensusResult",
    "ClassReport",
    "StructureReport",
    "canonical_form",
    "enumerate_quandles",
    "census_structure_report",
    "write_census",
    "TABLE1",
]

log = logging.getLogger(__name__)

# known class counts for orders 1..6: (quandles, graphic quandles)
TABLE1 = {1: (1, 1), 2: (1, 1), 3: (3, 2), 4: (7, 5), 5: (22, 15), 6: (73, 56)}

EXACT_MAX = 6


def _all_perms(n: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(n))), dtype=np.int64).reshape(-1, n)


def _relabellings(t: np.ndarray, perms: np.ndarray) -> np.ndarray:
    """Every table sigma(t), one flattened row per permutation."""
    n = t.shape[0]
    inv = np.argsort(perms, axis=1)
    rows = np.arange(len(perms))[:, None, None]
    out = perms[rows, t[inv[:, :, None], inv[:, None, :]]]
    return out.reshape(len(perms), n * n)


def canonical_form(t: MagmaTable, perms: np.ndarray | None = None) -> MagmaTable:
    """Lexicographically least table isomorphic to ``t``."""
    if perms is None:
        perms = _all_perms(t.n)
    flat = _relabellings(t.array, perms)
    best = np.lexsort(flat.T[::-1])[0]
    return MagmaTable.from_array(flat[best].reshape(t.n, t.n))


def _root_choices(n: int) -> list[tuple[int, ...]]:
    """One permutation fixing 0 per cycle type on {1..n-1}, as a tuple."""
    out = []
    for parts in _partitions(n - 1):
        p = list(range(n))
        start = 1
        for size in parts:
            block = list(range(start, start + size))
            for i, x in enumerate(block):
                p[x] = block[(i + 1) % size]
            start += size
        out.append(tuple(p))
    return out


def _partitions(m: int, largest: int | None = None):
    if m == 0:
        yield ()
        return
    largest = m if largest is None else largest
    for first in range(min(m, largest), 0, -1):
        for rest in _partitions(m - first, first):
            yield (first,) + rest


def _compose(p, q):
    """p after q."""
    return tuple(p[x] for x in q)


def _inverse(p):
    out = [0] * len(p)
    for i, x in enumerate(p):
        out[x] = i
    return tuple(out)


def _close(R: list, n: int) -> bool:
    """Fill translations forced by R_c R_b R_c^-1 = R_{R_c(b)}; False on conflict."""
    changed = True
    while changed:
        changed = False
        known = [b for b in range(n) if R[b] is not None]
        for c in known:
            Rc = R[c]
            Rc_inv = _inverse(Rc)
            for b in known:
                want = _compose(_compose(Rc, R[b]), Rc_inv)
                target = Rc[b]
                if R[target] is None:
                    R[target] = want
                    changed = True
                elif R[target] != want:
                    return False
            if changed:
                break
    return True


def _branch(args) -> list[bytes]:
    """Canonical keys of all quandles of order n whose R_0 is ``root``."""
    n, root = args
    perms = _all_perms(n)
    fixing = [[p for p in map(tuple, perms.tolist()) if p[b] == b] for b in range(n)]
    seen: set[bytes] = set()
    found: list[bytes] = []

    def emit(R):
        table = np.array([[R[b][a] for b in range(n)] for a in range(n)], dtype=np.int64)
        key = table.tobytes()
        if key in seen:
            return
        flat = _relabellings(table, perms)
        for row in flat:
            seen.add(row.tobytes())
        best = flat[np.lexsort(flat.T[::-1])[0]]
        found.append(bytes(int(x) for x in best))

    def search(R):
        try:
            b = R.index(None)
        except ValueError:
            emit(R)
            return
        for p in fixing[b]:
            S = list(R)
            S[b] = p
            if _close(S, n):
                search(S)

    R0 = [None] * n
    R0[0] = root
    if _close(R0, n):
        search(R0)
    return found


@dataclass(frozen=True)
class CensusResult:
    n: int
    total_quandles: int
    graphic_quandles: int
    representatives: tuple[MagmaTable, ...]
    flags: tuple[frozenset, ...] = field(repr=False)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "total_quandles": self.total_quandles,
            "graphic_quandles": self.graphic_quandles,
            "classes": [
                {"index": i + 1, "flags": sorted(f), "op": [list(r) for r in t.op]}
                for i, (t, f) in enumerate(zip(self.representatives, self.flags))
            ],
        }


def enumerate_quandles(n: int, workers: int = 1) -> CensusResult:
    """One lexicographically least representative per isomorphism class."""
    if n < 1:
        raise ValueError("order must be positive")
    if n > EXACT_MAX:
        warnings.warn(f"census beyond order {EXACT_MAX} is slow and unchecked", stacklevel=2)
    if n == 1:
        keys = [bytes([0])]
    else:
        jobs = [(n, r) for r in _root_choices(n)]
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                parts = list(pool.map(_branch, jobs))
        else:
            parts = [_branch(j) for j in jobs]
        keys = sorted({k for part in parts for k in part})
    reps = tuple(MagmaTable(n, tuple(tuple(k[i * n:(i + 1) * n]) for i in range(n))) for k in keys)
    flags = tuple(classify(t).flags for t in reps)
    graphic = sum(1 for f in flags if "graphic" in f)
    log.info("order %d: %d quandles, %d graphic", n, len(reps), graphic)
    return CensusResult(n, len(reps), graphic, reps, flags)


@dataclass(frozen=True)
class ClassReport:
    n: int
    index: int
    graphic: bool
    quasigroup_subquandle: bool
    constructible: bool

    @property
    def graphic_or_quasigroup(self) -> bool:
        return self.graphic or self.quasigroup_subquandle


@dataclass(frozen=True)
class StructureReport:
    classes: tuple[ClassReport, ...]

    @property
    def total(self) -> int:
        return len(self.classes)

    @property
    def graphic_or_quasigroup(self) -> int:
        return sum(c.graphic_or_quasigroup for c in self.classes)

    @property
    def graphic_constructible(self) -> tuple[int, int]:
        g = [c for c in self.classes if c.graphic]
        return sum(c.constructible for c in g), len(g)

    def to_json(self) -> dict:
        built, graphic = self.graphic_constructible
        return {
            "total": self.total,
            "graphic_or_quasigroup": self.graphic_or_quasigroup,
            "graphic": graphic,
            "graphic_constructible": built,
            "classes": [vars(c) for c in self.classes],
        }


def census_structure_report(n: int, workers: int = 1) -> StructureReport:
    """Per-class structure for every order 1..n, aggregated."""
    if n > EXACT_MAX:
        raise ValueError(f"structure report covers orders up to {EXACT_MAX}")
    out = []
    for k in range(1, n + 1):
        res = enumerate_quandles(k, workers)
        for i, (t, f) in enumerate(zip(res.representatives, res.flags)):
            out.append(ClassReport(
                n=k,
                index=i + 1,
                graphic="graphic" in f,
                quasigroup_subquandle=bool(find_quasigroup_subspindles(t)),
                constructible=recognize_example13(t) is not None,
            ))
    return StructureReport(tuple(out))


def write_census(res: CensusResult, directory) -> Path:
    """Write ``q<n>_<i>.tbl`` files and ``manifest.json``; return the manifest path."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    entries = []
    for i, (t, f) in enumerate(zip(res.representatives, res.flags), start=1):
        name = f"q{res.n}_{i}.tbl"
        (d / name).write_text(t.to_text())
        entries.append({"file": name, "flags": sorted(f)})
    manifest = {
        "n": res.n,
        "total_quandles": res.total_quandles,
        "graphic_quandles": res.graphic_quandles,
        "classes": entries,
    }
    path = d / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + os.linesep)
    return path
