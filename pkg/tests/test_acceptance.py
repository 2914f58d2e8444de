"""End-to-end acceptance criteria, one test per criterion.

Each test records its cells and prints a single PASS/FAIL line; failing
cells are listed in the assertion message.  Expected values are the
fixed reference constants, not values this package computes.
"""

import itertools
import math
import subprocess
import sys
import time
from pathlib import Path

import pytest

from oracles import all_racks, satisfies
from rackhom.census import enumerate_quandles
from rackhom.cli import TABLE5, RunConfig, scan_c31, scan_c32
from rackhom.constructors import (GraphicSpec, dihedral, gq_uniform, graphic_from_spec, parse_gq,
                                  trivial)
from rackhom.extensions import Cocycle2, verify_prop_213
from rackhom.homology import (ChainSpec, boundary_matrix, cocycle_space_2, homology,
                              orbit_homology_sum, predict_h2_graphic)
from rackhom.intlin import HomologyGroup
from rackhom.knots import FIXTURE_DIAGRAMS, cocycle_invariant, count_colorings, parse_pd
from rackhom.magma import MagmaTable, orbits

RESULTS: dict[int, str] = {}


class Criterion:
    def __init__(self, number: int, title: str, limit_s: float):
        self.number, self.title, self.limit = number, title, limit_s
        self.failures: list[str] = []
        self.cells = 0

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def check(self, ok: bool, label: str):
        self.cells += 1
        if not ok:
            self.failures.append(label)

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.start
        if exc_type is None and elapsed > self.limit:
            self.failures.append(f"took {elapsed:.1f}s > {self.limit:.0f}s")
        status = "PASS" if exc_type is None and not self.failures else "FAIL"
        detail = f"{self.cells - len(self.failures)}/{self.cells} cells, {elapsed:.1f}s"
        if exc_type is not None:
            detail += f", error {exc_type.__name__}"
        line = f"criterion {self.number:2d} {status}: {self.title} ({detail})"
        RESULTS[self.number] = line
        print(line)
        if exc_type is None:
            assert not self.failures, "; ".join(self.failures)
        return False


def H(t, variant, n, orbit=None):
    return homology(t, ChainSpec(variant, n, orbit))


@pytest.fixture(scope="module")
def quandles_to_6():
    return [t for n in range(1, 7) for t in enumerate_quandles(n).representatives]


def test_criterion_01_census():
    want_q = (1, 1, 3, 7, 22, 73)
    want_g = (1, 1, 2, 5, 15, 56)
    with Criterion(1, "census counts for orders 1..6", 15 * 60) as c:
        for n in range(1, 7):
            res = enumerate_quandles(n)
            c.check(res.total_quandles == want_q[n - 1],
                    f"n={n} quandles {res.total_quandles} != {want_q[n - 1]}")
            c.check(res.graphic_quandles == want_g[n - 1],
                    f"n={n} graphic {res.graphic_quandles} != {want_g[n - 1]}")


def test_criterion_02_two_orbits():
    with Criterion(2, "H2 of GQ(o1|o2) for o1, o2 <= 5", 10) as c:
        for o1, o2 in itertools.product(range(1, 6), repeat=2):
            g = H(gq_uniform([o1, o2]), "rack", 2)
            want = HomologyGroup(4, (math.gcd(o1, o2),) * 2)
            c.check(g == want, f"({o1},{o2}) {g.primary()} != {want.primary()}")


def _size_vectors():
    for k in (3, 4):
        for sizes in itertools.combinations_with_replacement((2, 3, 4), k):
            if sum(sizes) <= 10:
                yield sizes


def test_criterion_03_many_orbits():
    with Criterion(3, "per-orbit H2 for k in {3,4}", 60) as c:
        for sizes in _size_vectors():
            k = len(sizes)
            t = gq_uniform(list(sizes))
            g = math.gcd(2, *sizes)
            for i, part in enumerate(orbit_homology_sum(t, 2)):
                want = HomologyGroup(k, (g,))
                c.check(part == want, f"{sizes} orbit {i}: {part.primary()} != {want.primary()}")
            total = H(t, "rack", 2)
            c.check(total.free_rank == k * k, f"{sizes} total rank {total.free_rank}")


TABLE5_EXPECTED = [
    # row, degrees -> expected torsion
    (1, {2: (2,) * 3, 3: (2,) * 15, 4: (2,) * 75}, 300),
    (2, {1: (), 2: (), 3: (3,) * 3}, 300),
    (3, {1: (), 2: (), 3: (), 4: (2,) * 4}, 300),
    (4, {3: (4,) * 3}, 1200),
    (5, {2: (2,) * 3, 3: (2,) * 6 + (4,) * 3}, 1200),
]


def test_criterion_04_table5():
    with Criterion(4, "finite torsion of the five table5 quandles", 3 * 300 + 2 * 1200) as c:
        for row, cells, limit in TABLE5_EXPECTED:
            t = graphic_from_spec(parse_gq(TABLE5[row - 1]))
            start = time.perf_counter()
            for n, want in cells.items():
                got = H(t, "rack", n)
                w = HomologyGroup(0, want)
                c.check(sorted(got.torsion) == sorted(w.torsion),
                        f"row {row} n={n}: {HomologyGroup(0, got.torsion).primary()} "
                        f"!= {w.primary()}")
            c.check(time.perf_counter() - start <= limit, f"row {row} over {limit}s")


def test_criterion_05_rank_law(quandles_to_6):
    with Criterion(5, "free ranks k^n and k(k-1)^(n-1)", 10 * 60) as c:
        for t in quandles_to_6:
            k = len(orbits(t))
            for n in (1, 2, 3):
                r = H(t, "rack", n).free_rank
                q = H(t, "quandle", n).free_rank
                c.check(r == k ** n, f"{t.op} rack n={n}: {r}")
                c.check(q == k * (k - 1) ** (n - 1), f"{t.op} quandle n={n}: {q}")


def test_criterion_06_splitting(quandles_to_6):
    with Criterion(6, "rack = quandle + degenerate splittings", 20 * 60) as c:
        for t in quandles_to_6:
            k = len(orbits(t))
            h2q, h3q = H(t, "quandle", 2), H(t, "quandle", 3)
            c.check(H(t, "rack", 2) == h2q + HomologyGroup(k), f"{t.op} n=2")
            c.check(H(t, "rack", 3) == h3q + h2q + HomologyGroup(k * k), f"{t.op} n=3")
            if t.n <= 4:
                side = HomologyGroup(k).tensor(h2q)
                want = H(t, "quandle", 4) + h3q + side + side + HomologyGroup(k * k)
                c.check(H(t, "rack", 4) == want, f"{t.op} n=4")


def test_criterion_07_dihedral():
    with Criterion(7, "dihedral torsion", 10 * 60) as c:
        r3 = dihedral(3)
        for n in (3, 4):
            g = H(r3, "rack", n)
            c.check(any(d % 3 == 0 for d in g.torsion), f"R3 n={n}: {g.primary()}")
        for p in (3, 5):
            for n in range(1, 5):
                g = H(dihedral(p), "rack", n)
                c.check(g.annihilated_by(p), f"R{p} n={n}: {g.primary()}")


def _uniform_specs(limit):
    for total in range(2, limit + 1):
        for k in range(2, total + 1):
            for sizes in itertools.combinations_with_replacement(range(1, total + 1), k):
                if sum(sizes) == total:
                    yield sizes


def test_criterion_08_predictor():
    with Criterion(8, "closed-form H2 equals matrix H2", 60) as c:
        for sizes in _uniform_specs(10):
            pred = predict_h2_graphic(GraphicSpec(sizes, None, True)).rack
            got = H(gq_uniform(list(sizes)), "rack", 2)
            c.check(pred == got, f"{sizes}: predicted {pred.primary()}, matrix {got.primary()}")
        cases = {"GQ(inf|inf)": ["Z^2", "Z^2"], "GQ(inf|5)": ["Z x Z_5", "Z x Z_5"],
                 "GQ(5|inf)": ["Z x Z_5", "Z x Z_5"]}
        for text, want in cases.items():
            got = [g.primary() for g in predict_h2_graphic(parse_gq(text)).per_orbit]
            c.check(got == want, f"{text}: {got}")


def test_criterion_09_extension():
    with Criterion(9, "orbit-indicator extension of GQ(o) is GQ(m*o)", 60) as c:
        for sizes in ([1, 1], [2, 2], [1, 2], [2, 3]):
            for m in (2, 3):
                r = verify_prop_213(sizes, m)
                c.check(r.holds, f"{sizes} x {m}: extension orbits {list(r.extension_orbit_sizes)}")


def _tetrahedral():
    def mul(a, b):
        a0, a1, b0, b1 = a & 1, a >> 1, b & 1, b >> 1
        return ((a0 & b0) ^ (a1 & b1)) | (((a0 & b1) ^ (a1 & b0) ^ (a1 & b1)) << 1)
    return MagmaTable.from_rows([[mul(2, x) ^ mul(3, y) for y in range(4)] for x in range(4)])


def test_criterion_10_knots():
    with Criterion(10, "coloring counts and cocycle invariants", 10) as c:
        tre = [parse_pd(FIXTURE_DIAGRAMS[n]) for n in
               ("trefoil", "trefoil_r1", "trefoil_r1_neg", "trefoil_r2")]
        c.check(count_colorings(tre[0], dihedral(3)) == 9, "trefoil/R3 != 9")
        fixtures = [dihedral(3), dihedral(4), dihedral(5), _tetrahedral(), gq_uniform([1, 2])]
        unknot = parse_pd(FIXTURE_DIAGRAMS["unknot"])
        for t in fixtures:
            c.check(count_colorings(unknot, t) == t.n, f"unknot with order {t.n}")
            counts = {count_colorings(d, t) for d in tre}
            c.check(len(counts) == 1, f"order {t.n}: coloring counts {counts}")
        for t, m in ((dihedral(3), 3), (_tetrahedral(), 2), (gq_uniform([1, 2]), 2)):
            cs = cocycle_space_2(t, m)
            for v in cs.cocycles[:6]:
                phi = Cocycle2(m, cs.as_table(v, t.n))
                vals = {tuple(sorted(cocycle_invariant(d, t, phi).counts.items())) for d in tre}
                c.check(len(vals) == 1, f"order {t.n} cocycle {v}: {vals}")


def test_criterion_11_conjectures():
    cfg = RunConfig("scan-conjectures")
    with Criterion(11, "conjecture scans", 30 * 60) as c:
        cells = scan_c32(cfg, [2], [2, 3, 4])
        c.check([x["exponent"] for x in cells] == [2, 4, 10],
                f"c32 exponents {[x['exponent'] for x in cells]}")
        c.check(all(x["verdict"] == "CONSISTENT" for x in cells), "c32 verdicts")
        for i in range(1, 6):
            for x in scan_c31(cfg, [f"table5-{i}"], None):
                c.check(x["verdict"].startswith("CONSISTENT"),
                        f"c31 row {i} n={x['n']}: {x['verdict']}")


ORDER_7_8 = [dihedral(7), dihedral(8), gq_uniform([4, 4]), gq_uniform([1, 3, 4]),
             gq_uniform([2, 2, 2, 2]), gq_uniform([2, 5]), gq_uniform([1, 6]), trivial(7)]


def test_criterion_12_structure(quandles_to_6):
    with Criterion(12, "structural suite", 30 * 60) as c:
        for t in quandles_to_6:
            variants = [ChainSpec("rack", 0), ChainSpec("quandle", 0), ChainSpec("degenerate", 0)]
            variants += [ChainSpec("orbit", 0, i) for i in range(len(orbits(t)))]
            for v in variants:
                for n in range(2, 5):
                    a = boundary_matrix(t, v.at(n))
                    b = boundary_matrix(t, v.at(n + 1))
                    c.check((a @ b).is_zero(), f"{t.op} {v.variant} n={n}")
        for t in quandles_to_6 + ORDER_7_8:
            for n in (1, 2, 3):
                total = sum(orbit_homology_sum(t, n), HomologyGroup(0))
                c.check(total == H(t, "rack", n), f"orbit sum {t.op} n={n}")
        for n in range(1, 6):
            for op in all_racks(n):
                if satisfies(op, "graphic"):
                    c.check(satisfies(op, "idempotent"), f"graphic rack {op} not idempotent")
        here = Path(__file__).parent
        r = subprocess.run([sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider",
                            "-k", "property", str(here), "--ignore", __file__],
                           capture_output=True, text=True, cwd=here.parent)
        c.check(r.returncode == 0, "property suites: " + r.stdout.strip().splitlines()[-1])
