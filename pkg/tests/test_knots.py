import json

import pytest
from hypothesis import given, strategies as st

from oracles import brute_colorings
from rackhom.constructors import alexander, dihedral, gq_uniform, trivial
from rackhom.extensions import Cocycle2
from rackhom.homology import cocycle_space_2
from rackhom.knots import (FIXTURE_DIAGRAMS, PDParseError, cocycle_invariant, colorings,
                           count_colorings, parse_pd)
from rackhom.magma import MagmaTable


def tetrahedral() -> MagmaTable:
    """x*y = t x + (1 + t) y over F_4 = F_2[t]/(t^2 + t + 1), elements as bit pairs."""
    def mul(a, b):
        # (a0 + a1 t)(b0 + b1 t)
        a0, a1, b0, b1 = a & 1, a >> 1, b & 1, b >> 1
        c0 = (a0 & b0) ^ (a1 & b1)
        c1 = (a0 & b1) ^ (a1 & b0) ^ (a1 & b1)
        return c0 | (c1 << 1)
    T, T1 = 2, 3
    return MagmaTable.from_rows([[mul(T, x) ^ mul(T1, y) for y in range(4)] for x in range(4)])


def terms(d):
    return [(x.sign, x.a, x.b, x.c, x.d) for x in d.crossings]


TREFOILS = ["trefoil", "trefoil_r1", "trefoil_r1_neg", "trefoil_r2"]
UNKNOTS = ["unknot", "unknot_kink", "unknot_kink_neg"]
QUANDLES = [dihedral(3), dihedral(4), dihedral(5), tetrahedral(), gq_uniform([1, 2]), trivial(3)]


def test_parse_examples():
    d = parse_pd(FIXTURE_DIAGRAMS["trefoil"])
    assert len(d.crossings) == 3 and d.arcs == (1, 2, 3, 4, 5, 6)
    assert d.components == 1
    assert str(d) == FIXTURE_DIAGRAMS["trefoil"]
    u = parse_pd("U(1)")
    assert u.crossings == () and u.circles == (1,)
    assert parse_pd("U(1) U(2)").components == 2


@pytest.mark.parametrize("bad", ["", "X+(1,2,2)", "Y(1,2,3,4)", "X+(1,2,2,1) X+(1,3,3,4)",
                                 "X+(1,2,3,4)", "X+(1,a,2,1)", "X+(0,1,1,0)", "U(1,2)",
                                 "U(1) U(1)"])
def test_parse_errors(bad):
    with pytest.raises(PDParseError):
        parse_pd(bad)


def test_tetrahedral_is_quandle():
    from rackhom.magma import classify
    assert "quandle" in classify(tetrahedral())


@pytest.mark.parametrize("name", list(FIXTURE_DIAGRAMS))
@pytest.mark.parametrize("t", QUANDLES, ids=lambda t: f"n{t.n}_{t.op[0]}")
def test_colorings_match_oracle(name, t):
    d = parse_pd(FIXTURE_DIAGRAMS[name])
    got = sorted(tuple(sorted(c.assignment.items())) for c in colorings(d, t))
    if d.crossings:
        want = sorted(tuple(sorted(c.items())) for c in brute_colorings(terms(d), t.op))
    else:
        want = sorted(((e, v),) for e in d.circles for v in range(t.n))
    assert got == want


def test_coloring_counts():
    tre = parse_pd(FIXTURE_DIAGRAMS["trefoil"])
    assert count_colorings(tre, dihedral(3)) == 9
    assert count_colorings(tre, tetrahedral()) == 16
    assert count_colorings(tre, dihedral(5)) == 5
    for name in UNKNOTS:
        assert count_colorings(parse_pd(FIXTURE_DIAGRAMS[name]), dihedral(3)) == 3


@pytest.mark.parametrize("t", QUANDLES, ids=lambda t: f"n{t.n}_{t.op[0]}")
def test_coloring_count_is_invariant(t):
    counts = {n: count_colorings(parse_pd(FIXTURE_DIAGRAMS[n]), t) for n in TREFOILS}
    assert len(set(counts.values())) == 1
    assert len({count_colorings(parse_pd(FIXTURE_DIAGRAMS[n]), t) for n in UNKNOTS}) == 1


def test_colorings_need_rack():
    with pytest.raises(ValueError):
        colorings(parse_pd("U(1)"), MagmaTable.from_rows([[0, 0], [0, 0]]))


def _all_cocycles(t, m, limit=16):
    cs = cocycle_space_2(t, m)
    return [Cocycle2(m, cs.as_table(v, t.n)) for v in cs.cocycles[:limit]]


@pytest.mark.parametrize("t,m", [(tetrahedral(), 2), (dihedral(3), 3), (dihedral(4), 2),
                                 (gq_uniform([1, 2]), 2)], ids=["S4", "R3", "R4", "GQ12"])
def test_cocycle_invariant_is_invariant(t, m):
    for c in _all_cocycles(t, m):
        vals = {n: cocycle_invariant(parse_pd(FIXTURE_DIAGRAMS[n]), t, c).counts for n in TREFOILS}
        assert len({tuple(sorted(v.items())) for v in vals.values()}) == 1, vals
        for n in UNKNOTS:
            assert cocycle_invariant(parse_pd(FIXTURE_DIAGRAMS[n]), t, c).counts == {0: t.n}


def test_tetrahedral_trefoil_invariant_is_nontrivial():
    t = tetrahedral()
    seen = set()
    for c in _all_cocycles(t, 2):
        inv = cocycle_invariant(parse_pd(FIXTURE_DIAGRAMS["trefoil"]), t, c)
        assert inv.total == 16
        seen.add(tuple(sorted(inv.counts.items())))
    assert ((0, 4), (1, 12)) in seen


def test_invariant_json_covers_all_residues():
    t = dihedral(3)
    inv = cocycle_invariant(parse_pd("U(1)"), t, Cocycle2.zero(3, 4))
    assert inv.to_json() == {"m": 4, "multiset": {"0": 3, "1": 0, "2": 0, "3": 0}}
    assert json.loads(json.dumps(inv.to_json())) == inv.to_json()


def test_invariant_rejects_non_cocycle():
    with pytest.raises(ValueError):
        cocycle_invariant(parse_pd("U(1)"), trivial(2), Cocycle2(2, [[1, 0], [0, 0]]))


@given(st.integers(0, 2), st.sampled_from([3, 5, 7]))
def test_property_alexander_kink_does_not_change_colorings(shift, p):
    t = alexander(p, 2 + shift % (p - 2))
    a = count_colorings(parse_pd(FIXTURE_DIAGRAMS["trefoil"]), t)
    b = count_colorings(parse_pd(FIXTURE_DIAGRAMS["trefoil_r1"]), t)
    assert a == b
