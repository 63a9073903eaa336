from fractions import Fraction

import pytest

from basketforge.classifier import (
    PATTERNS_CHI1,
    enumerate_chi1,
    enumerate_chi_gt1,
    farey_parents,
    thresholds,
)
from basketforge.core import FormalBasket, parse_basket, plurigenus, volume
from basketforge.lattice import ResourceError

B = parse_basket


def test_case_one_unique():
    (b,) = enumerate_chi1((0, 0, 0, 0))
    assert b == B("{3x(1,2),2x(2,5),2x(1,3),(1,4)}")
    assert volume(FormalBasket(b, 1)) == Fraction(1, 60)


def test_case_two_pair():
    got = enumerate_chi1((0, 0, 0, 1))
    assert [volume(FormalBasket(b, 1)) for b in got] == [Fraction(1, 30), Fraction(1, 20)]


def test_case_seven_empty():
    assert enumerate_chi1((1, 0, 1, 1)) == []


def test_patterns_respected():
    for pat in PATTERNS_CHI1:
        for b in enumerate_chi1(pat):
            fb = FormalBasket(b, 1)
            assert plurigenus(fb, 2) == 0
            assert tuple(plurigenus(fb, m) for m in range(3, 7)) == pat


def test_cap_too_small():
    with pytest.raises(ResourceError):
        enumerate_chi1((0, 0, 0, 0), r_elem_cap=12)
    with pytest.raises(ValueError):
        enumerate_chi1((2, 0, 0, 0))


def test_cap_stability():
    # raising the elementary cap changes nothing
    for pat in PATTERNS_CHI1:
        assert enumerate_chi1(pat, 30) == enumerate_chi1(pat, 40)


def test_chi_gt1_cap_certificate():
    with pytest.raises(ResourceError):
        enumerate_chi_gt1(r_elem_cap=5, chis=[2], descendants=False)


def test_chi_gt1_cap_stability(ctx):
    wider = enumerate_chi_gt1(r_elem_cap=13, chis=[4], descendants=False)
    assert {r.b12 for r in wider} == {r.b12 for r in ctx.rows if r.chi == 4}


def test_row2(ctx):
    (row,) = [r for r in ctx.rows if ctx.row_names[r.index] == "2"]
    assert row.chi == 2
    assert row.b12 == B("{4x(1,2),(4,9),2x(2,5),(3,8),3x(1,3),2x(1,4)}")
    assert row.k3 == Fraction(1, 360)
    assert row.minimal_descendants == [(B("{4x(1,2),(4,9),(2,5),(5,13),3x(1,3),2x(1,4)}"), Fraction(1, 1170))]


def test_rows_recompute(ctx):
    for r in ctx.rows:
        fb = r.formal
        assert volume(fb) == r.k3
        assert tuple(plurigenus(fb, m) for m in range(3, 12)) == r.p_vector
        assert (plurigenus(fb, 18), plurigenus(fb, 24)) == (r.p18, r.p24)
        assert thresholds(fb)[1] == r.mu1
        assert all(p.r <= 5 for p in r.b12.pairs() if p.b == 1)


def test_thresholds(tablec, chi1ref):
    assert thresholds(tablec.named("2a").formal)[1:4] == (18, 24, 30)
    assert thresholds(tablec.named("3a").formal)[2] == 20
    assert thresholds(FormalBasket(chi1ref.names["B_{3,1}"], 1))[0] == 5
    with pytest.raises(ValueError):
        thresholds(tablec.named("2a").formal, scan_limit=40)


def test_farey_parents():
    assert farey_parents(5, 13) == ((2, 5), (3, 8))
    assert farey_parents(3, 7) == ((1, 2), (2, 5))


def test_chi1_survivors(ctx, chi1ref):
    rep = ctx.chi1_report
    names = {ctx.chi1_name(b) for b in rep.survivors}
    assert set(chi1ref.survivors) <= names
    extras = {b for b in rep.survivors if ctx.chi1_name(b) not in chi1ref.names}
    # two further minima, both far above the 1/420 minimum
    assert {volume(FormalBasket(b, 1)) for b in extras} == {Fraction(1, 63), Fraction(2, 693)}
    for b in rep.survivors:
        f = FormalBasket(b, 1)
        assert plurigenus(f, 10) >= 2 and plurigenus(f, 5) + plurigenus(f, 6) >= 1


def test_chi1_case_minima(ctx, chi1ref):
    for ref in chi1ref.cases:
        got = set()
        for c in ctx.chi1_report.cases:
            if c.name == ref.case:
                got |= set(c.minimal)
        assert set(ref.minimal.values()) <= got, ref.case
    (case1,) = [c for c in ctx.chi1_report.cases if c.name == "I"]
    assert case1.frontier == []


def test_chi_gt1_survivor_positivity(ctx):
    for i, b in ctx.chi_gt1_report.survivors:
        f = FormalBasket(b, ctx.rows[int(i) - 1].chi)
        assert plurigenus(f, 24) >= 2
        assert all(plurigenus(f, m) > 0 for m in range(24, 48))


def test_intermediates_in_closure(ctx, tablec):
    by_no = {no: i for i, no in ctx.row_names.items()}
    for name, ref in tablec.intermediates.items():
        assert ref.basket in ctx.chi_gt1_report.nodes[by_no[name.split(".")[0]]]
        assert volume(ref.formal) == ref.k3
