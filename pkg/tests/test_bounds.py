from fractions import Fraction

import pytest

from basketforge import bounds as bd
from basketforge.bounds import ChainBroken, FibrationCase, NotApplicable


def test_defaults():
    c = FibrationCase.default("III", 5)
    assert (c.p, c.beta, c.degKC, c.even_divisor) == (1, Fraction(1, 5), 6, False)
    c = FibrationCase.default("I_n", 3)
    assert (c.beta, c.degKC, c.even_divisor) == (Fraction(1, 16), 18, True)
    c = FibrationCase.default("I_3", 4, purpose="birationality")
    assert (c.p, c.beta, c.degKC) == (2, Fraction(1, 6), 2)
    with pytest.raises(NotApplicable):
        FibrationCase.default("I_q", 2)


def test_seed():
    assert bd.seed_xi(FibrationCase.default("III", 11)) == Fraction(6, 23)
    assert bd.seed_xi(FibrationCase.default("II", 8)) == Fraction(2, 17)
    for m0 in range(2, 20):
        c = FibrationCase.default("I_3", m0, purpose="birationality")
        assert bd.seed_xi(c) == Fraction(4, 3 * (m0 + 2))


def test_refine():
    assert bd.refine_xi(FibrationCase.default("III", 11), Fraction(6, 23), 27) == Fraction(8, 27)
    assert bd.refine_xi(FibrationCase.default("II", 8), Fraction(2, 13), 24) == Fraction(1, 6)
    assert bd.refine_xi(FibrationCase.default("III", 11), Fraction(6, 23), 23) is None
    with pytest.raises(ValueError):
        bd.refine_xi(FibrationCase.default("III", 11), Fraction(1), 1)


def test_optimize_examples():
    assert bd.type_volume("III", 2, optimized=True) == Fraction(1, 3)
    assert bd.type_volume("II", 8, optimized=True) == Fraction(1, 384)
    tr = bd.optimize_volume(bd.table_case("I_n", 2), strategy="least")
    assert tr.seed == Fraction(6, 5) and tr.volume_bound == Fraction(5, 96)
    assert Fraction(1, 24) * Fraction(5, 4) == Fraction(5, 96)


def test_max_strategy_reaches_fixed_point():
    c = FibrationCase.default("II", 5)
    tr = bd.optimize_volume(c)
    assert all(bd.refine_xi(c, tr.final_xi, m) in (None,) or bd.refine_xi(c, tr.final_xi, m) <= tr.final_xi
               for m in range(2, 12 * 5 + 21))


def test_closed_forms():
    assert bd.closed_form_volume("III", 2) == Fraction(5, 16)
    assert bd.closed_form_volume("I_q", 7) == Fraction(1, 22)
    for m0 in range(2, 30):
        assert bd.closed_form_volume("I_n", m0) == Fraction(11, 12 * m0 * (m0 + 1) ** 2)
        assert bd.worst_case_volume(m0, 2) == Fraction(11, 12 * m0 * (m0 + 1) ** 2)


def test_worst_case_optimized():
    assert bd.worst_case_volume(7, 2, optimized=True) == Fraction(5, 2408)
    assert bd.worst_case_volume(3, 3, optimized=True) == Fraction(2, 45)
    assert bd.corollary_bound(14) == Fraction(11, 37800)


def test_thresholds():
    assert bd.nonvanishing_threshold("I_p", 10) == 23
    assert bd.nonvanishing_threshold("II", 9) == 18
    assert bd.nonvanishing_threshold("I_3", 4) == 10
    with pytest.raises(NotApplicable):
        bd.nonvanishing_threshold("I_q", 3)
    assert bd.birational_threshold(FibrationCase.default("III", 2)) == 7
    assert bd.birational_threshold(FibrationCase.default("II", 10)) == 38
    for m0 in range(2, 10):
        assert bd.birational_threshold(FibrationCase.default("generic", m0)) == 5 * m0 + 6


def test_replay_claim_b():
    c = FibrationCase("generic", 18, 1, Fraction(1, 24), 2)
    tr, m = bd.replay_chain(c, [65, 60, 59, 58])
    assert [tr.seed] + [s.xi for s in tr.steps] == [Fraction(2, 43), Fraction(4, 65), Fraction(1, 15),
                                                    Fraction(4, 59), Fraction(2, 29)]
    assert m == 73


def test_replay_i3():
    c = FibrationCase.default("I_3", 13, purpose="birationality")
    tr, m = bd.replay_chain(c, [35, 32])
    assert [tr.seed] + [s.xi for s in tr.steps] == [Fraction(4, 45), Fraction(4, 35), Fraction(1, 8)]
    assert m == 39


@pytest.mark.parametrize("t", ["III", "II", "I_p", "I_n", "generic"])
def test_replay_broken_at_m0(t):
    with pytest.raises(ChainBroken):
        bd.replay_chain(FibrationCase.default(t, 4), [4])


def test_table_a(ctx):
    got = bd.table_a()
    for row, cells in ctx.tablea.items():
        for m0, v in cells.items():
            assert got[row][m0] == v, (row, m0)
    assert sum(len(c) for c in got.values()) == 44
