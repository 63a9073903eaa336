from fractions import Fraction

import pytest

from basketforge.core import Basket, FormalBasket, OutOfDomain, Pair, parse_basket, volume
from basketforge.lattice import (
    PackingMove,
    ResourceError,
    descendant_closure,
    dominates,
    merge_dominates,
    minimal_positive_descendants,
    prime_packing,
    successors,
)

B = parse_basket


def test_prime_packing_examples():
    assert prime_packing((1, 2), (2, 5)) == (3, 7)
    assert prime_packing((2, 5), (3, 8)) == (5, 13)
    assert prime_packing((1, 3), (1, 3)) is None
    assert prime_packing((2, 5), (1, 2)) == (3, 7)


def test_successors_brute_force():
    got = {b for _, b in successors(B("{(1,2),(2,5),(1,3)}"))}
    assert got == {B("{(3,7),(1,3)}"), B("{(1,2),(3,8)}"), B("{2x(2,5)}")}


def test_successors_empty():
    assert successors(B("{(1,2)}")) == []
    assert successors(B("{2x(1,3)}")) == []


def test_successors_restricted():
    got = {b for _, b in successors(B("{(1,2),(2,5),(1,3)}"), unpack_order=7)}
    assert got == {B("{(1,2),(3,8)}")}


def test_case_one_minima():
    fb = FormalBasket(B("{3x(1,2),2x(2,5),2x(1,3),(1,4)}"), 1)
    want = {B("{2x(1,2),(3,7),(2,5),2x(1,3),(1,4)}"), B("{3x(1,2),(2,5),(4,11),(1,4)}"),
            B("{3x(1,2),(5,13),(1,3),(1,4)}"), B("{3x(1,2),2x(2,5),(1,3),(2,7)}")}
    assert set(minimal_positive_descendants(fb)) == want
    assert set(minimal_positive_descendants(fb, unpack_order=5)) == want


def test_case_eight_minima():
    fb = FormalBasket(B("{2x(2,5),2x(1,3),3x(1,4)}"), 1)
    want = {B("{(5,13),(1,3),(3,12)}"), B("{(2,5),(4,11),(3,12)}"), B("{(4,10),(1,3),(3,11),(1,4)}")}
    assert set(minimal_positive_descendants(fb)) == want
    ks = [volume(FormalBasket(b, 1)) for b in minimal_positive_descendants(fb)]
    assert ks == sorted(ks) and ks[0] == Fraction(1, 660)


def test_single_pair_is_minimal():
    fb = FormalBasket(B("{(1,2)}"), 1)
    assert minimal_positive_descendants(fb) == [B("{(1,2)}")]


def test_nonpositive_rejected():
    with pytest.raises(OutOfDomain):
        minimal_positive_descendants(FormalBasket(B("{(1,2)}"), 0))


def test_closure_small():
    cl = descendant_closure(FormalBasket(B("{(1,2),(2,5)}"), 1))
    assert set(cl) == {B("{(1,2),(2,5)}"), B("{(3,7)}")}
    assert cl[B("{(3,7)}")].moves == (PackingMove((Pair(1, 2), Pair(2, 5)), Pair(3, 7)),)
    assert set(descendant_closure(FormalBasket(B("{(1,4)}"), 1))) == {B("{(1,4)}")}


def test_closure_chains_replay(tablec):
    row = tablec.row("16")
    cl = descendant_closure(row.formal, unpack_order=12)
    for b, chain in cl.items():
        assert chain.replay() == b
        assert (b.sum_b, b.sum_r) == (row.basket.sum_b, row.basket.sum_r)
    assert tablec.intermediates["16.5"].basket in cl
    assert tablec.intermediates["16.6"].basket in cl


def test_closure_cap():
    with pytest.raises(ResourceError):
        descendant_closure(FormalBasket(B("{6x(1,2),4x(1,3),3x(1,4)}"), 3), cap_states=5)


def test_dominates():
    assert dominates(B("{(1,2),(2,5),(1,3)}"), B("{(3,7),(1,3)}"))
    assert not dominates(B("{(3,7),(1,3)}"), B("{(1,2),(2,5),(1,3)}"))
    assert dominates(B("{(1,2)}"), B("{(1,2)}"))


def test_merge_dominates_multiples():
    # {(8,19),(2,6)} reads as {(8,19),2x(1,3)} and packs down to B31 = {(9,22),(1,3)}
    assert merge_dominates(B("{(8,19),2x(1,3)}"), B("{(9,22),(1,3)}"))
    assert not merge_dominates(B("{(9,22),(1,3)}"), B("{(8,19),2x(1,3)}"))
