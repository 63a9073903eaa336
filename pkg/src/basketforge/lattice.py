"""Prime packings and the domination order on baskets."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .core import Basket, FormalBasket, OutOfDomain, Pair, reduce_pair, volume


class ResourceError(RuntimeError):
    pass


@dataclass(frozen=True)
class PackingMove:
    consumed: tuple[Pair, Pair]
    produced: Pair

    def __str__(self) -> str:
        a, b = self.consumed
        return f"{a}+{b}->{self.produced}"


@dataclass(frozen=True)
class PackingChain:
    start: Basket
    moves: tuple[PackingMove, ...]
    end: Basket

    def replay(self) -> Basket:
        cur = self.start
        for mv in self.moves:
            cur = apply_move(cur, mv)
        return cur


def prime_packing(p1, p2) -> Optional[Pair]:
    (b1, r1), (b2, r2) = p1, p2
    if abs(b1 * r2 - b2 * r1) != 1:
        return None
    return Pair(b1 + b2, r1 + r2)


def apply_move(basket: Basket, mv: PackingMove) -> Basket:
    a, b = mv.consumed
    return basket - Basket.of([a, b]) + Basket.of([mv.produced])


def successors(basket: Basket, unpack_order: Optional[int] = None) -> list[tuple[PackingMove, Basket]]:
    """All one-step prime packings of ``basket``.

    With ``unpack_order`` set to n, only packings whose product has r > n are
    produced, so every result still unpacks at step n to the same basket.
    """
    items = list(basket.entries)
    seen = {}
    for i, (p1, n1) in enumerate(items):
        for p2, n2 in items[i:]:
            if p1 == p2 and n1 < 2:
                continue
            q = prime_packing(p1, p2)
            if q is None or (unpack_order is not None and q.r <= unpack_order):
                continue
            mv = PackingMove((p1, p2), q)
            nb = apply_move(basket, mv)
            seen.setdefault(nb, mv)
    return [(mv, b) for b, mv in seen.items()]


def _check_positive(fb: FormalBasket) -> None:
    if volume(fb) <= 0:
        raise OutOfDomain("basket volume must be positive")


def minimal_positive_descendants(
    fb: FormalBasket, unpack_order: Optional[int] = None, cap_states: int = 10**6
) -> list[Basket]:
    """Positive descendants none of whose successors stay positive."""
    _check_positive(fb)
    out = set()
    seen = {fb.basket}
    stack = [fb.basket]
    while stack:
        cur = stack.pop()
        pos = [b for _, b in successors(cur, unpack_order) if volume(FormalBasket(b, fb.chi, fb.p2)) > 0]
        if not pos:
            out.add(cur)
        for b in pos:
            if b not in seen:
                seen.add(b)
                if len(seen) > cap_states:
                    raise ResourceError(f"descendant search exceeded {cap_states} states (frontier {len(stack)})")
                stack.append(b)
    return sorted(out, key=lambda b: (volume(FormalBasket(b, fb.chi, fb.p2)), str(b)))


def descendant_closure(
    fb: FormalBasket,
    keep_nonpositive: bool = False,
    unpack_order: Optional[int] = None,
    cap_states: int = 10**6,
) -> dict[Basket, PackingChain]:
    """Every basket reachable from ``fb`` by prime packings, with one witness chain each."""
    witness: dict[Basket, tuple[PackingMove, ...]] = {fb.basket: ()}
    queue = [fb.basket]
    while queue:
        nxt = []
        for cur in queue:
            for mv, b in successors(cur, unpack_order):
                if b in witness:
                    continue
                if not keep_nonpositive and volume(FormalBasket(b, fb.chi, fb.p2)) <= 0:
                    continue
                witness[b] = witness[cur] + (mv,)
                if len(witness) > cap_states:
                    raise ResourceError(f"closure exceeded {cap_states} states (frontier {len(nxt)})")
                nxt.append(b)
        queue = nxt
    return {b: PackingChain(fb.basket, moves, b) for b, moves in witness.items()}


def dominates(upper: Basket, lower: Basket, unpack_order: Optional[int] = None) -> bool:
    """True when ``lower`` is reachable from ``upper`` by prime packings."""
    if upper == lower:
        return True
    if (upper.sum_b, upper.sum_r) != (lower.sum_b, lower.sum_r) or len(lower) >= len(upper):
        return False
    fb = FormalBasket(upper, 0)
    return lower in descendant_closure(fb, keep_nonpositive=True, unpack_order=unpack_order)


def merge_dominates(upper: Basket, lower: Basket) -> bool:
    """Domination through arbitrary merges.

    ``lower`` must arise by partitioning ``upper`` into groups, summing each
    group component-wise and reading a non-primitive sum (kb, kr) as k copies
    of (b, r).  K^3 and every P_m are non-increasing under such merges, so
    this coarser order is used to drop redundant minima.
    """
    if (upper.sum_b, upper.sum_r) != (lower.sum_b, lower.sum_r) or len(lower) > len(upper):
        return False
    src = sorted(upper.pairs(), key=lambda p: (-p.r, -p.b))
    want = lower.counts()

    def reduced(acc):
        c = {}
        for b, r in acc:
            for q, k in reduce_pair(b, r).items():
                c[q] = c.get(q, 0) + k
        return c

    seen = set()

    def place(i, groups):
        key = (i, tuple(sorted(groups)))
        if key in seen:
            return False
        seen.add(key)
        if i == len(src):
            return reduced(groups) == want
        b, r = src[i]
        for j in range(len(groups)):
            g = groups[j]
            if g[1] + r > lower.sum_r:
                continue
            new = groups[:j] + [(g[0] + b, g[1] + r)] + groups[j + 1:]
            if place(i + 1, new):
                return True
        return place(i + 1, groups + [(b, r)])

    return place(0, [])
