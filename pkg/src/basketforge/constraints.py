"""Admissibility filters for formal baskets."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

from .core import FormalBasket, elementary_basket, plurigenus, volume

NEGATIVE = "negative-plurigenus"
SUPERADDITIVE = "superadditivity-violation"
VOLUME = "volume-bound-conflict"

# coefficient of n0_{1,r} in the R term of (4.1); r >= 12 all weigh 14
_R_WEIGHT = {5: 2, 6: 5, 7: 6, 8: 8, 9: 10, 10: 12, 11: 13}


def r_weight(k: int) -> int:
    if k < 5:
        return 0
    return _R_WEIGHT.get(k, 14)


@dataclass(frozen=True)
class FilterVerdict:
    name: str
    holds: bool
    margin: Fraction
    detail: str = ""
    witness: Optional[tuple] = None


@dataclass(frozen=True)
class ExclusionVerdict:
    excluded: bool
    rule: Optional[str] = None
    witness: Optional[tuple] = None
    detail: str = ""
    others: tuple = ()      # further applicable (rule, witness) pairs, in rule order


def miyaoka_reid(fb: FormalBasket) -> FilterVerdict:
    pairs = list(fb.basket.pairs())
    margin = sum(p.r for p in pairs) - 24 * fb.chi - sum((Fraction(1, p.r) for p in pairs), Fraction(0))
    return FilterVerdict("miyaoka-reid", margin >= 0, margin)


def ineq41(fb: FormalBasket) -> FilterVerdict:
    P = {m: plurigenus(fb, m) for m in range(2, 14)}
    b0 = elementary_basket(fb.basket)
    R = sum(n * r_weight(p.r) for p, n in b0.entries if p.b == 1)
    sigma5 = sum(n for p, n in b0.entries if p.b == 1 and p.r >= 5)
    lhs = 2 * P[5] + 3 * P[6] + P[8] + P[10] + P[12]
    rhs = fb.chi + 10 * P[2] + 4 * P[3] + P[7] + P[11] + P[13] + R
    return FilterVerdict("ineq41", lhs >= rhs, lhs - rhs, f"sigma5={sigma5} R={R}")


def superadditivity_check(fb: FormalBasket, window: int) -> FilterVerdict:
    """P_{m+n} >= P_m + P_n - 1 whenever P_m, P_n >= 1, for 2 <= m <= n, m + n <= window.

    Where one of P_m, P_n is at most 1 this is exactly P_{m+n} >= P_m P_n.
    """
    if window < 4:
        raise ValueError("window must be >= 4")
    P = {m: plurigenus(fb, m) for m in range(2, window + 1)}
    worst = None
    for m in range(2, window // 2 + 1):
        for n in range(m, window - m + 1):
            if P[m] < 1 or P[n] < 1:
                continue
            gap = P[m + n] - (P[m] + P[n] - 1)
            if gap < 0:
                return FilterVerdict("superadditivity", False, gap, f"P{m + n} < P{m} + P{n} - 1", (m, n))
            if worst is None or gap < worst:
                worst = gap
    return FilterVerdict("superadditivity", True, worst if worst is not None else Fraction(0))


BoundSource = Callable[[int], Fraction]


def exclusion_rules(fb: FormalBasket, volume_bound_source: BoundSource) -> ExclusionVerdict:
    """First applicable of: negative P_m (m <= 50), superadditivity (window 50),
    P_m >= 2 with K^3 below the bound for m (m <= 20).

    The remaining applicable rules are kept in ``others`` so every conflict
    stays checkable, not only the first one.
    """
    P = {m: plurigenus(fb, m) for m in range(2, 51)}
    hits = []
    neg = next((m for m, v in P.items() if v < 0), None)
    if neg is not None:
        hits.append((NEGATIVE, (neg,), f"P{neg} = {P[neg]}"))
    sa = superadditivity_check(fb, 50)
    if not sa.holds:
        m, n = sa.witness
        hits.append((SUPERADDITIVE, (m, n), f"P{m + n}={P[m + n]} with P{m}={P[m]}, P{n}={P[n]}"))
    k3 = volume(fb)
    for m in range(2, 21):
        if P[m] >= 2:
            bound = Fraction(volume_bound_source(m))
            if k3 < bound:
                hits.append((VOLUME, (m, bound), f"K3 = {k3} < {bound}"))
                break
    if not hits:
        return ExclusionVerdict(False)
    rule, wit, detail = hits[0]
    return ExclusionVerdict(True, rule, wit, detail, tuple((r, w) for r, w, _ in hits[1:]))
