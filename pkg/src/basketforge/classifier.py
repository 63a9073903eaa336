"""Constrained enumeration of initial baskets and the classification reports.

The search assigns elementary counts n_{1,2}, n_{1,3}, n_{1,4} and a tail of
(1,k), k >= 5, then walks the Farey levels n = 5, 6, ... : the pairs of
denominator n are prime packings of their two Farey parents, and the total
number of packings at level n is forced by the value of P_{n+1}.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Callable, Iterable, Optional

from . import core
from .bounds import corollary_bound, table_bound
from .constraints import (
    ExclusionVerdict,
    FilterVerdict,
    exclusion_rules,
    ineq41,
    miyaoka_reid,
    r_weight,
)
from .core import Basket, FormalBasket, Pair, plurigenus, volume
from .lattice import ResourceError, descendant_closure, merge_dominates, minimal_positive_descendants

PATTERNS_CHI1 = (
    (0, 0, 0, 0),
    (0, 0, 0, 1),
    (0, 0, 1, 0),
    (0, 0, 1, 1),
    (0, 1, 0, 1),
    (0, 1, 1, 1),
    (1, 0, 1, 1),
    (1, 1, 1, 1),
)
CASE_NAMES = ("I", "II", "III", "IV", "V", "VI", "VII", "VIII")

INTEGRALITY_WINDOW = 13
CHI_MAX = 8


# -- fast arithmetic on plain dicts -------------------------------------------

def _fm(m):
    return Fraction(m * (m - 1) * (2 * m - 1), 12)


@lru_cache(maxsize=None)
def _c(b, r, m):
    return core._l(b, r, m) - _fm(m) * Fraction(b * (r - b), r)


def _pm(B, chi, m):
    s = _fm(m) * 6 * chi + (1 - 2 * m) * chi
    for (b, r), n in B.items():
        if n:
            s += n * _c(b, r, m)
    return s


def _k3(B, chi):
    return 6 * chi - sum((n * Fraction(b * (r - b), r) for (b, r), n in B.items()), Fraction(0))


@lru_cache(maxsize=None)
def farey_parents(b, r):
    """The two Farey parents of b/r, larger slope first."""
    for r1 in range(1, r):
        for b1 in range(0, r1 + 1):
            if b1 * r - b * r1 == 1:
                return (b1, r1), (b - b1, r - r1)
    raise ValueError((b, r))


def _level_pairs(n, cap):
    return [(b, n) for b in range(2, n // 2 + 1) if gcd(b, n) == 1 and b * cap >= n]


def _compositions(x, k):
    if k == 1:
        yield (x,)
        return
    for i in range(x + 1):
        for rest in _compositions(x - i, k - 1):
            yield (i,) + rest


Allowed = Callable[[int], Optional[frozenset]]


def _search(chi, N, cap, allowed: Allowed, accept, r_budget=None):
    """All chain-supported bases with the prescribed P_m for m <= N + 1."""
    res = []
    for p3 in sorted(allowed(3)):
        T = 10 * chi - p3
        if T.denominator != 1 or T < 0:
            continue
        T = int(T)
        budget = None if r_budget is None else r_budget - 4 * p3
        for n12 in range(T + 1):
            for n13 in range(T - n12 + 1):
                for n14 in range(T - n12 - n13 + 1):
                    s5 = T - n12 - n13 - n14
                    if budget is not None and 2 * s5 > budget:
                        continue
                    rep = {(1, 2): n12, (1, 3): n13, (1, 4): n14, (1, max(cap, 5)): s5}
                    a4, a5 = allowed(4), allowed(5)
                    if a4 is not None and _pm(rep, chi, 4) not in a4:
                        continue
                    if a5 is not None and _pm(rep, chi, 5) not in a5:
                        continue
                    if _k3({(1, 2): n12, (1, 3): n13, (1, 4): n14, (1, 5): s5}, chi) <= 0:
                        continue
                    for tail in itertools.combinations_with_replacement(range(5, cap + 1), s5):
                        if budget is not None and sum(r_weight(k) for k in tail) > budget:
                            continue
                        B = {(1, 2): n12, (1, 3): n13, (1, 4): n14}
                        for k in tail:
                            B[(1, k)] = B.get((1, k), 0) + 1
                        if _k3(B, chi) <= 0:
                            continue
                        _levels(B, chi, 5, N, cap, allowed, accept, res)
    return res


def _levels(B, chi, n, N, cap, allowed, accept, res):
    if _k3(B, chi) <= 0:
        return
    if n > N:
        if accept(B, chi):
            res.append({k: v for k, v in B.items() if v})
        return
    v = _pm(B, chi, n + 1)
    L = _level_pairs(n, cap)
    al = allowed(n + 1)
    if not L:
        if (al is None and v >= 0) or (al is not None and v in al):
            _levels(B, chi, n + 1, N, cap, allowed, accept, res)
        return
    if v.denominator != 1:
        return
    xs = sorted(v - t for t in al) if al is not None else range(0, int(v) + 1)
    for x in xs:
        if x < 0 or Fraction(x).denominator != 1:
            continue
        for dist in _compositions(int(x), len(L)):
            B2 = dict(B)
            ok = True
            for p, k in zip(L, dist):
                if not k:
                    continue
                a, c = farey_parents(*p)
                B2[a] = B2.get(a, 0) - k
                B2[c] = B2.get(c, 0) - k
                B2[p] = B2.get(p, 0) + k
                if B2[a] < 0 or B2[c] < 0:
                    ok = False
                    break
            if ok:
                _levels({k: v for k, v in B2.items() if v}, chi, n + 1, N, cap, allowed, accept, res)


def _integral_nonneg(B, chi, hi=INTEGRALITY_WINDOW):
    for m in range(2, hi + 1):
        p = _pm(B, chi, m)
        if p < 0 or p.denominator != 1:
            return False
    return True


# -- chi = 1 --------------------------------------------------------------------

def enumerate_chi1(pattern, r_elem_cap: int = 30) -> list[Basket]:
    """Initial baskets B^(5) with chi = 1, P2 = 0 and (P3..P6) = pattern."""
    pattern = tuple(pattern)
    if pattern not in PATTERNS_CHI1:
        raise ValueError(f"unknown pattern {pattern}")
    if r_elem_cap < INTEGRALITY_WINDOW:
        raise ResourceError(f"r_elem_cap {r_elem_cap} cannot certify an empty tail (need >= {INTEGRALITY_WINDOW})")
    zero = frozenset([Fraction(0)])

    def allowed(m):
        if m == 2:
            return zero
        if m <= 6:
            return frozenset([Fraction(pattern[m - 3])])
        return None

    found = _search(1, 5, r_elem_cap, allowed, lambda B, chi: _integral_nonneg(B, chi))
    # (1,k) with k > cap leaves P_m (m <= 13) unchanged and raises K^3 relative
    # to (1,cap); so an empty (1,cap) column certifies nothing is missed
    if any(B.get((1, r_elem_cap)) for B in found):
        raise ResourceError(f"a solution reaches (1,{r_elem_cap}); raise r_elem_cap")
    return sorted((Basket.of(B) for B in found), key=lambda b: (volume(FormalBasket(b, 1)), str(b)))


@dataclass
class Node:
    basket: Basket
    chi: int
    k3: Fraction
    mr: FilterVerdict
    exclusion: ExclusionVerdict
    minimal: bool = False

    @property
    def admissible(self) -> bool:
        return self.mr.holds and not self.exclusion.excluded


@dataclass
class CaseReport:
    pattern: tuple
    name: str
    initial: Basket
    minimal: list
    nodes: dict
    frontier: list


def _reachability(closure, order):
    """Map each basket in the closure to the set of its proper descendants."""
    from .lattice import successors

    memo = {}

    def desc(b):
        if b in memo:
            return memo[b]
        out = set()
        for _, s in successors(b, order):
            if s in closure:
                out.add(s)
                out |= desc(s)
        memo[b] = frozenset(out)
        return memo[b]

    for b in closure:
        desc(b)
    return memo


def _frontier(nodes, reach, use_mr):
    ok = {b for b, nd in nodes.items() if not nd.exclusion.excluded and (nd.mr.holds or not use_mr)}
    return [b for b in ok if not (reach[b] & ok)]


def _analyse(fb: FormalBasket, order: int, bound, use_mr: bool, cap_states: int):
    closure = descendant_closure(fb, unpack_order=order, cap_states=cap_states)
    reach = _reachability(closure, order)
    nodes = {}
    for b in closure:
        f = FormalBasket(b, fb.chi, fb.p2)
        nodes[b] = Node(b, fb.chi, volume(f), miyaoka_reid(f), exclusion_rules(f, bound), minimal=not reach[b])
    return closure, nodes, reach, _frontier(nodes, reach, use_mr)


@dataclass
class Chi1Report:
    cases: list
    survivors: list          # reduced antichain of admissible minima
    min_volume: Fraction
    attained_by: list
    excluded: list           # (basket, verdict) for minimal baskets removed by a rule


def classify_chi1(r_elem_cap: int = 30, cap_states: int = 10**6, bound=table_bound) -> Chi1Report:
    cases = []
    frontier_all = []
    excluded = []
    for pat, name in zip(PATTERNS_CHI1, CASE_NAMES):
        for b5 in enumerate_chi1(pat, r_elem_cap):
            fb = FormalBasket(b5, 1)
            closure, nodes, reach, front = _analyse(fb, 5, bound, True, cap_states)
            minimal = sorted((b for b in closure if not reach[b]), key=lambda b: (nodes[b].k3, str(b)))
            for b in minimal:
                if nodes[b].exclusion.excluded:
                    excluded.append((b, nodes[b].exclusion))
            cases.append(CaseReport(pat, name, b5, minimal, nodes, sorted(front, key=str)))
            frontier_all.extend(front)
    uniq = list(dict.fromkeys(frontier_all))
    survivors = [b for b in uniq if not any(o != b and merge_dominates(b, o) for o in uniq)]
    survivors.sort(key=lambda b: (volume(FormalBasket(b, 1)), str(b)))
    vmin = min(volume(FormalBasket(b, 1)) for b in survivors)
    att = [b for b in survivors if volume(FormalBasket(b, 1)) == vmin]
    return Chi1Report(cases, survivors, vmin, att, excluded)


# -- chi > 1 --------------------------------------------------------------------

@dataclass
class TableCRow:
    index: str
    p_vector: tuple
    chi: int
    b12: Basket
    k3: Fraction
    minimal_descendants: list
    mu1: int
    p18: int
    p24: int

    @property
    def formal(self) -> FormalBasket:
        return FormalBasket(self.b12, self.chi)


def thresholds(fb: FormalBasket, scan_limit: int = 60):
    """(mu0, mu1, mu2, mu3, first index from which P_m > 0 through scan_limit)."""
    if scan_limit < 48:
        raise ValueError("scan_limit must be >= 48")
    P = {m: plurigenus(fb, m) for m in range(2, scan_limit + 1)}
    mus = []
    for i in range(4):
        mus.append(next((m for m in range(2, scan_limit + 1) if P[m] > i), None))
    rho = None
    for m in range(scan_limit, 1, -1):
        if P[m] <= 0:
            break
        rho = m
    return (*mus, rho)


def _accept_chi_gt1(B, chi):
    P = {m: _pm(B, chi, m) for m in range(2, INTEGRALITY_WINDOW + 1)}
    for p in P.values():
        if p < 0 or p.denominator != 1:
            return False
    for m in range(2, INTEGRALITY_WINDOW // 2 + 1):
        for n in range(m, INTEGRALITY_WINDOW - m + 1):
            if P[m + n] < P[m] * P[n]:
                return False
    return ineq41(FormalBasket(Basket.of(B), chi)).holds


def enumerate_chi_gt1(r_elem_cap: int = 11, chis: Iterable[int] = range(2, CHI_MAX + 1),
                      cap_states: int = 10**6, descendants: bool = True) -> list[TableCRow]:
    """Initial baskets B^(12) for chi >= 2 under P2 = 0 and P_3..P_12 in {0, 1}."""
    zero = frozenset([Fraction(0)])
    zero_one = frozenset([Fraction(0), Fraction(1)])

    def allowed(m):
        if m == 2:
            return zero
        if m <= 12:
            return zero_one
        return None

    rows = []
    for chi in chis:
        budget = CHI_MAX - chi
        # the R-weight of any (1,k) past the cap must exceed the (4.1) budget
        if r_weight(r_elem_cap + 1) <= budget:
            raise ResourceError(f"r_elem_cap {r_elem_cap} cannot certify an empty tail for chi={chi}")
        for B in _search(chi, 12, r_elem_cap, allowed, _accept_chi_gt1, r_budget=budget):
            b = Basket.of(B)
            fb = FormalBasket(b, chi)
            pv = tuple(int(plurigenus(fb, m)) for m in range(3, 12))
            mins = []
            if descendants:
                mins = [(d, volume(FormalBasket(d, chi)))
                        for d in minimal_positive_descendants(fb, unpack_order=12, cap_states=cap_states)]
            th = thresholds(fb)
            rows.append(TableCRow("", pv, chi, b, volume(fb), mins, th[1],
                                  int(plurigenus(fb, 18)), int(plurigenus(fb, 24))))
    rows.sort(key=lambda r: (r.chi, r.p_vector, str(r.b12)))
    for i, r in enumerate(rows, 1):
        r.index = str(i)
    return rows


@dataclass
class ChiGt1Report:
    rows: list
    nodes: dict               # row index -> {basket: Node}
    excluded: list            # (row index, basket, verdict) over minimal baskets
    survivors: list           # (row index, basket) minimal admissible baskets
    min_volume: Fraction
    attained_by: list         # (row index, basket)


def classify_chi_gt1(rows: Optional[list] = None, cap_states: int = 10**6, bound=corollary_bound) -> ChiGt1Report:
    if rows is None:
        rows = enumerate_chi_gt1(cap_states=cap_states)
    all_nodes = {}
    excluded, survivors = [], []
    for row in rows:
        closure, nodes, reach, front = _analyse(row.formal, 12, bound, False, cap_states)
        all_nodes[row.index] = nodes
        for b in closure:
            if not reach[b] and nodes[b].exclusion.excluded:
                excluded.append((row.index, b, nodes[b].exclusion))
        survivors.extend((row.index, b) for b in sorted(front, key=str))
    vals = [(all_nodes[i][b].k3, i, b) for i, b in survivors]
    vmin = min(v for v, _, _ in vals)
    att = [(i, b) for v, i, b in vals if v == vmin]
    return ChiGt1Report(rows, all_nodes, excluded, survivors, vmin, att)
