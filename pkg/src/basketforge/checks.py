"""The eleven acceptance checks, shared by ``verify all`` and the test suite.

Each check compares computed values against the transcribed fixtures with
exact rational equality and returns a ``CheckResult`` carrying a short diff
when something disagrees.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import gcd
from typing import Callable, Optional

from . import bounds as bd
from .classifier import (
    CASE_NAMES,
    PATTERNS_CHI1,
    Chi1Report,
    ChiGt1Report,
    classify_chi1,
    classify_chi_gt1,
    enumerate_chi1,
    enumerate_chi_gt1,
    farey_parents,
    thresholds,
)
from .constraints import VOLUME, exclusion_rules, miyaoka_reid
from .core import (
    Basket,
    FormalBasket,
    Pair,
    canonical_chain,
    fmt_q,
    local_contribution,
    plurigenus,
    step_unpack,
    volume,
)
from .fixtures import Chi1Ref, TableC, load_chi1, load_tablea, load_tablec
from .lattice import minimal_positive_descendants, prime_packing


@dataclass
class CheckResult:
    number: int
    title: str
    ok: bool
    diff: list = field(default_factory=list)
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.ok else 'FAIL'}] {self.number:>2} {self.title} ({self.seconds:.1f}s)"


@dataclass
class Config:
    fixtures: Optional[str] = None
    r_elem_cap_chi1: int = 30
    r_elem_cap_chi_gt1: int = 11
    cap_states: int = 10**6
    property_cases: int = 10**4
    seed: int = 20240501


class Context:
    """Lazily computed, shared artefacts for one verification run."""

    def __init__(self, cfg: Optional[Config] = None):
        self.cfg = cfg or Config()

    @cached_property
    def chi1_ref(self) -> Chi1Ref:
        return load_chi1(self.cfg.fixtures)

    @cached_property
    def tablec(self) -> TableC:
        return load_tablec(self.cfg.fixtures)

    @cached_property
    def tablea(self) -> dict:
        return load_tablea(self.cfg.fixtures)

    @cached_property
    def chi1_report(self) -> Chi1Report:
        return classify_chi1(self.cfg.r_elem_cap_chi1, self.cfg.cap_states)

    @cached_property
    def rows(self) -> list:
        return enumerate_chi_gt1(self.cfg.r_elem_cap_chi_gt1, cap_states=self.cfg.cap_states)

    @cached_property
    def chi_gt1_report(self) -> ChiGt1Report:
        return classify_chi_gt1(self.rows, self.cfg.cap_states)

    @cached_property
    def row_names(self) -> dict:
        """Computed row index -> fixture row number (None when unmatched)."""
        ref = {(r.chi, r.basket): r.no for r in self.tablec.rows}
        return {r.index: ref.get((r.chi, r.b12)) for r in self.rows}

    def label(self, index: str, basket: Basket) -> str:
        no = self.row_names.get(index)
        if no is not None:
            for s in self.tablec.row(no).minimal():
                if s.basket == basket:
                    return s.label
        return f"{no or '?' + index}:{basket}"

    def chi1_name(self, basket: Basket) -> str:
        for name, b in self.chi1_ref.names.items():
            if b == basket:
                return name
        return str(basket)


def _cmp(diff: list, what: str, got, want) -> None:
    if got != want:
        diff.append(f"{what}: got {got}, want {want}")


# -- 1 -------------------------------------------------------------------------

def check_reid(ctx: Context) -> list:
    d = []
    n = ctx.chi1_ref.names
    b66 = FormalBasket(n["B_{6,6}"], 1)
    b31 = FormalBasket(n["B_{3,1}"], 1)
    _cmp(d, "K3(B66)", volume(b66), Fraction(1, 420))
    _cmp(d, "K3(B31)", volume(b31), Fraction(1, 66))
    _cmp(d, "P9(B31)", plurigenus(b31, 9), 2)
    _cmp(d, "P10(B31)", plurigenus(b31, 10), 3)
    tc = ctx.tablec
    _cmp(d, "K3(B59a)", volume(tc.named("59a").formal), Fraction(1, 2660))
    _cmp(d, "K3(B2a)", volume(tc.named("2a").formal), Fraction(1, 1170))
    _cmp(d, "K3(row 2)", volume(tc.row("2").formal), Fraction(1, 360))
    return d


# -- 2 -------------------------------------------------------------------------

def check_chi1_enumeration(ctx: Context) -> list:
    d = []
    t0 = time.perf_counter()
    for case in ctx.chi1_ref.cases:
        got = set(enumerate_chi1(case.pattern, ctx.cfg.r_elem_cap_chi1))
        want = set(case.initial)
        if got != want:
            d.append(f"case {case.case}: extra {sorted(map(str, got - want))} missing {sorted(map(str, want - got))}")
    el = time.perf_counter() - t0
    if el >= 60:
        d.append(f"enumeration took {el:.1f}s (limit 60s)")
    case1 = ctx.chi1_ref.cases[0]
    (b5,) = case1.initial
    mins = set(minimal_positive_descendants(FormalBasket(b5, 1), unpack_order=5, cap_states=ctx.cfg.cap_states))
    want = set(case1.minimal.values())
    if mins != want:
        d.append(f"case I minima: got {sorted(map(str, mins))}")
    for name, b in case1.minimal.items():
        if miyaoka_reid(FormalBasket(b, 1)).holds:
            d.append(f"{name} passes Miyaoka-Reid")
    return d


# -- 3, 4 ----------------------------------------------------------------------

def check_chi1_minimum(ctx: Context) -> list:
    d = []
    rep = ctx.chi1_report
    _cmp(d, "minimum", rep.min_volume, ctx.chi1_ref.minimum)
    _cmp(d, "attained by", [ctx.chi1_name(b) for b in rep.attained_by], [ctx.chi1_ref.minimum_at])
    m, bound = ctx.chi1_ref.b83_bound
    _cmp(d, "Table A P>=2 at m0=7", bd.table_bound(m), bound)
    v = exclusion_rules(FormalBasket(ctx.chi1_ref.names["B_{8,3}"], 1), bd.table_bound)
    if not v.excluded or (VOLUME, (m, bound)) not in [(v.rule, v.witness), *v.others]:
        d.append(f"B83 verdict {v}")
    return d


def check_chi1_survivors(ctx: Context) -> list:
    d = []
    for b in ctx.chi1_report.survivors:
        f = FormalBasket(b, 1)
        P = {m: plurigenus(f, m) for m in range(2, 21)}
        name = ctx.chi1_name(b)
        if P[10] < 2:
            d.append(f"{name}: P10 = {P[10]}")
        if P[5] + P[6] < 1:
            d.append(f"{name}: P5 + P6 = 0")
        bad = [m for m in range(7, 21) if P[m] <= 0]
        if bad:
            d.append(f"{name}: P_m <= 0 at {bad}")
    return d


# -- 5 -------------------------------------------------------------------------

def check_tablec(ctx: Context) -> list:
    d = []
    rows = ctx.rows
    _cmp(d, "row count", len(rows), len(ctx.tablec.rows))
    got = {(r.chi, r.b12): r for r in rows}
    for ref in ctx.tablec.rows:
        r = got.get((ref.chi, ref.basket))
        if r is None:
            d.append(f"row {ref.no} missing")
            continue
        for what, a, b in (("K3", r.k3, ref.k3), ("mu1", r.mu1, ref.mu1), ("P18", r.p18, ref.p18),
                           ("P24", r.p24, ref.p24), ("P-vector", r.p_vector, ref.p_vector)):
            _cmp(d, f"row {ref.no} {what}", a, b)
    ref_keys = {(r.chi, r.basket) for r in ctx.tablec.rows}
    for k, r in got.items():
        if k not in ref_keys:
            d.append(f"extra row chi={r.chi} {r.b12}")
        if any(p.b == 1 and p.r >= 6 for p in r.b12.pairs()):
            d.append(f"row chi={r.chi} {r.b12} uses (1,r) with r >= 6")
    chis = sorted({r.chi for r in rows})
    if not set(chis) <= {2, 3, 4}:
        d.append(f"chi values {chis}")
    return d


# -- 6, 7, 8 -------------------------------------------------------------------

def check_exclusions(ctx: Context) -> list:
    d = []
    rep = ctx.chi_gt1_report
    flagged = {ctx.label(i, b) for i, b, _ in rep.excluded}
    want = set(ctx.tablec.excluded)
    extra, missing = sorted(flagged - want), sorted(want - flagged)
    if extra:
        d.append(f"{len(extra)} extra exclusions: {', '.join(extra)}")
    if missing:
        d.append(f"not excluded: {', '.join(missing)}")
    elif extra:
        d.append(f"all {len(want)} listed baskets are flagged")
    for i, b, v in rep.excluded:
        f = FormalBasket(b, ctx.rows[int(i) - 1].chi)
        for rule, wit in [(v.rule, v.witness), *v.others]:
            if not _witness_holds(f, rule, wit):
                d.append(f"{ctx.label(i, b)}: witness {rule} {wit} does not check")
    return d


def _witness_holds(f: FormalBasket, rule: str, wit: tuple) -> bool:
    if rule == VOLUME:
        m, bound = wit
        return plurigenus(f, m) >= 2 and volume(f) < bound and bound == bd.corollary_bound(m)
    if len(wit) == 1:
        return plurigenus(f, wit[0]) < 0
    m, n = wit
    pm, pn, ps = plurigenus(f, m), plurigenus(f, n), plurigenus(f, m + n)
    return pm >= 1 and pn >= 1 and ps < pm + pn - 1


def check_chi_gt1_minimum(ctx: Context) -> list:
    d = []
    rep = ctx.chi_gt1_report
    tc = ctx.tablec
    _cmp(d, "minimum", rep.min_volume, tc.minimum)
    got = sorted(ctx.label(i, b) for i, b in rep.attained_by)
    _cmp(d, "attained by", got, sorted(tc.minimum_at))
    for label in sorted(set(tc.minimum_at) - set(got)):
        for i, b, v in rep.excluded:
            if ctx.label(i, b) == label:
                d.append(f"{label} is excluded: {v.rule} {v.witness} ({v.detail})")
    by_no = {no: i for i, no in ctx.row_names.items()}
    for name, ref in tc.intermediates.items():
        _cmp(d, f"K3(B{name})", volume(ref.formal), ref.k3)
        row_no = name.split(".")[0]
        if ref.basket not in rep.nodes[by_no[row_no]]:
            d.append(f"B{name} is not a packing descendant of row {row_no}")
    return d


def check_chi_gt1_survivors(ctx: Context) -> list:
    d = []
    for r in ctx.rows:
        if r.mu1 > 18:
            d.append(f"row {ctx.row_names[r.index]}: mu1 = {r.mu1}")
    for i, b in ctx.chi_gt1_report.survivors:
        f = FormalBasket(b, ctx.rows[int(i) - 1].chi)
        if plurigenus(f, 24) < 2:
            d.append(f"{ctx.label(i, b)}: P24 < 2")
        bad = [m for m in range(24, 48) if plurigenus(f, m) <= 0]
        if bad:
            d.append(f"{ctx.label(i, b)}: P_m <= 0 at {bad}")
    return d


# -- 9, 10 ---------------------------------------------------------------------

def check_tablea(ctx: Context) -> list:
    d = []
    want = ctx.tablea
    got = bd.table_a(sorted(next(iter(want.values()))))
    for row, cells in want.items():
        for m0, v in cells.items():
            if got[row][m0] != v:
                d.append(f"{row} m0={m0}: got {fmt_q(got[row][m0])}, want {fmt_q(v)}")
    return d


def _xis(tr) -> list:
    return [tr.seed] + [s.xi for s in tr.steps]


def check_chains(ctx: Context) -> list:
    d = []
    claim_b = bd.FibrationCase("generic", 18, 1, Fraction(1, 24), 2)
    tr, m = bd.replay_chain(claim_b, [65, 60, 59, 58])
    _cmp(d, "Claim B xi", [fmt_q(x) for x in _xis(tr)], ["2/43", "4/65", "1/15", "4/59", "2/29"])
    _cmp(d, "Claim B threshold", m, 73)
    i3 = bd.FibrationCase.default("I_3", 13, purpose="birationality")
    tr, m = bd.replay_chain(i3, [35, 32])
    _cmp(d, "I_3 xi", [fmt_q(x) for x in _xis(tr)], ["4/45", "4/35", "1/8"])
    _cmp(d, "I_3 threshold", m, 39)
    th = thresholds(ctx.tablec.named("2a").formal)
    _cmp(d, "thresholds(B2a)", th[1:4], (18, 24, 30))
    _cmp(d, "mu2(B3a)", thresholds(ctx.tablec.named("3a").formal)[2], 20)
    return d


# -- 11 ------------------------------------------------------------------------

def random_pair(rng: random.Random, rmax: int = 30) -> Pair:
    while True:
        r = rng.randint(2, rmax)
        b = rng.randint(1, r // 2)
        if gcd(b, r) == 1:
            return Pair(b, r)


def random_packable(rng: random.Random, rmax: int = 30):
    """A random basket together with one prime packing available in it."""
    while True:
        q = random_pair(rng, rmax)
        if q.b >= 2:     # both Farey parents are then genuine pairs
            break
    a, c = (Pair(*x) if 2 * x[0] <= x[1] else Pair(x[1] - x[0], x[1]) for x in farey_parents(*q))
    extra = [random_pair(rng, rmax) for _ in range(rng.randint(0, 6))]
    upper = Basket.of([a, c, *extra])
    lower = Basket.of([q, *extra])
    return upper, lower


def _prop_l(rng):
    p = random_pair(rng, 40)
    k, m = rng.randint(2, 5), rng.randint(1, 50)
    l = local_contribution(p, m)
    return (local_contribution((k * p.b, k * p.r), m) == k * l
            and local_contribution((p.r - p.b, p.r), m) == l if p.r > 2 else True)


def _prop_lemma32(rng):
    f = FormalBasket(Basket.of([random_pair(rng) for _ in range(rng.randint(0, 8))]), rng.randint(1, 6))
    m = rng.randint(2, 40)
    l = lambda k: sum((n * local_contribution(p, k) for p, n in f.basket.entries), Fraction(0))
    lhs = plurigenus(f, m + 2) - plurigenus(f, m) - plurigenus(f, 2)
    return lhs == (m * m + m) * volume(f) - f.chi + (l(m + 2) - l(m) - l(2))


def _prop_packing(rng):
    upper, lower = random_packable(rng)
    chi = rng.randint(1, 6)
    fu, fl = FormalBasket(upper, chi), FormalBasket(lower, chi)
    if volume(fl) > volume(fu):
        return False
    if miyaoka_reid(fl).margin < miyaoka_reid(fu).margin:
        return False
    return all(plurigenus(fl, m) <= plurigenus(fu, m) for m in range(2, 41))


def _prop_chain(rng):
    n, cap = rng.randint(2, 20), rng.randint(2, 20)
    ch = canonical_chain(n, cap)
    return all(p.b * q.r - q.b * p.r == 1 for p, q in zip(ch, ch[1:]))


def _prop_unpack(rng):
    n, cap = rng.randint(5, 14), rng.randint(5, 12)
    chain = set(canonical_chain(n, cap))
    pool = [p for p in (random_pair(rng, 24) for _ in range(12)) if 1 * cap >= p.r or p.b * cap >= p.r]
    b = Basket.of(pool[: rng.randint(1, 6)]) if pool else Basket.of([Pair(1, 2)])
    try:
        u = step_unpack(b, n, cap)
    except ValueError:
        return True
    return ((u.sum_b, u.sum_r) == (b.sum_b, b.sum_r) and set(u.pairs()) <= chain
            and step_unpack(u, n, cap) == u)


def _prop_refine(rng):
    t = rng.choice(["III", "II", "I_p", "I_n", "I_3", "generic"])
    c = bd.FibrationCase.default(t, rng.randint(2, 24))
    m = rng.randint(2, 12 * c.m0 + 20)
    x1 = Fraction(rng.randint(1, 400), rng.randint(1, 400))
    x2 = x1 + Fraction(rng.randint(0, 50), rng.randint(1, 400))
    a, b = bd.refine_xi(c, x1, m), bd.refine_xi(c, x2, m)
    return a is None or (b is not None and b >= a)


def _prop_optimize(rng):
    t = rng.choice(["III", "II", "I_p", "I_n", "I_3"])
    m0 = rng.randint(2, 24)
    return bd.optimize_volume(bd.FibrationCase.default(t, m0)).volume_bound >= bd.closed_form_volume(t, m0)


PROPERTIES: dict[str, Callable] = {
    "l-function gcd/symmetry": _prop_l,
    "Reid difference identity": _prop_lemma32,
    "packing monotonicity (K3, P_m, MR margin)": _prop_packing,
    "chain determinants": _prop_chain,
    "step_unpack sums and idempotence": _prop_unpack,
    "refine_xi monotone in xi": _prop_refine,
    "optimize_volume >= closed form": _prop_optimize,
}


def check_properties(ctx: Context) -> list:
    d = []
    rng = random.Random(ctx.cfg.seed)
    for name, prop in PROPERTIES.items():
        n = ctx.cfg.property_cases
        if name == "optimize_volume >= closed form":
            n = min(n, 5 * 24)   # only 5 x 23 distinct inputs exist
        for i in range(n):
            state = rng.getstate()
            if not prop(rng):
                d.append(f"{name}: counterexample at case {i} (seed {ctx.cfg.seed})")
                rng.setstate(state)
                break
    return d


CHECKS = [
    (1, "Reid stack exactness", check_reid),
    (2, "chi=1 enumeration and Case I minima", check_chi1_enumeration),
    (3, "chi=1 minimum 1/420 and B83 exclusion", check_chi1_minimum),
    (4, "chi=1 survivor plurigenera", check_chi1_survivors),
    (5, "Table C rows", check_tablec),
    (6, "exclusion set of 20", check_exclusions),
    (7, "chi>1 minimum 1/2660", check_chi_gt1_minimum),
    (8, "mu1 <= 18, P24 >= 2, P_m > 0 on 24..47", check_chi_gt1_survivors),
    (9, "Table A cells", check_tablea),
    (10, "xi chains and thresholds", check_chains),
    (11, "randomized property suites", check_properties),
]


def run_check(ctx: Context, number: int) -> CheckResult:
    _, title, fn = CHECKS[number - 1]
    t0 = time.perf_counter()
    diff = fn(ctx)
    return CheckResult(number, title, not diff, diff, time.perf_counter() - t0)


def run_all(ctx: Optional[Context] = None, numbers=None) -> list[CheckResult]:
    ctx = ctx or Context()
    return [run_check(ctx, n) for n in (numbers or range(1, len(CHECKS) + 1))]
