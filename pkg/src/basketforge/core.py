"""Exact arithmetic on pairs, baskets and formal baskets.

A pair (b, r) marks a quotient singularity of type (1/r)(1, -1, b).  A basket
is a multiset of canonical pairs; a formal basket adds chi and P2.  Every
quantity here is an exact ``Fraction``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Iterator, Mapping, NamedTuple, Union


class InvalidPair(ValueError):
    pass


class OutOfDomain(ValueError):
    pass


class UnpackingRangeError(ValueError):
    def __init__(self, pair):
        super().__init__(f"pair {pair} lies outside the chain range")
        self.pair = pair


class BasketSyntaxError(ValueError):
    pass


class Pair(NamedTuple):
    b: int
    r: int

    def __str__(self) -> str:
        return f"({self.b},{self.r})"

    @property
    def slope(self) -> Fraction:
        return Fraction(self.b, self.r)

    @property
    def weight(self) -> Fraction:
        """b(r-b)/r, the pair's share of the volume correction."""
        return Fraction(self.b * (self.r - self.b), self.r)


def _sort_key(p: Pair):
    return (-Fraction(p.b, p.r), p.r)


def reduce_pair(b: int, r: int) -> dict[Pair, int]:
    """Split (b, r) into gcd copies of its primitive pair, folded to 2b <= r."""
    if b <= 0 or r <= 0 or b >= r:
        raise InvalidPair(f"invalid pair ({b},{r})")
    d = gcd(b, r)
    b, r = b // d, r // d
    if 2 * b > r:
        b = r - b
    return {Pair(b, r): d}


@lru_cache(maxsize=None)
def _l(b: int, r: int, m: int) -> Fraction:
    s = Fraction(0)
    for j in range(1, m):
        x = (j * b) % r
        s += Fraction(x * (r - x), 2 * r)
    return s


def local_contribution(p: tuple[int, int], m: int) -> Fraction:
    """Reid's l_p(m) = sum_{j<m} x_j (r - x_j) / 2r with x_j = jb mod r."""
    b, r = p
    if b <= 0 or r <= 0 or b >= r:
        raise InvalidPair(f"invalid pair ({b},{r})")
    if m < 1:
        raise OutOfDomain("local_contribution needs m >= 1")
    return _l(b, r, m)


@dataclass(frozen=True)
class Basket:
    """Canonically ordered multiset of pairs."""

    entries: tuple[tuple[Pair, int], ...] = ()

    @classmethod
    def of(cls, data: Union[Mapping, Iterable, None] = None) -> "Basket":
        """Build from a mapping pair->count or an iterable of pairs / (pair, count)."""
        counts: dict[Pair, int] = {}

        def add(b, r, n):
            if n < 0:
                raise InvalidPair("negative multiplicity")
            if n == 0:
                return
            for p, k in reduce_pair(b, r).items():
                counts[p] = counts.get(p, 0) + k * n

        if data is None:
            pass
        elif isinstance(data, Mapping):
            for (b, r), n in data.items():
                add(b, r, n)
        else:
            for item in data:
                if len(item) == 2 and isinstance(item[0], tuple):
                    (b, r), n = item
                    add(b, r, n)
                else:
                    b, r = item
                    add(b, r, 1)
        return cls._from_counts(counts)

    @classmethod
    def _from_counts(cls, counts: Mapping[Pair, int]) -> "Basket":
        items = sorted(((Pair(*p), n) for p, n in counts.items() if n), key=lambda kv: _sort_key(kv[0]))
        return cls(tuple(items))

    def counts(self) -> dict[Pair, int]:
        return dict(self.entries)

    def count(self, p) -> int:
        return self.counts().get(Pair(*p), 0)

    def pairs(self) -> Iterator[Pair]:
        for p, n in self.entries:
            for _ in range(n):
                yield p

    def __iter__(self):
        return iter(self.entries)

    def __len__(self) -> int:
        return sum(n for _, n in self.entries)

    def __add__(self, other: "Basket") -> "Basket":
        c = self.counts()
        for p, n in other.entries:
            c[p] = c.get(p, 0) + n
        return Basket._from_counts(c)

    def __sub__(self, other: "Basket") -> "Basket":
        c = self.counts()
        for p, n in other.entries:
            c[p] = c.get(p, 0) - n
            if c[p] < 0:
                raise ValueError(f"cannot remove {n} x {p}")
        return Basket._from_counts(c)

    @property
    def sum_b(self) -> int:
        return sum(p.b * n for p, n in self.entries)

    @property
    def sum_r(self) -> int:
        return sum(p.r * n for p, n in self.entries)

    def correction(self) -> Fraction:
        """sum of b(r-b)/r over the basket."""
        return _correction(self.entries)

    def __str__(self) -> str:
        return format_basket(self)


@lru_cache(maxsize=1 << 16)
def _correction(entries) -> Fraction:
    return sum((n * Fraction(p.b * (p.r - p.b), p.r) for p, n in entries), Fraction(0))


@dataclass(frozen=True)
class FormalBasket:
    basket: Basket
    chi: int
    p2: int = 0

    def __str__(self) -> str:
        return format_formal(self)


def _fb(x) -> FormalBasket:
    if isinstance(x, FormalBasket):
        return x
    raise TypeError("expected a FormalBasket")


def volume(fb: FormalBasket) -> Fraction:
    """K^3 = 2 P2 + 6 chi - sum b(r-b)/r."""
    fb = _fb(fb)
    return 2 * fb.p2 + 6 * fb.chi - fb.basket.correction()


@lru_cache(maxsize=None)
def _fm(m: int) -> Fraction:
    return Fraction(m * (m - 1) * (2 * m - 1), 12)


@lru_cache(maxsize=None)
def _local_term(b: int, r: int, m: int) -> Fraction:
    # l(m) minus the pair's share of F_m K^3
    return _l(b, r, m) - _fm(m) * Fraction(b * (r - b), r)


def plurigenus(fb: FormalBasket, m: int) -> Fraction:
    """P_m = F_m K^3 + (1 - 2m) chi + sum l(m), with F_m = m(m-1)(2m-1)/12."""
    if m < 2:
        raise OutOfDomain("plurigenus is defined here for m >= 2")
    fb = _fb(fb)
    s = _fm(m) * (2 * fb.p2 + 6 * fb.chi) + (1 - 2 * m) * fb.chi
    for p, n in fb.basket.entries:
        s += n * _local_term(p.b, p.r, m)
    return s


def plurigenera(fb: FormalBasket, lo: int, hi: int) -> dict[int, Fraction]:
    return {m: plurigenus(fb, m) for m in range(lo, hi + 1)}


def elementary_decomposition(p: tuple[int, int]) -> Basket:
    b, r = p
    if b == 1:
        return Basket.of({(1, r): 1})
    k = r // b
    c = {}
    x, y = (k + 1) * b - r, r - k * b
    if x:
        c[(1, k)] = x
    if y:
        c[(1, k + 1)] = y
    return Basket.of(c)


def elementary_basket(basket: Basket) -> Basket:
    """B^(0): every pair replaced by its elementary decomposition."""
    c: dict[Pair, int] = {}
    for p, n in basket.entries:
        for q, k in elementary_decomposition(p).entries:
            c[q] = c.get(q, 0) + n * k
    return Basket._from_counts(c)


def canonical_chain(n: int, r_elem_cap: int) -> list[Pair]:
    """Coprime pairs with r <= n and slope >= 1/cap, plus (1,k) for k <= cap."""
    if r_elem_cap < 2:
        raise OutOfDomain("r_elem_cap must be >= 2")
    out = {Pair(1, k) for k in range(2, r_elem_cap + 1)}
    for r in range(3, n + 1):
        for b in range(1, r // 2 + 1):
            if gcd(b, r) == 1 and b * r_elem_cap >= r:
                out.add(Pair(b, r))
    return sorted(out, key=_sort_key)


def step_unpack(basket: Basket, n: int, r_elem_cap: int) -> Basket:
    """Rewrite every pair off the step-n chain over its two bracketing chain pairs."""
    chain = canonical_chain(n, r_elem_cap)
    on = set(chain)
    c: dict[Pair, int] = {}
    for p, k in basket.entries:
        if p in on:
            c[p] = c.get(p, 0) + k
            continue
        s = p.slope
        for left, right in zip(chain, chain[1:]):
            if left.slope > s > right.slope:
                x = p.b * right.r - right.b * p.r
                y = left.b * p.r - p.b * left.r
                c[left] = c.get(left, 0) + k * x
                c[right] = c.get(right, 0) + k * y
                break
        else:
            raise UnpackingRangeError(p)
    return Basket._from_counts(c)


_ENTRY = re.compile(r"^\s*(?:(\d+)\s*[x×*]\s*)?\(\s*(\d+)\s*,\s*(\d+)\s*\)\s*$")


def parse_basket(text: str) -> Basket:
    t = text.strip()
    if not (t.startswith("{") and t.endswith("}")):
        raise BasketSyntaxError(f"basket must be braced: {text!r}")
    body = t[1:-1].strip()
    if not body:
        return Basket()
    parts = re.split(r",(?![^()]*\))", body)
    c: dict[tuple[int, int], int] = {}
    for part in parts:
        mt = _ENTRY.match(part)
        if not mt:
            raise BasketSyntaxError(f"bad basket entry {part!r}")
        n = int(mt.group(1)) if mt.group(1) else 1
        key = (int(mt.group(2)), int(mt.group(3)))
        c[key] = c.get(key, 0) + n
    try:
        return Basket.of(c)
    except InvalidPair as e:
        raise BasketSyntaxError(str(e)) from e


def parse_formal(text: str) -> FormalBasket:
    head, *rest = text.split(";")
    kv = {}
    for item in rest:
        if not item.strip():
            continue
        if "=" not in item:
            raise BasketSyntaxError(f"bad field {item!r}")
        k, v = item.split("=", 1)
        try:
            kv[k.strip()] = int(v)
        except ValueError as e:
            raise BasketSyntaxError(f"bad integer in {item!r}") from e
    unknown = set(kv) - {"chi", "p2"}
    if unknown or "chi" not in kv:
        raise BasketSyntaxError("formal basket needs chi=<int> and optional p2=<int>")
    return FormalBasket(parse_basket(head), kv["chi"], kv.get("p2", 0))


def format_basket(basket: Basket) -> str:
    parts = [f"{n}x{p}" if n > 1 else str(p) for p, n in basket.entries]
    return "{" + ",".join(parts) + "}"


def format_formal(fb: FormalBasket) -> str:
    return f"{format_basket(fb.basket)};chi={fb.chi};p2={fb.p2}"


def fmt_q(q: Fraction) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"
