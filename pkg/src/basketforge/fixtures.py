"""Loading the transcribed reference tables under ``fixtures/reference``."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional

from .core import Basket, FormalBasket, parse_basket, step_unpack

ENV_VAR = "BASKETFORGE_FIXTURES"
STEP = 12
ELEM_CAP = 11


class FixtureError(RuntimeError):
    pass


def fixture_dir(override: Optional[str] = None) -> Path:
    if override:
        return Path(override)
    if os.environ.get(ENV_VAR):
        return Path(os.environ[ENV_VAR])
    for base in [Path(__file__).resolve().parent, *Path(__file__).resolve().parents, Path.cwd()]:
        cand = base / "fixtures" / "reference"
        if cand.is_dir():
            return cand
    raise FixtureError(f"fixture directory not found; set {ENV_VAR}")


def _load(name: str, override: Optional[str]) -> dict:
    path = fixture_dir(override) / name
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as e:
        raise FixtureError(f"cannot read {path}: {e}") from e


def star_basket(row_basket: Basket, listed: Basket) -> Basket:
    """Read ``{listed, *}`` relative to a step-12 row basket."""
    return row_basket - step_unpack(listed, STEP, ELEM_CAP) + listed


@dataclass(frozen=True)
class RefBasket:
    label: str
    chi: int
    basket: Basket
    k3: Fraction
    p18: Optional[int] = None
    p24: Optional[int] = None
    mu1: Optional[int] = None
    source: Optional[Basket] = None   # the "from" side when printed

    @property
    def formal(self) -> FormalBasket:
        return FormalBasket(self.basket, self.chi)


@dataclass(frozen=True)
class RefRow:
    no: str
    p_vector: tuple
    chi: int
    basket: Basket
    k3: Fraction
    p18: int
    p24: int
    mu1: int
    subrows: tuple

    @property
    def formal(self) -> FormalBasket:
        return FormalBasket(self.basket, self.chi)

    def minimal(self) -> list:
        """Printed minimal baskets; a row without sub-rows is its own minimum."""
        if self.subrows:
            return list(self.subrows)
        return [RefBasket(self.no, self.chi, self.basket, self.k3, self.p18, self.p24, self.mu1)]


@dataclass(frozen=True)
class TableC:
    rows: tuple
    excluded: tuple
    intermediates: dict
    minimum: Fraction
    minimum_at: tuple

    def row(self, no: str) -> RefRow:
        for r in self.rows:
            if r.no == no:
                return r
        raise KeyError(no)

    def named(self, label: str) -> RefBasket:
        """Look up a row ("9"), a sub-row ("11a") or an intermediate ("16.5")."""
        if label in self.intermediates:
            return self.intermediates[label]
        for r in self.rows:
            for s in r.minimal():
                if s.label == label:
                    return s
            if r.no == label:
                return RefBasket(r.no, r.chi, r.basket, r.k3, r.p18, r.p24, r.mu1)
        raise KeyError(label)


def load_tablec(override: Optional[str] = None) -> TableC:
    doc = _load("tablec.json", override)
    slots = [parse_basket("{" + s + "}").entries[0][0] for s in doc["slots"]]
    rows = []
    for d in doc["rows"]:
        b = Basket.of({p: n for p, n in zip(slots, d["counts"]) if n})
        subs = []
        for s in d["subrows"]:
            to = parse_basket(s["to"])
            src = parse_basket(s["from"]) if s.get("from") else None
            subs.append(RefBasket(s["label"], d["chi"], star_basket(b, to), Fraction(s["k3"]),
                                  s["p18"], s["p24"], s["mu1"], src))
        rows.append(RefRow(d["no"], tuple(d["p_vector"]), d["chi"], b, Fraction(d["k3"]),
                           d["p18"], d["p24"], d["mu1"], tuple(subs)))
    inter = {}
    for it in doc["intermediates"]:
        row = next(r for r in rows if r.no == it["row"])
        inter[it["name"]] = RefBasket(it["name"], row.chi, star_basket(row.basket, parse_basket(it["basket"])),
                                      Fraction(it["k3"]))
    mn = doc["minimum"]
    return TableC(tuple(rows), tuple(doc["excluded"]), inter, Fraction(mn["k3"]), tuple(mn["attained_by"]))


@dataclass(frozen=True)
class Chi1Case:
    case: str
    pattern: tuple
    initial: tuple
    minimal: dict        # name -> Basket
    mr_fails: tuple


@dataclass(frozen=True)
class Chi1Ref:
    cases: tuple
    names: dict          # every named basket
    survivors: tuple
    minimum: Fraction
    minimum_at: str
    b83_bound: tuple


def load_chi1(override: Optional[str] = None) -> Chi1Ref:
    doc = _load("chi1_cases.json", override)
    names = {}
    cases = []
    for c in doc["patterns"]:
        mins = {}
        for m in c.get("minimal", []):
            mins[m["name"]] = parse_basket(m["basket"])
        names.update(mins)
        cases.append(Chi1Case(c["case"], tuple(c["pattern"]), tuple(parse_basket(s) for s in c["initial"]),
                              mins, tuple(c.get("miyaoka_reid_fails", []))))
    names[doc["b210"]["name"]] = parse_basket(doc["b210"]["basket"])
    ex = doc["b83_exclusion"]
    return Chi1Ref(tuple(cases), names, tuple(doc["survivors"]), Fraction(doc["minimum"]["k3"]),
                   doc["minimum"]["attained_by"], (ex["m"], Fraction(ex["bound"])))


def load_tablea(override: Optional[str] = None) -> dict:
    doc = _load("tablea.json", override)
    return {row: {m0: Fraction(v) for m0, v in zip(doc["m0"], vals)} for row, vals in doc["rows"].items()}
