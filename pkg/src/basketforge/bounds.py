"""Fixed-point machinery for canonical volume lower bounds.

A ``FibrationCase`` fixes (m0, p, beta, deg K_C).  Starting from the seed
xi >= deg K_C / (1 + m0/p + 1/beta), each admissible m improves xi to
(deg K_C + ceil(alpha)) / m with alpha = (m - 1 - m0/p - 1/beta) xi, and the
volume bound is (p beta / m0) xi.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import ceil, floor
from typing import Optional, Sequence

TYPES = ("III", "II", "I_q", "I_p", "I_n", "I_3")

# constant-regime facts for the irregular type, imported rather than derived
I_Q_VOLUME = Fraction(1, 22)
I_Q_BIRATIONAL = 7


class ChainBroken(ValueError):
    def __init__(self, index: int, m: int, alpha: Fraction):
        super().__init__(f"step {index}: m={m} is inadmissible (alpha={alpha})")
        self.index, self.m, self.alpha = index, m, alpha


class NotApplicable(ValueError):
    pass


@dataclass(frozen=True)
class FibrationCase:
    ftype: str
    m0: int
    p: int
    beta: Fraction
    degKC: int
    even_divisor: bool = False
    plurigenus_level: int = 2

    @classmethod
    def default(cls, ftype: str, m0: int, purpose: str = "volume", **kw) -> "FibrationCase":
        if ftype == "III":
            c = cls(ftype, m0, 1, Fraction(1, m0), 6)
        elif ftype == "II":
            c = cls(ftype, m0, 1, Fraction(1, m0), 2)
        elif ftype == "I_p":
            c = cls(ftype, m0, 1, Fraction(1, 2 * (m0 + 1)), 6)
        elif ftype == "I_n":
            c = cls(ftype, m0, 1, Fraction(1, 4 * (m0 + 1)), 18, even_divisor=True)
        elif ftype == "I_3":
            # volume runs use the divisor 4H (deg K_C >= 18); birationality runs use 2H
            if purpose == "volume":
                c = cls(ftype, m0, 2, Fraction(1, 2 * (m0 + 2)), 18, even_divisor=True, plurigenus_level=3)
            else:
                c = cls(ftype, m0, 2, Fraction(1, m0 + 2), 2, even_divisor=True, plurigenus_level=3)
        elif ftype == "generic":
            c = cls(ftype, m0, 1, Fraction(1, 4 * (m0 + 1)), 2)
        else:
            raise NotApplicable(f"no default case for type {ftype}")
        return replace(c, **kw) if kw else c

    @property
    def offset(self) -> Fraction:
        return 1 + Fraction(self.m0, self.p) + 1 / Fraction(self.beta)

    def alpha(self, xi: Fraction, m: int) -> Fraction:
        return (m - self.offset) * xi

    def admissible(self, alpha: Fraction) -> bool:
        return alpha > 1 or (self.even_divisor and alpha > 0)


@dataclass(frozen=True)
class XiStep:
    m: int
    alpha: Fraction
    alpha0: int
    xi: Fraction


@dataclass(frozen=True)
class XiTrace:
    case: FibrationCase
    seed: Fraction
    steps: tuple[XiStep, ...]
    final_xi: Fraction
    volume_bound: Fraction


def seed_xi(case: FibrationCase) -> Fraction:
    return Fraction(case.degKC) / case.offset


def refine_xi(case: FibrationCase, xi: Fraction, m: int) -> Optional[Fraction]:
    if m <= 1:
        raise ValueError("refine_xi needs m > 1")
    a = case.alpha(Fraction(xi), m)
    if not case.admissible(a):
        return None
    return Fraction(case.degKC + ceil(a), m)


def _bound(case: FibrationCase, xi: Fraction) -> Fraction:
    return case.p * Fraction(case.beta) / case.m0 * xi


def optimize_volume(case: FibrationCase, m_max: Optional[int] = None, strategy: str = "max") -> XiTrace:
    """Iterate the refinement to a fixed point.

    ``max`` takes the best admissible m each round, ending at a true fixed
    point.  ``least`` always takes the least admissible m and stops once that
    m brings no gain; this is the schedule that reproduces the published
    table of small-m0 bounds.
    """
    if m_max is None:
        m_max = 12 * case.m0 + 20
    if strategy not in ("max", "least"):
        raise ValueError(f"unknown strategy {strategy}")
    xi = seed_xi(case)
    steps = []
    while True:
        best = None
        for m in range(2, m_max + 1):
            new = refine_xi(case, xi, m)
            if new is None:
                continue
            if strategy == "least":
                best = (m, new)
                break
            if new > xi and (best is None or new > best[1]):
                best = (m, new)
        if best is None or best[1] <= xi:
            break
        m, new = best
        a = case.alpha(xi, m)
        steps.append(XiStep(m, a, ceil(a), new))
        xi = new
    return XiTrace(case, seed_xi(case), tuple(steps), xi, _bound(case, xi))


def closed_form_volume(ftype: str, m0: int) -> Fraction:
    if ftype == "III":
        return Fraction(10, (3 * m0 + 2) * m0 * m0)
    if ftype == "II":
        return Fraction(4, (3 * m0 + 2) * m0 * m0)
    if ftype == "I_p":
        return Fraction(9, 2 * m0 * (m0 + 1) * (4 * m0 + 5))
    if ftype == "I_n":
        return Fraction(11, 12 * m0 * (m0 + 1) ** 2)
    if ftype == "I_3":
        return Fraction(36, 5 * m0 * (m0 + 2) ** 2)
    if ftype == "I_q":
        return I_Q_VOLUME
    raise NotApplicable(f"unknown type {ftype}")


def table_case(ftype: str, m0: int) -> FibrationCase:
    """Case used for the published table: only the alpha > 1 admission rule."""
    return FibrationCase.default(ftype, m0, even_divisor=False)


def type_volume(ftype: str, m0: int, optimized: bool, m_max: Optional[int] = None) -> Fraction:
    if not optimized:
        return closed_form_volume(ftype, m0)
    return optimize_volume(table_case(ftype, m0), m_max, strategy="least").volume_bound


def worst_case_volume(m0: int, plevel: int = 2, chi_gt1_q0: bool = False, optimized: bool = False,
                      m_max: Optional[int] = None) -> Fraction:
    """Minimum of the per-type bounds applicable when P_m0 >= plevel.

    The irregular type is left out: its constant regime is handled separately.
    """
    if plevel == 3:
        types = ["III", "II", "I_3"]
    elif plevel == 2:
        types = ["III", "II", "I_p"] + ([] if chi_gt1_q0 else ["I_n"])
    else:
        raise ValueError("plevel must be 2 or 3")
    return min(type_volume(t, m0, optimized, m_max) for t in types)


def corollary_bound(m: int) -> Fraction:
    """K^3 lower bound from P_m >= 2 in closed form."""
    return worst_case_volume(m, 2)


def table_bound(m: int) -> Fraction:
    """K^3 lower bound from P_m >= 2 via the optimized table schedule."""
    return worst_case_volume(m, 2, optimized=True)


TABLE_ROWS = ("III", "II", "P>=3", "P>=2")


def table_a(m0s: Sequence[int] = range(2, 13)) -> dict[str, dict[int, Fraction]]:
    out = {row: {} for row in TABLE_ROWS}
    for m0 in m0s:
        out["III"][m0] = type_volume("III", m0, True)
        out["II"][m0] = type_volume("II", m0, True)
        out["P>=3"][m0] = worst_case_volume(m0, 3, optimized=True)
        out["P>=2"][m0] = worst_case_volume(m0, 2, optimized=True)
    return out


def nonvanishing_threshold(ftype: str, m0: int) -> int:
    if ftype in ("III", "II"):
        return 2 * m0
    if ftype == "I_p":
        return 2 * m0 + 3
    if ftype == "I_n":
        return 3 * m0 + 4
    if ftype == "I_3":
        return (3 * m0) // 2 + 4
    if ftype == "I_q":
        raise NotApplicable("the irregular type is in the constant regime (m >= 7)")
    raise NotApplicable(f"unknown type {ftype}")


def _least_int_above(x: Fraction) -> int:
    return floor(x) + 1


def birational_threshold(case: FibrationCase) -> int:
    m0 = case.m0
    t = case.ftype
    if t == "III":
        return _least_int_above(max(Fraction(3 * m0 - 1), Fraction(13 * m0 + 7, 5)))
    if t == "II":
        return _least_int_above(Fraction(7 * m0 + 4, 2))
    if t == "I_p":
        return 4 * m0 + 5
    if t in ("I_n", "generic"):
        return 5 * m0 + 6
    if t == "I_3":
        return 3 * m0 + 6
    if t == "I_q":
        return I_Q_BIRATIONAL
    raise NotApplicable(f"unknown type {t}")


def replay_chain(case: FibrationCase, ms: Sequence[int], target_alpha: Fraction = Fraction(2),
                 relaxed: bool = False) -> tuple[XiTrace, int]:
    """Apply the refinement at each m in order, then find the least m whose
    alpha exceeds ``target_alpha`` (or reaches it when ``relaxed``)."""
    if not ms:
        raise ValueError("ms must be non-empty")
    xi = seed_xi(case)
    steps = []
    for i, m in enumerate(ms):
        a = case.alpha(xi, m)
        new = refine_xi(case, xi, m)
        if new is None:
            raise ChainBroken(i, m, a)
        steps.append(XiStep(m, a, ceil(a), new))
        xi = max(xi, new)
    m = 2
    while True:
        a = case.alpha(xi, m)
        if a > target_alpha or (relaxed and a >= target_alpha):
            break
        m += 1
    return XiTrace(case, seed_xi(case), tuple(steps), xi, _bound(case, xi)), m
