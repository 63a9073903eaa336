"""Independent reference computations used by the tests.

Nothing here imports the package's arithmetic; each helper is written from
the textbook definition so it can catch mistakes in the optimized code.
"""

from fractions import Fraction
from math import gcd


def l_direct(b, r, m):
    """Reid's l(m), summed term by term with an explicit residue loop."""
    total = Fraction(0)
    for j in range(1, m):
        x = j * b - (j * b // r) * r
        total += Fraction(x * (r - x), 2 * r)
    return total


def k3_direct(pairs, chi, p2=0):
    return 2 * p2 + 6 * chi - sum((Fraction(b * (r - b), r) for b, r in pairs), Fraction(0))


def pm_direct(pairs, chi, m, p2=0):
    """Riemann-Roch for m K: (2m-1) m (m-1)/12 K^3 + (1-2m) chi + sum l(m)."""
    k3 = k3_direct(pairs, chi, p2)
    return Fraction((2 * m - 1) * m * (m - 1), 12) * k3 + (1 - 2 * m) * chi + sum(
        (l_direct(b, r, m) for b, r in pairs), Fraction(0))


def farey_chain(n, lo_den):
    """All coprime b/r with r <= max(n, lo_den) between 1/lo_den and 1/2, by brute force,
    keeping r <= n except for the elementary pairs (1, k)."""
    out = set()
    for r in range(2, max(n, lo_den) + 1):
        for b in range(1, r // 2 + 1):
            if gcd(b, r) != 1 or Fraction(b, r) < Fraction(1, lo_den):
                continue
            if r <= n or b == 1:
                out.add((b, r))
    return sorted(out, key=lambda p: (-Fraction(*p), p[1]))


def expand(counts, slots):
    pairs = []
    for p, n in zip(slots, counts):
        pairs.extend([p] * n)
    return pairs
