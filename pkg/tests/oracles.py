"""Independent reference implementations used only by the tests.

Each oracle takes a deliberately different route from the library:
exhaustive enumeration instead of dynamic programming, a quadratic scan
instead of an automaton, arbitrary-precision quadrature instead of
special functions, exact rationals instead of floats.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb

import mpmath
import numpy as np

mpmath.mp.dps = 40


# -- segmentation ---------------------------------------------------------

def all_segmentations(body: str, words: set[str]) -> list[list[str]]:
    if not body:
        return [[]]
    out = []
    for j in range(1, len(body) + 1):
        head = body[:j]
        if head in words:
            out.extend([head] + rest for rest in all_segmentations(body[j:], words))
    return out


def best_segmentation(body: str, words: set[str]) -> list[str] | None:
    """Fewest words, then longest first word, longest second word, and so on."""
    cands = all_segmentations(body, words)
    if not cands:
        return None
    return min(cands, key=lambda seg: (len(seg), [-len(w) for w in seg]))


# -- matching -------------------------------------------------------------

def brute_force_matches(terms: list[tuple[str, ...]], tokens: list[str | None]) -> set[tuple[int, int, int]]:
    """(term index, start, end) for every contiguous occurrence."""
    found = set()
    for idx, term in enumerate(terms):
        n = len(term)
        for start in range(len(tokens) - n + 1):
            if tuple(tokens[start:start + n]) == term:
                found.add((idx, start, start + n))
    return found


# -- distributions ----------------------------------------------------------

def student_t_two_sided(t: float, df: float) -> float:
    """2 * P(T > |t|) by direct integration of the Student-t density."""
    nu = mpmath.mpf(df)
    const = mpmath.gamma((nu + 1) / 2) / (mpmath.sqrt(nu * mpmath.pi) * mpmath.gamma(nu / 2))
    density = lambda x: const * (1 + x * x / nu) ** (-(nu + 1) / 2)  # noqa: E731
    tail = mpmath.quad(density, [abs(mpmath.mpf(t)), mpmath.inf])
    return float(2 * tail)


def chi2_df1_sf(x: float) -> float:
    """P(X > x) for chi-square with one degree of freedom, by integration."""
    if x <= 0:
        return 1.0
    density = lambda u: u ** mpmath.mpf(-0.5) * mpmath.e ** (-u / 2) / mpmath.sqrt(2 * mpmath.pi)  # noqa: E731
    return float(1 - mpmath.quad(density, [0, x]))


def welch_reference(a, b) -> tuple[float, float, float]:
    """(t, df, two-sided p) from textbook formulas in exact rationals."""
    a = [Fraction(v) for v in a]
    b = [Fraction(v) for v in b]
    ma, mb = sum(a) / len(a), sum(b) / len(b)
    va = sum((v - ma) ** 2 for v in a) / (len(a) - 1)
    vb = sum((v - mb) ** 2 for v in b) / (len(b) - 1)
    se2 = va / len(a) + vb / len(b)
    t = float(ma - mb) / float(se2) ** 0.5
    df = float(se2 ** 2 / ((va / len(a)) ** 2 / (len(a) - 1) + (vb / len(b)) ** 2 / (len(b) - 1)))
    return t, df, student_t_two_sided(t, df)


def yates_reference(table) -> tuple[float, float]:
    """Yates statistic summed cell by cell over exact expected counts."""
    (a, b), (c, d) = table
    n = a + b + c + d
    rows, cols = (a + b, c + d), (a + c, b + d)
    obs = ((a, b), (c, d))
    stat = Fraction(0)
    for i in range(2):
        for j in range(2):
            e = Fraction(rows[i] * cols[j], n)
            dev = max(abs(obs[i][j] - e) - Fraction(1, 2), Fraction(0))
            stat += dev * dev / e
    return float(stat), chi2_df1_sf(float(stat))


def fisher_reference(table) -> float:
    """Two-sided p: total probability of every table with the same margins
    that is no more likely than the observed one (exact rationals)."""
    (a, b), (c, d) = table
    r1, r2, c1 = a + b, c + d, a + c
    n = r1 + r2
    total = comb(n, c1)
    probs = {}
    for x in range(max(0, c1 - r2), min(r1, c1) + 1):
        probs[x] = Fraction(comb(r1, x) * comb(r2, c1 - x), total)
    observed = probs[a]
    return float(sum(p for p in probs.values() if p <= observed))


# -- correlation ------------------------------------------------------------

def residual_partial_r(x, y, z) -> float:
    """Correlation of the OLS residuals of x and y regressed on z."""
    x, y, z = (np.asarray(v, dtype=float) for v in (x, y, z))
    design = np.column_stack([np.ones_like(z), z])
    rx = x - design @ np.linalg.lstsq(design, x, rcond=None)[0]
    ry = y - design @ np.linalg.lstsq(design, y, rcond=None)[0]
    return float(np.dot(rx, ry) / np.sqrt(np.dot(rx, rx) * np.dot(ry, ry)))


# -- classifier metrics -------------------------------------------------------

def kappa_reference(tp: int, fp: int, tn: int, fn: int) -> Fraction:
    n = tp + fp + tn + fn
    po = Fraction(tp + tn, n)
    pe = Fraction((tp + fp) * (tp + fn) + (tn + fn) * (tn + fp), n * n)
    return (po - pe) / (1 - pe)
