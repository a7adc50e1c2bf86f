"""Independent reference implementations used to cross-check the package.

Everything here deliberately takes a different route from the library:
regex enumeration instead of the scanning chunker, quadrature instead of
the incomplete beta, exhaustive partition search instead of Lloyd
iterations, definitional sums instead of the count-table kappa.
"""

from __future__ import annotations

import itertools
import math
import re

import numpy as np
from scipy.integrate import quad

_TAG_LETTER = {"NOUN": "N", "ADJ": "A"}
_PATTERN = re.compile(r"A*N+")


def oracle_chunk_spans(tags):
    """All leftmost-longest non-overlapping ADJ* NOUN+ spans, by enumeration."""
    letters = "".join(_TAG_LETTER.get(tag, "x") for tag in tags)
    matches = [
        (start, end)
        for start in range(len(letters))
        for end in range(start + 1, len(letters) + 1)
        if _PATTERN.fullmatch(letters[start:end])
    ]
    chosen: list[tuple[int, int]] = []
    for start, end in sorted(matches, key=lambda span: (span[0], span[0] - span[1])):
        if all(end <= s or start >= e for s, e in chosen):
            chosen.append((start, end))
    return sorted(chosen)


def oracle_t_sf(t: float, df: int) -> float:
    """P(T >= t) by numerical integration of the Student-t density."""
    coeff = math.gamma((df + 1) / 2) / (math.sqrt(df * math.pi) * math.gamma(df / 2))

    def density(x):
        return coeff * (1 + x * x / df) ** (-(df + 1) / 2)

    if t >= 0:
        tail, _ = quad(density, t, math.inf)
        return tail
    head, _ = quad(density, t, 0)
    return head + 0.5


def oracle_min_inertia(points, k: int) -> float:
    """Optimal k-means objective by enumerating all partitions into k groups."""
    X = np.asarray(points, dtype=float)
    n = len(X)
    best = math.inf
    for assignment in itertools.product(range(k), repeat=n):
        if len(set(assignment)) != k:
            continue
        total = 0.0
        for group in range(k):
            members = X[[i for i in range(n) if assignment[i] == group]]
            centroid = members.mean(axis=0)
            total += float(((members - centroid) ** 2).sum())
        best = min(best, total)
    return best


def oracle_fleiss_kappa(table) -> float:
    """Fleiss' kappa straight from the definitional sums."""
    table = [list(row) for row in table]
    n_items = len(table)
    n_raters = sum(table[0])
    p_j = []
    for j in range(len(table[0])):
        p_j.append(sum(row[j] for row in table) / (n_items * n_raters))
    p_i = []
    for row in table:
        agree = sum(n * (n - 1) for n in row)
        p_i.append(agree / (n_raters * (n_raters - 1)))
    p_bar = sum(p_i) / n_items
    p_e = sum(p * p for p in p_j)
    if p_e >= 1.0:
        return 1.0
    return (p_bar - p_e) / (1.0 - p_e)


def oracle_cohen_kappa(a, b) -> float:
    """Cohen's kappa from the explicit confusion matrix."""
    categories = sorted(set(a) | set(b))
    n = len(a)
    confusion = {(x, y): 0 for x in categories for y in categories}
    for x, y in zip(a, b):
        confusion[(x, y)] += 1
    p_o = sum(confusion[(c, c)] for c in categories) / n
    p_e = 0.0
    for c in categories:
        row = sum(confusion[(c, y)] for y in categories) / n
        col = sum(confusion[(x, c)] for x in categories) / n
        p_e += row * col
    if p_e >= 1.0:
        return 1.0
    return (p_o - p_e) / (1.0 - p_e)
