"""Validation statistics: kappa agreement, one-sample t-tests, Likert rollups.

The Student-t tail probability is computed through the regularized
incomplete beta function (continued-fraction evaluation, Lentz's method),
so the package carries no statistics dependency and the p-values can be
checked against an independent quadrature oracle.  Significance stars
follow the strict-inequality convention: *** for p < 0.001, ** for
p < 0.01, * for p < 0.05.
"""

from __future__ import annotations

import csv
import math
import os
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence


class StatsError(ValueError):
    """Invalid input to a statistics routine."""


GREATER = "greater"
TWO_SIDED = "two-sided"
ALTERNATIVES = (GREATER, TWO_SIDED)

LIKERT_QUESTIONS = ("diversity", "comprehension", "effectiveness", "satisfaction")
LIKERT_CONDITIONS = ("SDM", "BASELINE")
LIKERT_MIDPOINT = 3.0


# --- agreement -----------------------------------------------------------


def cohen_kappa(labels_a: Sequence, labels_b: Sequence) -> float:
    """Cohen's kappa for two coders over parallel label sequences.

    Chance agreement comes from the product of the coders' marginals; when
    chance agreement is 1 (both coders constant and equal) kappa is 1 by
    convention.
    """
    if len(labels_a) != len(labels_b):
        raise StatsError(
            f"label sequences differ in length: {len(labels_a)} vs {len(labels_b)}"
        )
    n = len(labels_a)
    if n < 1:
        raise StatsError("kappa requires at least one item")
    observed = sum(a == b for a, b in zip(labels_a, labels_b)) / n
    counts_a = Counter(labels_a)
    counts_b = Counter(labels_b)
    expected = sum(
        (counts_a[c] / n) * (counts_b.get(c, 0) / n) for c in counts_a
    )
    if 1.0 - expected <= 0.0:
        return 1.0
    return (observed - expected) / (1.0 - expected)


@dataclass(frozen=True)
class CodingMatrix:
    """Complete item x coder categorical assignments."""

    items: tuple[str, ...]
    coders: tuple[str, ...]
    labels: dict  # (item, coder) -> label

    def __post_init__(self):
        if len(self.items) < 1:
            raise StatsError("coding matrix requires at least one item")
        if len(self.coders) < 2:
            raise StatsError("coding matrix requires at least two coders")
        for item in self.items:
            for coder in self.coders:
                if (item, coder) not in self.labels:
                    raise StatsError(f"missing label for item {item!r}, coder {coder!r}")

    @classmethod
    def from_records(cls, records: Iterable[tuple[str, str, str]]) -> "CodingMatrix":
        labels: dict = {}
        items: dict[str, None] = {}
        coders: dict[str, None] = {}
        for item, coder, label in records:
            if (item, coder) in labels:
                raise StatsError(f"duplicate coding for item {item!r}, coder {coder!r}")
            labels[(item, coder)] = label
            items.setdefault(item)
            coders.setdefault(coder)
        return cls(items=tuple(items), coders=tuple(coders), labels=labels)

    @classmethod
    def from_csv(cls, path) -> "CodingMatrix":
        with open(path, encoding="utf-8", newline="") as handle:
            reader = csv.DictReader(handle)
            required = {"item", "coder", "label"}
            if reader.fieldnames is None or not required <= set(reader.fieldnames):
                raise StatsError(f"{path}: expected header with columns {sorted(required)}")
            return cls.from_records(
                (row["item"], row["coder"], row["label"]) for row in reader
            )

    def column(self, coder: str) -> list:
        return [self.labels[(item, coder)] for item in self.items]

    def count_table(self) -> tuple[list, list[list[int]]]:
        """Categories (sorted) and the item x category rating-count table."""
        categories = sorted({label for label in self.labels.values()})
        index = {c: i for i, c in enumerate(categories)}
        table = [[0] * len(categories) for _ in self.items]
        for row, item in enumerate(self.items):
            for coder in self.coders:
                table[row][index[self.labels[(item, coder)]]] += 1
        return categories, table


def fleiss_kappa_from_table(table: Sequence[Sequence[int]]) -> float:
    """Fleiss' kappa over an item x category rating-count table."""
    if not table:
        raise StatsError("empty rating table")
    n_raters = sum(table[0])
    if n_raters < 2:
        raise StatsError("Fleiss' kappa requires at least two ratings per item")
    if any(sum(row) != n_raters for row in table):
        raise StatsError("every item must carry the same number of ratings")
    n_items = len(table)
    total = n_items * n_raters
    agreement = [
        (sum(c * c for c in row) - n_raters) / (n_raters * (n_raters - 1))
        for row in table
    ]
    p_mean = sum(agreement) / n_items
    category_shares = [
        sum(row[j] for row in table) / total for j in range(len(table[0]))
    ]
    p_expected = sum(share * share for share in category_shares)
    if 1.0 - p_expected <= 0.0:
        return 1.0
    return (p_mean - p_expected) / (1.0 - p_expected)


def fleiss_kappa(matrix: CodingMatrix) -> float:
    """Fleiss' kappa for a complete multi-coder coding matrix."""
    _, table = matrix.count_table()
    return fleiss_kappa_from_table(table)


# --- Student t -----------------------------------------------------------

_BETACF_MAX_ITER = 300
_BETACF_EPS = 1e-15
_BETACF_FPMIN = 1e-300


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (Lentz's method)."""
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _BETACF_FPMIN:
        d = _BETACF_FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _BETACF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _BETACF_FPMIN:
            d = _BETACF_FPMIN
        c = 1.0 + aa / c
        if abs(c) < _BETACF_FPMIN:
            c = _BETACF_FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _BETACF_FPMIN:
            d = _BETACF_FPMIN
        c = 1.0 + aa / c
        if abs(c) < _BETACF_FPMIN:
            c = _BETACF_FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _BETACF_EPS:
            return h
    raise ArithmeticError("incomplete beta continued fraction failed to converge")


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b) for a, b > 0 and x in [0, 1]."""
    if a <= 0.0 or b <= 0.0:
        raise StatsError("incomplete beta requires positive shape parameters")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                + a * math.log(x) + b * math.log1p(-x))
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def student_t_sf(t: float, df: int) -> float:
    """Upper-tail probability P(T >= t) for Student's t with df degrees of freedom."""
    if df < 1:
        raise StatsError("degrees of freedom must be >= 1")
    if math.isinf(t):
        return 0.0 if t > 0 else 1.0
    x = df / (df + t * t)
    tail = 0.5 * regularized_incomplete_beta(df / 2.0, 0.5, x)
    return tail if t >= 0 else 1.0 - tail


def student_t_cdf(t: float, df: int) -> float:
    return 1.0 - student_t_sf(t, df)


def stars(p: float) -> str:
    """Significance stars with strict thresholds."""
    if not 0.0 <= p <= 1.0:
        raise StatsError(f"p must lie in [0, 1], got {p!r}")
    if p < 0.001:
        return "***"
    if p < 0.01:
        return "**"
    if p < 0.05:
        return "*"
    return ""


@dataclass(frozen=True)
class TTestResult:
    t: float
    df: int
    p: float
    stars: str
    mean: float
    sd: float
    n: int
    alternative: str
    degenerate: bool = False


def one_sample_ttest_from_stats(mean: float, sd: float, n: int,
                                mu0: float = LIKERT_MIDPOINT,
                                alternative: str = GREATER) -> TTestResult:
    """One-sample t-test from summary statistics (sample sd, n-1 denominator)."""
    if alternative not in ALTERNATIVES:
        raise StatsError(f"alternative must be one of {ALTERNATIVES}")
    if n < 2:
        raise StatsError("t-test requires at least two samples")
    if sd < 0:
        raise StatsError("sd must be non-negative")
    df = n - 1
    if sd == 0.0:
        # Degenerate: all samples identical.  Direction decides the p-value.
        if mean == mu0:
            t = 0.0
            p = 0.5 if alternative == GREATER else 1.0
            degenerate = False
        elif mean > mu0:
            t, p, degenerate = math.inf, 0.0, True
        else:
            t = -math.inf
            p = 1.0 if alternative == GREATER else 0.0
            degenerate = True
    else:
        t = (mean - mu0) / (sd / math.sqrt(n))
        if alternative == GREATER:
            p = student_t_sf(t, df)
        else:
            p = 2.0 * student_t_sf(abs(t), df)
        p = min(max(p, 0.0), 1.0)
        degenerate = False
    return TTestResult(t=t, df=df, p=p, stars=stars(p), mean=mean, sd=sd, n=n,
                       alternative=alternative, degenerate=degenerate)


def one_sample_ttest(samples: Sequence[float], mu0: float = LIKERT_MIDPOINT,
                     alternative: str = GREATER) -> TTestResult:
    """Test whether a sample mean exceeds (or differs from) mu0."""
    values = [float(x) for x in samples]
    n = len(values)
    if n < 2:
        raise StatsError("t-test requires at least two samples")
    mean = math.fsum(values) / n
    variance = math.fsum((x - mean) ** 2 for x in values) / (n - 1)
    return one_sample_ttest_from_stats(mean, math.sqrt(variance), n, mu0, alternative)


# --- Likert --------------------------------------------------------------


@dataclass(frozen=True)
class LikertResponse:
    rater: str
    question: str
    condition: str
    score: int

    def __post_init__(self):
        if self.question not in LIKERT_QUESTIONS:
            raise StatsError(
                f"unknown question {self.question!r}; expected one of {LIKERT_QUESTIONS}"
            )
        if self.condition not in LIKERT_CONDITIONS:
            raise StatsError(
                f"unknown condition {self.condition!r}; expected one of {LIKERT_CONDITIONS}"
            )
        if self.score not in (1, 2, 3, 4, 5):
            raise StatsError(f"score must be an integer in 1..5, got {self.score!r}")


@dataclass(frozen=True)
class LikertSummary:
    question: str
    n: int
    sufficient: bool
    mean: float | None = None
    sd: float | None = None
    t: float | None = None
    df: int | None = None
    p: float | None = None
    stars: str | None = None


def aggregate_likert(responses: Iterable[LikertResponse],
                     mu0: float = LIKERT_MIDPOINT,
                     condition: str | None = None) -> list[LikertSummary]:
    """Per-question means with a one-sided t-test against the midpoint.

    Always yields one row per questionnaire dimension; questions with fewer
    than two responses are reported as insufficient rather than crashing.
    """
    grouped: dict[str, list[int]] = {q: [] for q in LIKERT_QUESTIONS}
    for response in responses:
        if condition is not None and response.condition != condition:
            continue
        grouped[response.question].append(response.score)
    rows = []
    for question in LIKERT_QUESTIONS:
        scores = grouped[question]
        if len(scores) < 2:
            mean = math.fsum(scores) / len(scores) if scores else None
            rows.append(LikertSummary(question=question, n=len(scores),
                                      sufficient=False, mean=mean))
            continue
        result = one_sample_ttest(scores, mu0=mu0, alternative=GREATER)
        rows.append(LikertSummary(
            question=question, n=result.n, sufficient=True, mean=result.mean,
            sd=result.sd, t=result.t, df=result.df, p=result.p, stars=result.stars,
        ))
    return rows


RATINGS_HEADER = ("rater", "question", "condition", "score")


def load_ratings(path) -> list[LikertResponse]:
    """Read Likert rows from a ``rater,question,condition,score`` CSV."""
    responses = []
    with open(path, encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None or not set(RATINGS_HEADER) <= set(reader.fieldnames):
            raise StatsError(f"{path}: expected header with columns {list(RATINGS_HEADER)}")
        for lineno, row in enumerate(reader, start=2):
            try:
                score = int(row["score"])
            except (TypeError, ValueError):
                raise StatsError(f"{path}: line {lineno}: bad score {row['score']!r}") from None
            responses.append(LikertResponse(
                rater=row["rater"], question=row["question"],
                condition=row["condition"], score=score,
            ))
    return responses


def append_rating(path, response: LikertResponse) -> None:
    """Append one rating row, writing the header when the file is new."""
    new_file = not os.path.exists(path) or os.path.getsize(path) == 0
    with open(path, "a", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        if new_file:
            writer.writerow(RATINGS_HEADER)
        writer.writerow([response.rater, response.question,
                         response.condition, response.score])
