"""Survey statistics: frequency percentages, Likert mean and standard
deviation against the 3.00 agreement benchmark, and the chi-square
goodness-of-fit test with a fixed critical value.

All functions are pure; rounding to the reported precision happens only at
the formatting edge (half-up), full precision is kept internally.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from typing import Optional, Sequence

from .errors import (
    EmptyCounts, EmptyTable, InsufficientData, LengthMismatch,
    NonpositiveExpected,
)

AGREED_MEAN_BENCHMARK = 3.00
DEFAULT_CRITICAL_VALUE = 5.99
LIKERT_SCORES = (1, 2, 3, 4, 5)


def round_half_up(value: float, places: int) -> float:
    q = Decimal(1).scaleb(-places)
    return float(Decimal(repr(value)).quantize(q, rounding=ROUND_HALF_UP))


@dataclass(frozen=True)
class FrequencyTable:
    labels: tuple[str, ...]
    observed: tuple[int, ...]

    def __post_init__(self):
        if len(self.labels) != len(self.observed):
            raise LengthMismatch("labels and observed differ in length")
        if any(c < 0 for c in self.observed):
            raise ValueError("observed counts must be nonnegative")

    @property
    def total(self) -> int:
        return sum(self.observed)


@dataclass(frozen=True)
class ChiSquareResult:
    statistic: float
    per_cell: tuple[tuple[float, float, float], ...]  # (f_o, f_e, contribution)
    df: int
    critical_value: float

    @property
    def decision(self) -> str:
        return decide(self.statistic, self.critical_value)


def percentages(table: FrequencyTable) -> list[float]:
    """Each category as a percent of the total, half-up to 1 decimal."""
    if table.total == 0:
        raise EmptyTable("total count is zero")
    return [round_half_up(100.0 * c / table.total, 1) for c in table.observed]


def _normalize_counts(counts: dict) -> dict[int, int]:
    clean = {}
    for score, count in counts.items():
        score = int(score)
        if score not in LIKERT_SCORES:
            raise ValueError(f"likert score out of range: {score}")
        if count < 0:
            raise ValueError("counts must be nonnegative")
        if count:
            clean[score] = clean.get(score, 0) + int(count)
    return clean


def likert_mean(counts: dict) -> float:
    """Weighted mean of the 1..5 scores: sum(f*x) / sum(f)."""
    clean = _normalize_counts(counts)
    n = sum(clean.values())
    if n == 0:
        raise EmptyCounts()
    return sum(f * x for x, f in clean.items()) / n


def likert_sd(counts: dict) -> float:
    """Sample standard deviation over the expanded responses (n-1 divisor)."""
    clean = _normalize_counts(counts)
    n = sum(clean.values())
    if n < 2:
        raise InsufficientData("need at least 2 responses")
    sum_fx = sum(f * x for x, f in clean.items())
    sum_fx2 = sum(f * x * x for x, f in clean.items())
    variance = (sum_fx2 - sum_fx * sum_fx / n) / (n - 1)
    return math.sqrt(max(variance, 0.0))


def agreed_flag(mean: float, benchmark: float = AGREED_MEAN_BENCHMARK) -> bool:
    return mean > benchmark


def chi_square(observed: Sequence[float], expected: Sequence[float],
               critical_value: float = DEFAULT_CRITICAL_VALUE) -> ChiSquareResult:
    """Goodness-of-fit statistic: sum over cells of (f_o - f_e)^2 / f_e."""
    if len(observed) != len(expected):
        raise LengthMismatch("observed and expected differ in length")
    if len(observed) < 2:
        raise LengthMismatch("need at least 2 cells")
    if any(e <= 0 for e in expected):
        raise NonpositiveExpected()
    cells = tuple(
        (float(o), float(e), (o - e) ** 2 / e)
        for o, e in zip(observed, expected)
    )
    statistic = sum(c[2] for c in cells)
    # the observed/expected pair is treated as a 2-row table: (r-1)(c-1)
    df = (2 - 1) * (len(observed) - 1)
    return ChiSquareResult(statistic=statistic, per_cell=cells, df=df,
                           critical_value=critical_value)


def decide(statistic: float, critical_value: float) -> str:
    """Reject the null hypothesis only on strict exceedance."""
    if critical_value <= 0:
        raise ValueError("critical value must be positive")
    return "RejectH0" if statistic > critical_value else "AcceptH0"


# -- CSV ingestion ------------------------------------------------------------

def read_frequency_csv(text: str) -> FrequencyTable:
    """Header row of labels, one row of integer counts."""
    rows = [r for r in csv.reader(io.StringIO(text)) if r]
    if len(rows) < 2 or not rows[0]:
        raise EmptyTable("expected a header row and one row of counts")
    labels = tuple(c.strip() for c in rows[0])
    counts = tuple(int(c) for c in rows[1])
    return FrequencyTable(labels, counts)


def read_likert_csv(text: str) -> dict[int, int]:
    """Rows of ``score,count`` under a ``score,count`` header."""
    rows = [r for r in csv.reader(io.StringIO(text)) if r]
    if not rows or [c.strip().lower() for c in rows[0]] != ["score", "count"]:
        raise EmptyCounts("expected header 'score,count'")
    counts: dict[int, int] = {}
    for row in rows[1:]:
        counts[int(row[0])] = counts.get(int(row[0]), 0) + int(row[1])
    if not counts:
        raise EmptyCounts()
    return counts


# -- reporting ----------------------------------------------------------------

def frequency_report(table: FrequencyTable) -> dict:
    pct = percentages(table)
    return {
        "analysis": "frequency",
        "rows": [
            {"label": lbl, "frequency": obs, "percentage": p}
            for lbl, obs, p in zip(table.labels, table.observed, pct)
        ],
        "total": table.total,
    }


def likert_report(counts: dict) -> dict:
    mean = likert_mean(counts)
    sd = likert_sd(counts)
    return {
        "analysis": "likert",
        "mean": mean,
        "mean_2dp": round_half_up(mean, 2),
        "sd": sd,
        "sd_2dp": round_half_up(sd, 2),
        "agreed": agreed_flag(mean),
        "benchmark": AGREED_MEAN_BENCHMARK,
        "n": sum(int(v) for v in counts.values()),
    }


def chi_square_report(result: ChiSquareResult) -> dict:
    return {
        "analysis": "chi_square",
        "statistic": result.statistic,
        "per_cell": [
            {"observed": o, "expected": e, "contribution": c}
            for o, e, c in result.per_cell
        ],
        "df": result.df,
        "critical_value": result.critical_value,
        "decision": result.decision,
    }


def render_text(report: dict) -> str:
    """Plain-text table mirroring the report document."""
    lines: list[str] = []
    if report["analysis"] == "frequency":
        lines.append(f"{'Category':<20}{'Frequency':>10}{'Percentage':>12}")
        for row in report["rows"]:
            lines.append(f"{row['label']:<20}{row['frequency']:>10}"
                         f"{row['percentage']:>12.1f}")
        lines.append(f"{'Total':<20}{report['total']:>10}")
    elif report["analysis"] == "likert":
        lines.append(f"n = {report['n']}")
        lines.append(f"mean = {report['mean_2dp']:.2f}")
        lines.append(f"sd = {report['sd_2dp']:.2f}")
        lines.append(f"agreed (mean > {report['benchmark']:.2f}): "
                     f"{'yes' if report['agreed'] else 'no'}")
    elif report["analysis"] == "chi_square":
        lines.append(f"{'Observed':>10}{'Expected':>10}{'Contribution':>14}")
        for cell in report["per_cell"]:
            lines.append(f"{cell['observed']:>10.4g}{cell['expected']:>10.4g}"
                         f"{cell['contribution']:>14.4f}")
        lines.append(f"X² = {round_half_up(report['statistic'], 2):g}")
        lines.append(f"df = {report['df']}")
        lines.append(f"critical value = {report['critical_value']:g}")
        lines.append("decision: " + ("Reject H0" if report["decision"] == "RejectH0"
                                     else "Accept H0"))
    return "\n".join(lines)


def to_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True)
