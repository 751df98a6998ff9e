"""Statistical analysis functions.

Wilson score intervals for compilation and detection rates, Pearson
chi-square tests (Yates-corrected by default on 2×2 tables) with p-values
from the regularized upper incomplete gamma, and Cramér's V effect sizes.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import special, stats

logger = logging.getLogger(__name__)

__all__ = [
    "Proportion",
    "ContingencyTable",
    "ChiSquareResult",
    "wilson_interval",
    "chi_square",
    "chi_square_p_value",
    "cramers_v",
    "proportion_table",
    "proportion_frame",
]

Z_95 = 1.959964

MIN_EXPECTED = 5.0


class StatisticsError(Exception):
    """Base class for statistics errors."""


class InvalidConfidence(StatisticsError):
    """Confidence level outside (0, 1)."""


class DegenerateTable(StatisticsError):
    """Table too small or with an empty row or column."""


class YatesOnNon2x2(StatisticsError):
    """Continuity correction requested for a table that is not 2×2."""


@dataclass(frozen=True)
class Proportion:
    successes: int
    trials: int

    def __post_init__(self):
        if self.trials < 1:
            raise StatisticsError(f"trials must be positive, got {self.trials}")
        if not 0 <= self.successes <= self.trials:
            raise StatisticsError(f"successes must be in 0..{self.trials}, got {self.successes}")

    @property
    def rate(self) -> float:
        return self.successes / self.trials

    def interval(self, confidence: float = 0.95) -> Tuple[float, float]:
        return wilson_interval(self, confidence)


def _z_for(confidence: float) -> float:
    if not 0.0 < confidence < 1.0:
        raise InvalidConfidence(f"confidence must be in (0, 1), got {confidence}")
    if math.isclose(confidence, 0.95):
        return Z_95
    return float(stats.norm.ppf(1.0 - (1.0 - confidence) / 2.0))


def wilson_interval(p: Proportion, confidence: float = 0.95) -> Tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    z = _z_for(confidence)
    n = p.trials
    phat = p.rate
    z2 = z * z
    denominator = 1.0 + z2 / n
    center = (phat + z2 / (2 * n)) / denominator
    half_width = z * math.sqrt(phat * (1 - phat) / n + z2 / (4 * n * n)) / denominator
    lower = 0.0 if p.successes == 0 else max(0.0, center - half_width)
    upper = 1.0 if p.successes == n else min(1.0, center + half_width)
    return lower, upper


@dataclass(frozen=True)
class ContingencyTable:
    """r×c observed counts with row and column labels."""
    rows: Tuple[str, ...]
    cols: Tuple[str, ...]
    counts: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.counts) != len(self.rows) or any(len(row) != len(self.cols) for row in self.counts):
            raise StatisticsError("counts shape does not match row/column labels")
        if any(value < 0 for row in self.counts for value in row):
            raise StatisticsError("counts must be non-negative")

    @classmethod
    def from_counts(cls, counts: Sequence[Sequence[int]], rows: Optional[Sequence[str]] = None,
                    cols: Optional[Sequence[str]] = None) -> "ContingencyTable":
        counts = tuple(tuple(int(v) for v in row) for row in counts)
        rows = tuple(rows) if rows else tuple(f"r{i + 1}" for i in range(len(counts)))
        width = len(counts[0]) if counts else 0
        cols = tuple(cols) if cols else tuple(f"c{j + 1}" for j in range(width))
        return cls(rows=rows, cols=cols, counts=counts)

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self.rows), len(self.cols)

    @property
    def total(self) -> int:
        return sum(sum(row) for row in self.counts)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.counts, dtype=float)

    def expected(self) -> np.ndarray:
        observed = self.as_array()
        return np.outer(observed.sum(axis=1), observed.sum(axis=0)) / observed.sum()

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(list(self.counts), index=list(self.rows), columns=list(self.cols))


@dataclass(frozen=True)
class ChiSquareResult:
    statistic: float
    df: int
    p_value: float
    cramers_v: float
    yates_applied: bool
    n: int
    min_expected: float

    @property
    def low_expected(self) -> bool:
        return self.min_expected < MIN_EXPECTED

    def footnote(self) -> str:
        p_text = "p<0.001" if self.p_value < 0.001 else f"p={self.p_value:.3f}"
        correction = ", Yates-corrected" if self.yates_applied else ""
        return (f"χ²={self.statistic:.2f}, df={self.df}, {p_text}, "
                f"Cramér's V={self.cramers_v:.3f}{correction}")

    def to_dict(self) -> dict:
        return {
            "statistic": self.statistic,
            "df": self.df,
            "p_value": self.p_value,
            "cramers_v": self.cramers_v,
            "yates_applied": self.yates_applied,
            "n": self.n,
            "min_expected": self.min_expected,
        }


def chi_square_p_value(statistic: float, df: int) -> float:
    """Upper-tail chi-square probability Q(df/2, x/2)."""
    if statistic < 0:
        raise StatisticsError(f"statistic must be non-negative, got {statistic}")
    if df < 1:
        raise StatisticsError(f"df must be positive, got {df}")
    if statistic == 0:
        return 1.0
    return float(special.gammaincc(df / 2.0, statistic / 2.0))


def cramers_v(statistic: float, n: int, r: int, c: int) -> float:
    k = min(r - 1, c - 1)
    if n <= 0 or k <= 0:
        return 0.0
    return min(1.0, math.sqrt(statistic / (n * k)))


def chi_square(table: ContingencyTable, yates: Optional[bool] = None) -> ChiSquareResult:
    """Pearson chi-square test of independence.

    ``yates=None`` applies the continuity correction exactly when the table
    is 2×2.
    """
    r, c = table.shape
    if r < 2 or c < 2:
        raise DegenerateTable(f"chi-square needs at least 2 rows and 2 columns, got {r}×{c}")
    is_2x2 = (r, c) == (2, 2)
    if yates is None:
        yates = is_2x2
    elif yates and not is_2x2:
        raise YatesOnNon2x2(f"Yates correction applies to 2×2 tables only, got {r}×{c}")

    observed = table.as_array()
    if (observed.sum(axis=1) == 0).any() or (observed.sum(axis=0) == 0).any():
        raise DegenerateTable("table has an empty row or column")

    expected = table.expected()
    deviation = np.abs(observed - expected)
    if yates:
        deviation = np.maximum(deviation - 0.5, 0.0)
    statistic = float((deviation ** 2 / expected).sum())
    min_expected = float(expected.min())
    if min_expected < MIN_EXPECTED:
        logger.warning("Chi-square assumption check: minimum expected count %.2f < %.0f",
                       min_expected, MIN_EXPECTED)

    df = (r - 1) * (c - 1)
    n = table.total
    return ChiSquareResult(
        statistic=statistic,
        df=df,
        p_value=chi_square_p_value(statistic, df),
        cramers_v=cramers_v(statistic, n, r, c),
        yates_applied=bool(yates),
        n=n,
        min_expected=min_expected,
    )


def proportion_table(labels: Sequence[str], successes: Sequence[int],
                     trials: Sequence[int]) -> ContingencyTable:
    """r×2 success/failure table from per-group successes and trials."""
    if not (len(labels) == len(successes) == len(trials)):
        raise StatisticsError("labels, successes and trials must have equal length")
    counts = []
    for label, s, t in zip(labels, successes, trials):
        if not 0 <= s <= t:
            raise StatisticsError(f"{label}: successes {s} outside 0..{t}")
        counts.append((s, t - s))
    return ContingencyTable.from_counts(counts, rows=labels, cols=("success", "failure"))


def proportion_frame(labels: Sequence[str], successes: Sequence[int], trials: Sequence[int],
                     confidence: float = 0.95) -> pd.DataFrame:
    """Per-group rate with Wilson bounds as a DataFrame indexed by label."""
    rows: List[dict] = []
    for label, s, t in zip(labels, successes, trials):
        lower, upper = wilson_interval(Proportion(s, t), confidence)
        rows.append({"group": label, "successes": s, "trials": t,
                     "rate": s / t, "lower": lower, "upper": upper})
    columns = ["group", "successes", "trials", "rate", "lower", "upper"]
    return pd.DataFrame(rows, columns=columns).set_index("group")
