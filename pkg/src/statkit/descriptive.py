"""Central tendency, variability, position and boxplot outlier fences."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .dataset import Column
from .errors import DataError


def _finite_array(values: Sequence[float], name: str = "values") -> np.ndarray:
    arr = np.asarray(values, dtype=float).ravel()
    if arr.size == 0:
        raise DataError(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        raise DataError(f"{name} contains non-finite numbers")
    return arr


def mean(values: Sequence[float]) -> float:
    arr = _finite_array(values)
    return math.fsum(arr) / arr.size


def median(values: Sequence[float]) -> float:
    x = np.sort(_finite_array(values))
    n = x.size
    if n % 2:
        return float(x[n // 2])
    return float((x[n // 2 - 1] + x[n // 2]) / 2)


def modes(values: Sequence) -> list:
    """Most frequent value(s), ascending. Empty when every value is equally frequent."""
    values = list(values)
    if not values:
        raise DataError("values is empty")
    counts = Counter(values)
    top = max(counts.values())
    if len(counts) > 1 and all(c == top for c in counts.values()):
        return []
    return sorted(v for v, c in counts.items() if c == top)


def percentile(values: Sequence[float], p: float) -> float:
    """Percentile of order ``p``.

    With the data sorted (1-based) and ``i = n*p/100``: an integral ``i`` gives
    the midpoint of ``X_i`` and ``X_(i+1)``; otherwise ``X_(int(i)+1)``.
    """
    if not 0 < p < 100:
        raise DataError(f"percentile order must lie in (0, 100), got {p}")
    x = np.sort(_finite_array(values))
    n = x.size
    i = n * Fraction(repr(float(p))) / 100  # decimal reading of p, so 12.5 or 33.3 behave as written
    if i.denominator == 1:
        i = int(i)
        return float((x[i - 1] + x[i]) / 2)
    return float(x[math.floor(i)])


def variance(values: Sequence[float], mode: str = "sample") -> float:
    arr = _finite_array(values)
    n = arr.size
    if mode == "sample":
        if n < 2:
            raise DataError("sample variance needs at least 2 values")
        denom = n - 1
    elif mode == "population":
        denom = n
    else:
        raise ValueError(f"mode must be 'sample' or 'population', got {mode!r}")
    m = math.fsum(arr) / n
    return math.fsum((arr - m) ** 2) / denom


def sd(values: Sequence[float], mode: str = "sample") -> float:
    return math.sqrt(variance(values, mode))


@dataclass(frozen=True)
class SummaryStats:
    n: int
    mean: float
    median: float
    modes: list
    variance_sample: float
    variance_population: float
    sd_sample: float
    sd_population: float
    min: float
    max: float
    range: float
    q1: float
    q3: float
    iqr: float

    @property
    def five_numbers(self) -> tuple[float, float, float, float, float]:
        return self.min, self.q1, self.median, self.q3, self.max


def _numeric_column(col: Column, min_n: int) -> np.ndarray:
    if not col.kind.numeric:
        raise DataError(f"column {col.name!r} is {col.kind.value}; a numeric column is required")
    arr = col.numeric()
    if arr.size < min_n:
        raise DataError(f"column {col.name!r} needs at least {min_n} non-missing values, has {arr.size}")
    return arr


def summarize_values(values: Sequence[float]) -> SummaryStats:
    arr = _finite_array(values)
    if arr.size < 2:
        raise DataError("summary needs at least 2 values")
    vs, vp = variance(arr, "sample"), variance(arr, "population")
    q1, q3 = percentile(arr, 25), percentile(arr, 75)
    lo, hi = float(arr.min()), float(arr.max())
    return SummaryStats(
        n=int(arr.size),
        mean=mean(arr),
        median=median(arr),
        modes=modes(arr.tolist()),
        variance_sample=vs,
        variance_population=vp,
        sd_sample=math.sqrt(vs),
        sd_population=math.sqrt(vp),
        min=lo,
        max=hi,
        range=hi - lo,
        q1=q1,
        q3=q3,
        iqr=q3 - q1,
    )


def summarize(col: Column) -> SummaryStats:
    return summarize_values(_numeric_column(col, 2))


@dataclass(frozen=True)
class OutlierReport:
    inner_fences: tuple[float, float]
    outer_fences: tuple[float, float]
    suspected: list[float]
    extreme: list[float]


def classify_outlier_values(values: Sequence[float]) -> OutlierReport:
    """Fences at 1.5 and 3 IQR beyond the quartiles.

    Values strictly beyond the outer fences are extreme; values strictly beyond
    an inner fence but not an outer one are suspected.
    """
    arr = _finite_array(values)
    if arr.size < 4:
        raise DataError("outlier classification needs at least 4 values")
    q1, q3 = percentile(arr, 25), percentile(arr, 75)
    iqr = q3 - q1
    inner = (q1 - 1.5 * iqr, q3 + 1.5 * iqr)
    outer = (q1 - 3 * iqr, q3 + 3 * iqr)
    suspected, extreme = [], []
    for v in sorted(arr.tolist()):
        if v < outer[0] or v > outer[1]:
            extreme.append(v)
        elif v < inner[0] or v > inner[1]:
            suspected.append(v)
    return OutlierReport(inner, outer, suspected, extreme)


def classify_outliers(col: Column) -> OutlierReport:
    return classify_outlier_values(_numeric_column(col, 4))
