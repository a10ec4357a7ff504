"""Hypothesis tests, p-values, decisions and confidence intervals.

Decisions are reported as ``Reject`` or ``FailToReject``; a test never
"accepts" the null hypothesis.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import descriptive
from .distributions import (
    SAMPLING_TABLE_MIN_NP,
    Binomial,
    ChiSquare,
    Distribution,
    FisherF,
    Normal,
    StudentT,
)
from .errors import DataError, DegenerateError

STANDARD_NORMAL = Normal(0.0, 1.0)


class Tail(enum.Enum):
    LEFT = "left"
    RIGHT = "right"
    TWO = "two"

    @classmethod
    def parse(cls, text: "str | Tail") -> "Tail":
        if isinstance(text, Tail):
            return text
        aliases = {"left": cls.LEFT, "less": cls.LEFT, "right": cls.RIGHT, "greater": cls.RIGHT,
                   "two": cls.TWO, "two-sided": cls.TWO, "two_sided": cls.TWO, "both": cls.TWO}
        try:
            return aliases[text.strip().lower()]
        except KeyError:
            raise ValueError(f"unknown tail {text!r}") from None


class Decision(enum.Enum):
    REJECT = "Reject"
    FAIL_TO_REJECT = "FailToReject"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class TestResult:
    name: str
    statistic: float
    reference: Distribution
    tail: Tail
    p_value: float
    alpha: float
    decision: Decision

    __test__ = False  # keep pytest from collecting this class

    @property
    def df(self) -> str:
        return str(self.reference)

    @property
    def rejected(self) -> bool:
        return self.decision is Decision.REJECT


@dataclass(frozen=True)
class ConfidenceInterval:
    lower: float
    upper: float
    level: float

    def __post_init__(self):
        if not 0 < self.level < 1:
            raise ValueError("confidence level must lie in (0, 1)")
        if self.lower > self.upper:
            raise ValueError("lower bound exceeds upper bound")

    def __contains__(self, value: float) -> bool:
        return self.lower <= value <= self.upper

    @property
    def width(self) -> float:
        return self.upper - self.lower

    @classmethod
    def from_half_width(cls, estimate: float, half_width: float, level: float) -> "ConfidenceInterval":
        return cls(estimate - half_width, estimate + half_width, level)


@dataclass(frozen=True)
class ErrorTypeTable:
    """Probabilities of the two error types for a test at level ``alpha``.

    ``beta`` and ``power`` stay ``None`` unless a power figure is supplied;
    type II risk depends on an alternative the caller must specify.
    """

    alpha: float
    power: float | None = None

    def __post_init__(self):
        _check_alpha(self.alpha)
        if self.power is not None and not 0 < self.power < 1:
            raise ValueError("power must lie in (0, 1)")

    @property
    def beta(self) -> float | None:
        return None if self.power is None else 1.0 - self.power

    @property
    def beta_description(self) -> str:
        return "depends on power" if self.power is None else f"{self.beta:.4f}"


def _check_alpha(alpha: float) -> None:
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")


def decide(p: float, alpha: float) -> Decision:
    return Decision.REJECT if p < alpha else Decision.FAIL_TO_REJECT


def p_value(statistic: float, reference: Distribution, tail: Tail | str) -> float:
    """Probability of a statistic at least as extreme as the one observed.

    Two-tailed p doubles the smaller tail, which for references centred at 0
    equals twice the area beyond ``|statistic|``. Capped at 1.
    """
    tail = Tail.parse(tail)
    if isinstance(reference, Binomial):
        raise TypeError("use exact_binomial_p_value for a binomial reference")
    if tail is Tail.RIGHT:
        return reference.sf(statistic)
    if tail is Tail.LEFT:
        return reference.cdf(statistic)
    if reference.symmetric:
        center = reference.mu if isinstance(reference, Normal) else 0.0
        dev = abs(statistic - center)
        return min(1.0, 2.0 * reference.sf(center + dev))
    return min(1.0, 2.0 * min(reference.cdf(statistic), reference.sf(statistic)))


def exact_binomial_p_value(k: int, n: int, p0: float, tail: Tail | str) -> float:
    tail = Tail.parse(tail)
    ref = Binomial(n, p0)
    upper = ref.sf(k - 1)  # P(X >= k)
    lower = ref.cdf(k)  # P(X <= k)
    if tail is Tail.RIGHT:
        return upper
    if tail is Tail.LEFT:
        return lower
    return min(1.0, 2.0 * min(lower, upper))


def _result(name, statistic, reference, tail, alpha, p=None) -> TestResult:
    _check_alpha(alpha)
    tail = Tail.parse(tail)
    if p is None:
        p = p_value(statistic, reference, tail)
    p = min(1.0, max(0.0, p))
    return TestResult(name, float(statistic), reference, tail, p, alpha, decide(p, alpha))


def z_test_mean(
    mean: float,
    n: int,
    mu0: float,
    sigma: float,
    tail: Tail | str = Tail.TWO,
    alpha: float = 0.05,
    population_size: int | None = None,
) -> TestResult:
    """z test for a mean with known population sd.

    With ``population_size`` (sampling without replacement) the standard error
    is scaled by ``sqrt((N - n) / (N - 1))``.
    """
    if not sigma > 0:
        raise DataError("sigma must be positive")
    if n < 1:
        raise DataError("n must be >= 1")
    se = sigma / math.sqrt(n)
    if population_size is not None:
        N = population_size
        if N < n:
            raise DataError(f"population size {N} is smaller than the sample size {n}")
        if N == n:
            raise DegenerateError("sample is the whole population: the standard error is zero")
        se *= math.sqrt((N - n) / (N - 1))
    return _result("z test (mean)", (mean - mu0) / se, STANDARD_NORMAL, tail, alpha)


def t_test_mean(sample: Sequence[float], mu0: float, tail: Tail | str = Tail.TWO, alpha: float = 0.05) -> TestResult:
    x = np.asarray(sample, dtype=float)
    if x.size < 2:
        raise DataError("t test needs at least 2 observations")
    s = descriptive.sd(x)
    if s == 0:
        raise DegenerateError("sample sd is zero; t statistic undefined")
    stat = (descriptive.mean(x) - mu0) / (s / math.sqrt(x.size))
    return _result("t test (mean)", stat, StudentT(x.size - 1), tail, alpha)


def chi2_test_variance(
    sample: Sequence[float], sigma0_sq: float, tail: Tail | str = Tail.TWO, alpha: float = 0.05
) -> TestResult:
    x = np.asarray(sample, dtype=float)
    if x.size < 2:
        raise DataError("variance test needs at least 2 observations")
    if not sigma0_sq > 0:
        raise DataError("hypothesized variance must be positive")
    stat = (x.size - 1) * descriptive.variance(x) / sigma0_sq
    return _result("chi-square test (variance)", stat, ChiSquare(x.size - 1), tail, alpha)


def f_test_variance_ratio(
    sample_a: Sequence[float], sample_b: Sequence[float], tail: Tail | str = Tail.TWO, alpha: float = 0.05
) -> TestResult:
    a, b = np.asarray(sample_a, dtype=float), np.asarray(sample_b, dtype=float)
    if a.size < 2 or b.size < 2:
        raise DataError("each sample needs at least 2 observations")
    vb = descriptive.variance(b)
    if vb == 0:
        raise DegenerateError("second sample has zero variance")
    stat = descriptive.variance(a) / vb
    return _result("F test (variance ratio)", stat, FisherF(a.size - 1, b.size - 1), tail, alpha)


def proportion_test(k: int, n: int, p0: float, tail: Tail | str = Tail.TWO, alpha: float = 0.05) -> TestResult:
    """Test a proportion against ``p0``.

    Large samples (n > 20, n*p0 > 5) use ``(p_hat - p0) / sqrt(p_hat(1 - p_hat)/n)``
    against N(0, 1); otherwise, or when ``p_hat`` is 0 or 1, the exact
    binomial tail under B(n, p0) is used and the statistic is ``k``.
    """
    if int(k) != k or int(n) != n or not 0 <= k <= n or n < 1:
        raise DataError(f"need integers 0 <= k <= n with n >= 1, got k={k}, n={n}")
    if not 0 < p0 < 1:
        raise DataError("p0 must lie in (0, 1)")
    p_hat = k / n
    se = math.sqrt(p_hat * (1 - p_hat) / n)
    if n > 20 and n * p0 > SAMPLING_TABLE_MIN_NP and se > 0:
        return _result("z test (proportion)", (p_hat - p0) / se, STANDARD_NORMAL, tail, alpha)
    p = exact_binomial_p_value(int(k), int(n), p0, tail)
    return _result("exact binomial test", float(k), Binomial(int(n), p0), tail, alpha, p=p)


def ci_mean(
    mean: float,
    n: int,
    level: float = 0.95,
    sigma: float | None = None,
    sd: float | None = None,
) -> ConfidenceInterval:
    """Interval for a mean: z-based with known ``sigma``, else t(n-1) with sample ``sd``."""
    if not 0 < level < 1:
        raise ValueError("confidence level must lie in (0, 1)")
    alpha = 1 - level
    if sigma is not None:
        if not sigma > 0:
            raise DataError("sigma must be positive")
        half = STANDARD_NORMAL.quantile(1 - alpha / 2) * sigma / math.sqrt(n)
    else:
        if sd is None:
            raise DataError("give either sigma (known) or the sample sd")
        if n < 2:
            raise DataError("t interval needs n >= 2")
        half = StudentT(n - 1).quantile(1 - alpha / 2) * sd / math.sqrt(n) if sd > 0 else 0.0
    return ConfidenceInterval.from_half_width(mean, half, level)


def ci_mean_sample(sample: Sequence[float], level: float = 0.95, sigma: float | None = None) -> ConfidenceInterval:
    x = np.asarray(sample, dtype=float)
    sd = descriptive.sd(x) if x.size >= 2 else None
    return ci_mean(descriptive.mean(x), x.size, level, sigma=sigma, sd=sd)


def ci_proportion(k: int, n: int, level: float = 0.95) -> ConfidenceInterval:
    """Normal-approximation interval for a proportion, clamped to [0, 1]."""
    if n < 1 or not 0 <= k <= n:
        raise DataError(f"need 0 <= k <= n with n >= 1, got k={k}, n={n}")
    if not 0 < level < 1:
        raise ValueError("confidence level must lie in (0, 1)")
    p_hat = k / n
    half = STANDARD_NORMAL.quantile(1 - (1 - level) / 2) * math.sqrt(p_hat * (1 - p_hat) / n)
    return ConfidenceInterval(max(0.0, p_hat - half), min(1.0, p_hat + half), level)


def z_test_power(effect: float, sigma: float, n: int, alpha: float = 0.05, tail: Tail | str = Tail.TWO) -> float:
    """Power of the z test when the true mean differs from ``mu0`` by ``effect``."""
    _check_alpha(alpha)
    tail = Tail.parse(tail)
    shift = effect / (sigma / math.sqrt(n))
    z = STANDARD_NORMAL
    if tail is Tail.RIGHT:
        return z.sf(z.quantile(1 - alpha) - shift)
    if tail is Tail.LEFT:
        return z.cdf(z.quantile(alpha) - shift)
    c = z.quantile(1 - alpha / 2)
    return z.sf(c - shift) + z.cdf(-c - shift)


def error_types(alpha: float, power: float | None = None) -> ErrorTypeTable:
    return ErrorTypeTable(alpha, power)
