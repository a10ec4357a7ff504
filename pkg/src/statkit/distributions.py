"""Normal, chi-square, Student's t, Snedecor's F and binomial distributions.

Continuous CDFs other than the normal are obtained by adaptive quadrature of
the densities themselves; the upper tail is integrated separately (after the
substitution t = x/u) so small p-values keep their relative accuracy.
Quantiles are found by bracketing and bisection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import DataError
from .special import erfc, integrate, log_gamma

# Normal approximation to the binomial is deemed adequate when n > 20 and n*p
# exceeds one of these. The density-level rule uses 7, the sampling table 5.
BINOMIAL_NORMAL_MIN_N = 20
BINOMIAL_NORMAL_MIN_NP = 7.0
SAMPLING_TABLE_MIN_NP = 5.0

_QUAD_TOL = 1e-13
_BISECT_MAX_ITER = 200


class _Continuous:
    """Shared quantile search for the continuous families."""

    symmetric = False
    lower_bound = -math.inf

    def _bracket_scale(self) -> tuple[float, float]:
        raise NotImplementedError

    def quantile(self, q: float) -> float:
        """Smallest x with cdf(x) >= q, to bisection precision."""
        q = float(q)
        if not 0 < q < 1:
            raise ValueError(f"quantile level must lie in (0, 1), got {q}")
        upper_side = q > 0.5
        target = 1.0 - q if upper_side else q

        def below(x):  # True while x is left of the quantile
            return self.sf(x) > target if upper_side else self.cdf(x) < target

        center, scale = self._bracket_scale()
        lo, hi = center - scale, center + scale
        if self.lower_bound > -math.inf:
            lo = max(lo, self.lower_bound)
        while below(hi):
            hi = center + 2 * (hi - center)
        while lo > self.lower_bound and not below(lo):
            lo = center - 2 * (center - lo)
            if self.lower_bound > -math.inf and lo <= self.lower_bound:
                lo = self.lower_bound
        for _ in range(_BISECT_MAX_ITER):
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            if below(mid):
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)


@dataclass(frozen=True)
class Normal(_Continuous):
    mu: float = 0.0
    sigma: float = 1.0

    symmetric = True

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("Normal needs sigma > 0")

    def __str__(self):
        return f"N({self.mu:g}, {self.sigma:g})"

    def pdf(self, x):
        z = (np.asarray(x, dtype=float) - self.mu) / self.sigma
        out = np.exp(-0.5 * z * z) / (self.sigma * math.sqrt(2 * math.pi))
        return float(out) if out.ndim == 0 else out

    def cdf(self, x: float) -> float:
        return 0.5 * erfc(-(float(x) - self.mu) / (self.sigma * math.sqrt(2)))

    def sf(self, x: float) -> float:
        return 0.5 * erfc((float(x) - self.mu) / (self.sigma * math.sqrt(2)))

    def moments(self) -> tuple[float, float]:
        return self.mu, self.sigma**2

    def _bracket_scale(self):
        return self.mu, 8 * self.sigma


class _QuadratureBacked(_Continuous):
    """Families whose CDF is computed from a density ``c * t^(a-1) * g(t)`` on t > 0."""

    lower_bound = 0.0

    # subclasses provide: _a (power exponent), _log_c, _log_g(t), _split
    def _log_pdf(self, t: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            out = self._log_c + (self._a - 1) * np.log(t) + self._log_g(t)
        return np.where(t > 0, out, -np.inf)

    def pdf(self, x):
        arr = np.asarray(x, dtype=float)
        out = np.exp(self._log_pdf(arr))
        return float(out) if out.ndim == 0 else out

    def _lower(self, x: float) -> float:
        a = self._a
        if a < 1:
            # t = u^(1/a) removes the t^(a-1) singularity at the origin
            def h(u):
                t = u ** (1.0 / a)
                return np.exp(self._log_c + self._log_g(t)) / a

            return integrate(h, 0.0, x**a, _QUAD_TOL, _QUAD_TOL)[0]
        return integrate(self.pdf, 0.0, x, _QUAD_TOL, _QUAD_TOL)[0]

    def _upper(self, x: float) -> float:
        def h(u):
            with np.errstate(over="ignore", invalid="ignore"):
                t = x / u
                out = np.exp(self._log_pdf(t)) * x / (u * u)
            return np.nan_to_num(out, nan=0.0, posinf=0.0)

        return integrate(h, 0.0, 1.0, 0.0, _QUAD_TOL)[0]

    def cdf(self, x: float) -> float:
        x = float(x)
        if x <= 0:
            return 0.0
        if x <= self._split:
            return min(1.0, self._lower(x))
        return max(0.0, 1.0 - self._upper(x))

    def sf(self, x: float) -> float:
        x = float(x)
        if x <= 0:
            return 1.0
        if x <= self._split:
            return max(0.0, 1.0 - self._lower(x))
        return min(1.0, self._upper(x))


@dataclass(frozen=True)
class ChiSquare(_QuadratureBacked):
    df: float

    def __post_init__(self):
        if not self.df > 0:
            raise ValueError("ChiSquare needs df > 0")

    def __str__(self):
        return f"chi2({self.df:g})"

    @property
    def _a(self):
        return self.df / 2

    @property
    def _log_c(self):
        return -(self.df / 2) * math.log(2) - log_gamma(self.df / 2)

    def _log_g(self, t):
        return -0.5 * t

    @property
    def _split(self):
        return self.df

    def moments(self):
        return float(self.df), 2.0 * self.df

    def _bracket_scale(self):
        return float(self.df), 4 * math.sqrt(2 * self.df) + 1


@dataclass(frozen=True)
class FisherF(_QuadratureBacked):
    dfn: float
    dfd: float

    def __post_init__(self):
        if not (self.dfn > 0 and self.dfd > 0):
            raise ValueError("FisherF needs positive degrees of freedom")

    def __str__(self):
        return f"F({self.dfn:g}, {self.dfd:g})"

    @property
    def _a(self):
        return self.dfn / 2

    @property
    def _log_c(self):
        m, n = self.dfn, self.dfd
        return log_gamma((m + n) / 2) - log_gamma(m / 2) - log_gamma(n / 2) + (m / 2) * math.log(m / n)

    def _log_g(self, t):
        m, n = self.dfn, self.dfd
        return -((m + n) / 2) * np.log1p(m * t / n)

    _split = 1.0

    def moments(self):
        m, n = self.dfn, self.dfd
        if not n > 4:
            raise ValueError("F variance needs dfd > 4")
        mean = n / (n - 2)
        var = 2 * n**2 * (m + n - 2) / (m * (n - 2) ** 2 * (n - 4))
        return mean, var

    def mean(self) -> float:
        if not self.dfd > 2:
            raise ValueError("F mean needs dfd > 2")
        return self.dfd / (self.dfd - 2)

    def _bracket_scale(self):
        return 1.0, 4.0


@dataclass(frozen=True)
class StudentT(_Continuous):
    df: float

    symmetric = True

    def __post_init__(self):
        if not self.df > 0:
            raise ValueError("StudentT needs df > 0")

    def __str__(self):
        return f"t({self.df:g})"

    @property
    def _log_c(self):
        n = self.df
        return log_gamma((n + 1) / 2) - log_gamma(n / 2) - 0.5 * math.log(n * math.pi)

    def pdf(self, x):
        arr = np.asarray(x, dtype=float)
        n = self.df
        out = np.exp(self._log_c - 0.5 * (n + 1) * np.log1p(arr * arr / n))
        return float(out) if out.ndim == 0 else out

    def _tail(self, x: float) -> float:
        # P(T > x) for x >= 0
        if x <= 1.0:
            return 0.5 - integrate(self.pdf, 0.0, x, _QUAD_TOL, _QUAD_TOL)[0]

        def h(u):
            with np.errstate(over="ignore", invalid="ignore"):
                out = self.pdf(x / u) * x / (u * u)
            return np.nan_to_num(out, nan=0.0, posinf=0.0)

        return integrate(h, 0.0, 1.0, 0.0, _QUAD_TOL)[0]

    def cdf(self, x: float) -> float:
        x = float(x)
        if x == 0:
            return 0.5
        return 1.0 - self._tail(x) if x > 0 else self._tail(-x)

    def sf(self, x: float) -> float:
        return self.cdf(-float(x))

    def moments(self):
        if not self.df > 2:
            raise ValueError("t variance needs df > 2")
        return 0.0, self.df / (self.df - 2)

    def _bracket_scale(self):
        return 0.0, 8.0


@dataclass(frozen=True)
class Binomial:
    n: int
    p: float

    symmetric = False

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 0:
            raise ValueError("Binomial needs an integer n >= 0")
        if not 0 <= self.p <= 1:
            raise ValueError("Binomial needs p in [0, 1]")

    def __str__(self):
        return f"B({self.n}, {self.p:g})"

    def pmf_all(self) -> np.ndarray:
        """Probabilities of 0..n successes."""
        n, p = int(self.n), self.p
        ks = range(n + 1)
        if p in (0.0, 1.0):
            out = np.zeros(n + 1)
            out[0 if p == 0 else n] = 1.0
            return out
        try:
            return np.array([math.comb(n, k) * p**k * (1 - p) ** (n - k) for k in ks])
        except OverflowError:
            lp, lq = math.log(p), math.log1p(-p)
            lgn = log_gamma(n + 1)
            return np.array(
                [math.exp(lgn - log_gamma(k + 1) - log_gamma(n - k + 1) + k * lp + (n - k) * lq) for k in ks]
            )

    def pmf(self, k) -> float:
        if float(k) != int(k):
            raise ValueError(f"binomial pmf needs an integer, got {k}")
        k = int(k)
        if not 0 <= k <= self.n:
            raise ValueError(f"{k} outside the support 0..{self.n}")
        return float(self.pmf_all()[k])

    pdf = pmf

    def cdf(self, x: float) -> float:
        k = math.floor(x)
        if k < 0:
            return 0.0
        if k >= self.n:
            return 1.0
        return min(1.0, math.fsum(self.pmf_all()[: k + 1]))

    def sf(self, x: float) -> float:
        """P(X > x)."""
        k = math.floor(x)
        if k < 0:
            return 1.0
        if k >= self.n:
            return 0.0
        return min(1.0, math.fsum(self.pmf_all()[k + 1 :]))

    def quantile(self, q: float) -> int:
        if not 0 < q < 1:
            raise ValueError(f"quantile level must lie in (0, 1), got {q}")
        cum = 0.0
        for k, pk in enumerate(self.pmf_all()):
            cum += pk
            if cum >= q - 1e-12:
                return k
        return int(self.n)

    def moments(self):
        return self.n * self.p, self.n * self.p * (1 - self.p)


Distribution = Union[Normal, ChiSquare, StudentT, FisherF, Binomial]


def _support_check(d: Distribution, x: float) -> None:
    if isinstance(d, (ChiSquare, FisherF)) and not x > 0:
        raise ValueError(f"{d} density is defined for x > 0, got {x}")


def pdf(d: Distribution, x: float) -> float:
    """Density at ``x`` (probability mass for the binomial)."""
    _support_check(d, x)
    return float(d.pdf(x))


def cdf(d: Distribution, x: float) -> float:
    return d.cdf(x)


def sf(d: Distribution, x: float) -> float:
    return d.sf(x)


def quantile(d: Distribution, q: float) -> float:
    return d.quantile(q)


def moments(d: Distribution) -> tuple[float, float]:
    """``(mean, variance)``; raises ``ValueError`` when either is undefined."""
    return d.moments()


def empirical_rule(d: Normal) -> tuple[float, float, float]:
    """Probability mass within one, two and three standard deviations of the mean."""
    if not isinstance(d, Normal):
        raise TypeError("empirical_rule needs a Normal distribution")
    return tuple(d.cdf(d.mu + k * d.sigma) - d.cdf(d.mu - k * d.sigma) for k in (1, 2, 3))


def normal_approximation_ok(n: int, p: float, min_np: float = BINOMIAL_NORMAL_MIN_NP) -> bool:
    return n > BINOMIAL_NORMAL_MIN_N and n * p > min_np


def normal_approximation(d: Binomial) -> Normal:
    mean, var = d.moments()
    return Normal(mean, math.sqrt(var))


# ---------------------------------------------------------------- CLT simulation


@dataclass(frozen=True)
class CltReport:
    population: str
    n: int
    replications: int
    mean_of_means: float
    sd_of_means: float
    skewness: float
    population_mean: float
    population_sd: float

    @property
    def expected_sd(self) -> float:
        """sigma / sqrt(n), the standard error the theorem predicts."""
        return self.population_sd / math.sqrt(self.n)


def clt_simulate(
    population: Sequence[float] | Normal | Binomial,
    n: int,
    replications: int,
    seed: int,
) -> CltReport:
    """Draw ``replications`` samples of size ``n`` and summarize their means.

    A finite population is resampled with replacement; a ``Normal`` or
    ``Binomial`` population is sampled directly. Results depend only on ``seed``.
    """
    if n < 1 or replications < 1:
        raise ValueError("n and replications must be >= 1")
    rng = np.random.default_rng(seed)
    if isinstance(population, Normal):
        draws = rng.normal(population.mu, population.sigma, size=(replications, n))
        mu, sd = population.mu, population.sigma
        label = str(population)
    elif isinstance(population, Binomial):
        draws = rng.binomial(population.n, population.p, size=(replications, n)).astype(float)
        mu, var = population.moments()
        sd = math.sqrt(var)
        label = str(population)
    elif isinstance(population, (ChiSquare, StudentT, FisherF)):
        raise ValueError(f"sampling from {population} is not supported; pass a finite population")
    else:
        pop = np.asarray(population, dtype=float)
        if pop.size == 0:
            raise DataError("population is empty")
        draws = rng.choice(pop, size=(replications, n), replace=True)
        mu, sd = float(pop.mean()), float(pop.std())
        label = f"finite population of {pop.size} values"
    means = draws.mean(axis=1)
    centered = means - means.mean()
    m2 = float(np.mean(centered**2))
    skew = float(np.mean(centered**3)) / m2**1.5 if m2 > 0 else 0.0
    return CltReport(
        population=label,
        n=n,
        replications=replications,
        mean_of_means=float(means.mean()),
        sd_of_means=float(means.std(ddof=1)) if replications > 1 else 0.0,
        skewness=skew,
        population_mean=mu,
        population_sd=sd,
    )
