"""Exploratory factor analysis: adequacy checks, extraction, retention, rotation, reliability."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Sequence, Union

import numpy as np

from .distributions import ChiSquare
from .errors import ConvergenceError, DataError, SingularMatrixError
from .linalg import EigenPairs, jacobi_eigen, lu_factor

__all__ = [
    "CorrelationMatrix", "correlation_matrix", "bartlett_sphericity", "BartlettResult",
    "kmo", "KmoResult", "kmo_band", "AdequacyReport", "adequacy", "eigen_symmetric",
    "FactorSolution", "extract_pca", "extract_principal_axis", "Kaiser", "VarianceExplained",
    "AllFactors", "retain", "scree_data", "variance_table", "rotate", "orthomax_criterion", "cronbach_alpha",
    "alpha_band", "KMO_BANDS", "ALPHA_BANDS",
]

# (lower threshold, label); a value takes the label of the largest threshold it reaches
KMO_BANDS = (
    (0.0, "unacceptable"),
    (0.5, "miserable"),
    (0.6, "mediocre"),
    (0.7, "middling"),
    (0.8, "meritorious"),
    (0.9, "marvelous"),
)
ALPHA_BANDS = (
    (0.0, "unacceptable"),
    (0.5, "poor"),
    (0.6, "questionable"),
    (0.7, "acceptable"),
    (0.8, "good"),
    (0.9, "excellent"),
)


def _band(value: float, bands) -> str:
    label = bands[0][1]
    for lower, name in bands:
        if value >= lower:
            label = name
    return label


def kmo_band(value: float) -> str:
    return _band(value, KMO_BANDS)


def alpha_band(value: float) -> str:
    return _band(value, ALPHA_BANDS)


@dataclass(frozen=True)
class CorrelationMatrix:
    r: np.ndarray
    n: int

    def __post_init__(self):
        r = np.array(self.r, dtype=float)
        if r.ndim != 2 or r.shape[0] != r.shape[1] or r.shape[0] < 1:
            raise DataError("correlation matrix must be square and nonempty")
        if not np.allclose(r, r.T, rtol=0, atol=1e-12):
            raise DataError("correlation matrix must be symmetric")
        if np.any(np.abs(r) > 1 + 1e-12):
            raise DataError("correlation entries must lie in [-1, 1]")
        r = np.clip(0.5 * (r + r.T), -1.0, 1.0)
        np.fill_diagonal(r, 1.0)
        r.setflags(write=False)
        object.__setattr__(self, "r", r)

    @property
    def p(self) -> int:
        return self.r.shape[0]


def correlation_matrix(data: np.ndarray | Sequence[Sequence[float]]) -> CorrelationMatrix:
    """Pearson correlations of the standardized columns of an n x p matrix."""
    x = np.asarray(data, dtype=float)
    if x.ndim != 2:
        raise DataError("data must be an n x p matrix")
    n, p = x.shape
    if n < 3:
        raise DataError("correlation needs at least 3 observations")
    if not np.all(np.isfinite(x)):
        raise DataError("data contains non-finite values")
    centered = x - x.mean(axis=0)
    sd = np.sqrt(np.sum(centered**2, axis=0) / (n - 1))
    if np.any(sd == 0):
        bad = [int(i) for i in np.flatnonzero(sd == 0)]
        raise DataError(f"constant column(s) at index {bad}: correlation undefined")
    z = centered / sd
    r = (z.T @ z) / (n - 1)
    return CorrelationMatrix(np.clip(0.5 * (r + r.T), -1.0, 1.0), n)


def _as_matrix(r) -> np.ndarray:
    return r.r if isinstance(r, CorrelationMatrix) else np.asarray(r, dtype=float)


@dataclass(frozen=True)
class BartlettResult:
    statistic: float
    df: int
    p_value: float
    determinant: float


def bartlett_sphericity(r: CorrelationMatrix) -> BartlettResult:
    """Chi-square test that the population correlation matrix is the identity."""
    p, n = r.p, r.n
    if p < 2:
        raise DataError("sphericity test needs at least 2 variables")
    factor = n - 1 - (2 * p + 5) / 6
    if factor <= 0:
        raise DataError(f"sample size n={n} too small for p={p} variables")
    lu = lu_factor(r.r)
    det = lu.det()
    if det <= 1e-12:
        raise SingularMatrixError(f"correlation matrix is singular (|R| = {det:.3e})")
    statistic = -factor * lu.log_abs_det()
    statistic = max(0.0, statistic)  # ln|R| <= 0 for a correlation matrix; drop rounding noise
    df = p * (p - 1) // 2
    p_value = 1.0 if statistic == 0 else ChiSquare(df).sf(statistic)
    return BartlettResult(statistic, df, p_value, det)


@dataclass(frozen=True)
class KmoResult:
    overall: float
    per_variable: tuple[float, ...]
    band: str
    partial: np.ndarray = field(repr=False)


def kmo(r: CorrelationMatrix | np.ndarray) -> KmoResult:
    """Kaiser-Meyer-Olkin sampling adequacy from raw and partial correlations."""
    m = _as_matrix(r)
    p = m.shape[0]
    if p < 2:
        raise DataError("KMO needs at least 2 variables")
    v = lu_factor(m).inverse()
    d = np.sqrt(np.diag(v))
    a = -v / np.outer(d, d)
    off = ~np.eye(p, dtype=bool)
    r2 = np.where(off, m**2, 0.0)
    a2 = np.where(off, a**2, 0.0)
    overall = float(r2.sum() / (r2.sum() + a2.sum()))
    per_var = tuple(float(r2[i].sum() / (r2[i].sum() + a2[i].sum())) for i in range(p))
    np.fill_diagonal(a, 1.0)
    return KmoResult(overall, per_var, kmo_band(overall), a)


@dataclass(frozen=True)
class AdequacyReport:
    bartlett: BartlettResult
    kmo: KmoResult

    @property
    def kmo_band(self) -> str:
        return self.kmo.band


def adequacy(r: CorrelationMatrix) -> AdequacyReport:
    return AdequacyReport(bartlett_sphericity(r), kmo(r))


def eigen_symmetric(r: CorrelationMatrix | np.ndarray) -> EigenPairs:
    return jacobi_eigen(_as_matrix(r), tol=1e-12)


@dataclass(frozen=True)
class FactorSolution:
    loadings: np.ndarray  # p x m
    eigenvalues: np.ndarray  # full spectrum of the matrix that was decomposed
    shares: np.ndarray  # variance share of each retained factor
    extraction: str
    rotation: str = "none"
    rotation_matrix: np.ndarray | None = None
    iterations: int = 0

    @property
    def communalities(self) -> np.ndarray:
        return np.sum(self.loadings**2, axis=1)

    @property
    def specific_variances(self) -> np.ndarray:
        return 1.0 - self.communalities

    @property
    def m(self) -> int:
        return self.loadings.shape[1]

    @property
    def p(self) -> int:
        return self.loadings.shape[0]


def _check_m(m: int, p: int) -> None:
    if not (isinstance(m, (int, np.integer)) and 1 <= m < p):
        raise DataError(f"factor count must satisfy 1 <= m < p = {p}, got {m}")


def _loadings(eig: EigenPairs, m: int) -> np.ndarray:
    return eig.vectors[:, :m] * np.sqrt(np.clip(eig.values[:m], 0.0, None))


def extract_pca(r: CorrelationMatrix, m: int) -> FactorSolution:
    """Principal component extraction: loadings are eigenvectors scaled by sqrt(eigenvalue)."""
    _check_m(m, r.p)
    eig = eigen_symmetric(r)
    return FactorSolution(_loadings(eig, m), eig.values, eig.values[:m] / r.p, "pca")


def extract_principal_axis(r: CorrelationMatrix, m: int, max_iter: int = 200, tol: float = 1e-6) -> FactorSolution:
    """Iterated principal axis factoring starting from squared multiple correlations.

    Communalities above 1 (Heywood cases) are clamped to 1 with a warning.
    Raises ``ConvergenceError`` carrying the per-iteration max change when
    ``max_iter`` is reached.
    """
    _check_m(m, r.p)
    try:
        inv_diag = np.diag(lu_factor(r.r).inverse())
    except SingularMatrixError as exc:
        raise SingularMatrixError("principal axis start needs an invertible R") from exc
    h2 = np.clip(1.0 - 1.0 / inv_diag, 0.0, 1.0)
    trace = []
    heywood = False
    for it in range(1, max_iter + 1):
        reduced = np.array(r.r)
        np.fill_diagonal(reduced, h2)
        eig = eigen_symmetric(reduced)
        lam = _loadings(eig, m)
        new_h2 = np.sum(lam**2, axis=1)
        if np.any(new_h2 > 1.0):
            heywood = True
            new_h2 = np.minimum(new_h2, 1.0)
        delta = float(np.max(np.abs(new_h2 - h2)))
        trace.append(delta)
        h2 = new_h2
        if delta <= tol:
            break
    else:
        raise ConvergenceError(f"principal axis did not converge in {max_iter} iterations", trace=trace)
    if heywood:
        warnings.warn("Heywood case: a communality exceeded 1 and was clamped", RuntimeWarning, stacklevel=2)
        norms = np.sqrt(np.sum(lam**2, axis=1))
        over = norms > 1.0
        lam[over] /= norms[over, None]
    return FactorSolution(lam, eig.values, np.sum(lam**2, axis=0) / r.p, "principal_axis", iterations=it)


@dataclass(frozen=True)
class Kaiser:
    """Keep factors whose eigenvalue exceeds 1."""


@dataclass(frozen=True)
class VarianceExplained:
    threshold: float = 0.75

    def __post_init__(self):
        if not 0 < self.threshold <= 1:
            raise ValueError("variance threshold must lie in (0, 1]")


@dataclass(frozen=True)
class AllFactors:
    pass


RetentionRule = Union[Kaiser, VarianceExplained, AllFactors]


def retain(eig: EigenPairs | Sequence[float], rule: RetentionRule = Kaiser()) -> int:
    values = np.asarray(eig.values if isinstance(eig, EigenPairs) else eig, dtype=float)
    if values.size == 0:
        raise DataError("empty spectrum")
    values = np.sort(values)[::-1]
    if isinstance(rule, AllFactors):
        return int(values.size)
    if isinstance(rule, Kaiser):
        m = int(np.sum(values > 1.0))
    elif isinstance(rule, VarianceExplained):
        shares = np.cumsum(values) / values.sum()
        m = int(np.argmax(shares >= rule.threshold - 1e-12)) + 1
    else:
        raise TypeError(f"unknown retention rule {rule!r}")
    if m < 1:
        warnings.warn("no factor met the retention rule; keeping 1", RuntimeWarning, stacklevel=2)
        m = 1
    return m


def variance_table(eig: EigenPairs | Sequence[float]) -> list[tuple[int, float, float, float]]:
    """(index, eigenvalue, share of the trace, cumulative share) per factor, descending."""
    values = np.sort(np.asarray(eig.values if isinstance(eig, EigenPairs) else eig, dtype=float))[::-1]
    total = float(values.sum())
    if values.size == 0 or total <= 0:
        raise DataError("spectrum must be nonempty with a positive trace")
    cum = np.cumsum(values) / total
    return [(i + 1, float(v), float(v / total), float(c)) for i, (v, c) in enumerate(zip(values, cum))]


def scree_data(eig: EigenPairs | Sequence[float]) -> list[tuple[int, float]]:
    values = np.asarray(eig.values if isinstance(eig, EigenPairs) else eig, dtype=float)
    if values.size == 0:
        raise DataError("empty spectrum")
    return [(i + 1, float(v)) for i, v in enumerate(np.sort(values)[::-1])]


_GAMMA = {"varimax": 1.0, "quartimax": 0.0}


def orthomax_criterion(loadings: np.ndarray, gamma: float) -> float:
    sq = loadings**2
    p = loadings.shape[0]
    return float(np.sum(sq**2) - gamma / p * np.sum(np.sum(sq, axis=0) ** 2))


def rotate(
    solution: FactorSolution,
    kind: str = "varimax",
    normalize: bool = True,
    tol: float = 1e-10,
    max_sweeps: int = 100,
) -> FactorSolution:
    """Orthogonal orthomax rotation (varimax or quartimax) by pairwise planar rotations.

    With ``normalize`` the rows are scaled to unit length first (Kaiser
    normalization) and scaled back afterwards. A one-factor solution is
    returned unchanged.
    """
    kind = kind.lower()
    if kind not in _GAMMA:
        raise ValueError(f"rotation must be varimax or quartimax, got {kind!r}")
    if solution.m < 2:
        return solution
    gamma = _GAMMA[kind]
    lam = np.array(solution.loadings, dtype=float)
    p, m = lam.shape
    h = np.sqrt(np.sum(lam**2, axis=1))
    scale = np.where(h > 0, h, 1.0) if normalize else np.ones(p)
    x = lam / scale[:, None]
    t = np.eye(m)
    crit = orthomax_criterion(x, gamma)
    for _ in range(max_sweeps):
        for j in range(m - 1):
            for k in range(j + 1, m):
                a, b = x[:, j], x[:, k]
                u = a * a - b * b
                v = 2.0 * a * b
                A, B = u.sum(), v.sum()
                C = np.sum(u * u - v * v)
                D = 2.0 * np.sum(u * v)
                num = D - 2.0 * gamma * A * B / p
                den = C - gamma * (A * A - B * B) / p
                phi = 0.25 * math.atan2(num, den)
                if abs(phi) < 1e-15:
                    continue
                c, s = math.cos(phi), math.sin(phi)
                x[:, j], x[:, k] = c * a + s * b, -s * a + c * b
                tj, tk = t[:, j].copy(), t[:, k].copy()
                t[:, j], t[:, k] = c * tj + s * tk, -s * tj + c * tk
        new_crit = orthomax_criterion(x, gamma)
        gain = new_crit - crit
        crit = new_crit
        if gain <= tol:
            break
    rotated = x * scale[:, None]
    # canonical form: factors by descending explained variance, each summing nonnegative
    order = np.argsort(-np.sum(rotated**2, axis=0), kind="stable")
    rotated, t = rotated[:, order], t[:, order]
    signs = np.where(rotated.sum(axis=0) < 0, -1.0, 1.0)
    rotated *= signs
    t = t * signs
    return replace(
        solution,
        loadings=rotated,
        shares=np.sum(rotated**2, axis=0) / p,
        rotation=kind,
        rotation_matrix=t,
    )


def cronbach_alpha(items: np.ndarray | Sequence[Sequence[float]]) -> tuple[float, str]:
    """Internal consistency of an n x k item battery, with its reliability band."""
    x = np.asarray(items, dtype=float)
    if x.ndim != 2 or x.shape[1] < 2:
        raise DataError("Cronbach's alpha needs an n x k matrix with k >= 2")
    if x.shape[0] < 2:
        raise DataError("Cronbach's alpha needs at least 2 respondents")
    k = x.shape[1]
    item_var = np.var(x, axis=0, ddof=1).sum()
    total_var = float(np.var(x.sum(axis=1), ddof=1))
    if total_var == 0:
        raise DataError("total score has zero variance")
    alpha = k / (k - 1) * (1.0 - item_var / total_var)
    return float(alpha), alpha_band(alpha)
