"""Ordinary least squares with the ANOVA decomposition and coefficient t tests.

Coefficient t tests are only valid for each variable one at a time; they say
nothing about which predictors jointly influence the response. The overall
F test is the only joint test provided.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .distributions import FisherF, StudentT
from .errors import DataError, DegenerateError
from .linalg import householder_qr, solve_upper

# SSE below this fraction of SST is rounding noise from an exact fit
# (residual norm under 1e-12 of the response spread) and is reported as 0.
EXACT_FIT_RTOL = 1e-24


@dataclass(frozen=True)
class LinearModel:
    coefficients: np.ndarray  # b0, b1, ..., bp
    fitted: np.ndarray
    residuals: np.ndarray
    n: int
    p: int
    r_factor: np.ndarray  # R of the design matrix [1 | X], for coefficient standard errors
    y: np.ndarray

    @property
    def intercept(self) -> float:
        return float(self.coefficients[0])

    @property
    def slopes(self) -> np.ndarray:
        return self.coefficients[1:]

    @property
    def df_error(self) -> int:
        return self.n - self.p - 1


def _design(x: np.ndarray) -> np.ndarray:
    return np.column_stack([np.ones(x.shape[0]), x])


def fit_ols(x: np.ndarray | Sequence, y: Sequence[float]) -> LinearModel:
    """Least-squares fit of ``y = b0 + X b`` via Householder QR of ``[1 | X]``.

    Raises ``SingularMatrixError`` for collinear predictors.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    y = np.asarray(y, dtype=float).ravel()
    n, p = x.shape
    if y.size != n:
        raise DataError(f"X has {n} rows but y has {y.size} values")
    if n < p + 2:
        raise DataError(f"need at least p + 2 = {p + 2} observations, got {n}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise DataError("non-finite values in regression input")
    design = _design(x)
    qr = householder_qr(design)
    coef = solve_upper(qr.r, qr.q.T @ y)
    fitted = design @ coef
    residuals = y - fitted
    return LinearModel(coef, fitted, residuals, n, p, qr.r, y)


def predict(model: LinearModel, x_new: Sequence[float]) -> float:
    x_new = np.asarray(x_new, dtype=float).ravel()
    if x_new.size != model.p:
        raise DataError(f"model has {model.p} predictors, got {x_new.size} values")
    return float(model.coefficients[0] + x_new @ model.coefficients[1:])


@dataclass(frozen=True)
class AnovaTable:
    sst: float
    ssm: float
    sse: float
    dfm: int
    dfe: int
    msm: float
    mse: float
    f_statistic: float
    p_value: float

    @property
    def dft(self) -> int:
        return self.dfm + self.dfe


def anova(model: LinearModel, y: Sequence[float] | None = None) -> AnovaTable:
    """Split the total sum of squares into model and error parts, with the overall F test."""
    y = model.y if y is None else np.asarray(y, dtype=float).ravel()
    dfm, dfe = model.p, model.df_error
    if dfe < 1:
        raise DataError("ANOVA needs n - p - 1 >= 1")
    ybar = math.fsum(y) / y.size
    sst = math.fsum((y - ybar) ** 2)
    ssm = math.fsum((model.fitted - ybar) ** 2)
    sse = math.fsum((y - model.fitted) ** 2)
    if sse <= EXACT_FIT_RTOL * sst:
        sse = 0.0
    msm, mse = ssm / dfm, sse / dfe
    if mse == 0:
        f_stat, p = (math.inf, 0.0) if msm > 0 else (math.nan, math.nan)
    else:
        f_stat = msm / mse
        p = FisherF(dfm, dfe).sf(f_stat)
    return AnovaTable(sst, ssm, sse, dfm, dfe, msm, mse, f_stat, p)


@dataclass(frozen=True)
class CoefficientTest:
    index: int
    estimate: float
    std_error: float
    t_statistic: float
    p_value: float
    hypothesized: float = 0.0
    rejected: bool = False


def coefficient_tests(
    model: LinearModel,
    y: Sequence[float] | None = None,
    k: Sequence[float] | float = 0.0,
    alpha: float = 0.05,
) -> list[CoefficientTest]:
    """Two-tailed t tests of ``H0: b_i = k_i`` for every coefficient, intercept first.

    Standard errors come from ``MSE * diag((X'X)^-1)``, with ``(X'X)^-1 = R^-1 R^-T``.
    Raises ``DegenerateError`` on an exact fit, where the tests are undefined.
    """
    table = anova(model, y)
    if table.mse == 0:
        raise DegenerateError("exact fit (MSE = 0): coefficient t tests are undefined")
    p1 = model.p + 1
    ks = np.broadcast_to(np.asarray(k, dtype=float), (p1,))
    r_inv = solve_upper(model.r_factor, np.eye(p1))
    cov_diag = np.sum(r_inv * r_inv, axis=1)  # diag(R^-1 R^-T)
    ref = StudentT(table.dfe)
    tests = []
    for i in range(p1):
        se = math.sqrt(table.mse * cov_diag[i])
        t = (model.coefficients[i] - ks[i]) / se
        p = min(1.0, 2.0 * ref.sf(abs(t)))
        tests.append(CoefficientTest(i, float(model.coefficients[i]), se, float(t), p, float(ks[i]), p < alpha))
    return tests


def r_squared(table: AnovaTable) -> float:
    if table.sst == 0:
        raise DegenerateError("constant response: r^2 undefined")
    return min(1.0, max(0.0, table.ssm / table.sst))
