"""Benchmark regression with Newey-West (Bartlett kernel) standard errors."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from ..errors import DegenerateBenchmark, TooShort

PERIODS = 252


@dataclass(frozen=True)
class RegressionResult:
    alpha_daily: float
    alpha_annual: float
    beta: float
    t_alpha: float
    t_beta: float
    r_squared: float
    tracking_error: float
    information_ratio: float
    hac_lags: int
    nobs: int
    extra_betas: tuple = ()
    extra_t: tuple = ()

    def to_dict(self) -> dict:
        d = asdict(self)
        d["extra_betas"] = list(self.extra_betas)
        d["extra_t"] = list(self.extra_t)
        return d


def newey_west_cov(X: np.ndarray, resid: np.ndarray, lags: int) -> np.ndarray:
    """HAC covariance of OLS coefficients, ``(X'X)^-1 S (X'X)^-1``.

    ``S`` is the Bartlett-weighted sum of score autocovariances, no
    small-sample correction.
    """
    scores = X * resid[:, None]
    S = scores.T @ scores
    for lag in range(1, lags + 1):
        w = 1.0 - lag / (lags + 1.0)
        gamma = scores[lag:].T @ scores[:-lag]
        S += w * (gamma + gamma.T)
    bread = np.linalg.inv(X.T @ X)
    return bread @ S @ bread


def capm_regression(strategy, benchmark, hac_lags: int = 5, extra=None,
                    periods: int = PERIODS) -> RegressionResult:
    """OLS of strategy returns on a benchmark (plus optional extra regressors).

    ``t`` statistics use Newey-West standard errors with ``hac_lags`` lags.
    Tracking error is the annualised residual stdev (``ddof`` = regressors)
    and the information ratio is ``alpha_annual / tracking_error``.
    """
    y = np.asarray(strategy, dtype=float)
    b = np.asarray(benchmark, dtype=float)
    if y.shape != b.shape:
        raise ValueError("strategy and benchmark must have equal length")
    n = y.size
    if n < 30:
        raise TooShort(f"regression needs >= 30 observations, have {n}")
    if not np.var(b) > 0:
        raise DegenerateBenchmark("benchmark returns have zero variance")
    cols = [np.ones(n), b]
    if extra is not None:
        ex = np.asarray(extra, dtype=float)
        ex = ex[:, None] if ex.ndim == 1 else ex
        cols.extend(ex.T)
    X = np.column_stack(cols)
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ coef
    cov = newey_west_cov(X, resid, hac_lags)
    se = np.sqrt(np.clip(np.diag(cov), 0.0, None))
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(se > 0, coef / se, np.sign(coef) * np.inf)
    tss = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(resid @ resid) / tss if tss > 0 else math.nan
    te = float(np.std(resid, ddof=X.shape[1])) * math.sqrt(periods)
    alpha_annual = float(coef[0]) * periods
    return RegressionResult(
        alpha_daily=float(coef[0]),
        alpha_annual=alpha_annual,
        beta=float(coef[1]),
        t_alpha=float(t[0]),
        t_beta=float(t[1]),
        r_squared=r2,
        tracking_error=te,
        information_ratio=alpha_annual / te if te > 0 else math.nan,
        hac_lags=int(hac_lags),
        nobs=n,
        extra_betas=tuple(float(c) for c in coef[2:]),
        extra_t=tuple(float(v) for v in t[2:]),
    )
