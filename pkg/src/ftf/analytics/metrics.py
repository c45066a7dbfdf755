"""
Net performance statistics computed from a :class:`~ftf.execution.DailyLedger`.

Conventions
-----------
* risk-free rate is zero; Sharpe = annualised mean / annualised stdev
* standard deviations use ``ddof=1``
* a day is *active* when the weight held over it exceeds ``1e-3`` in magnitude
* kurtosis is the raw fourth standardised moment (normal = 3)
* VaR / CVaR are reported as positive loss magnitudes, floored at zero
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace

import numpy as np
import pandas as pd
from scipy import stats

from ..errors import TooShort, ZeroVol
from ..execution import DailyLedger

PERIODS = 252
ACTIVE_WEIGHT = 1e-3


@dataclass(frozen=True)
class PerfSummary:
    days: int
    ann_return: float
    ann_vol: float
    sharpe: float
    cagr: float
    max_drawdown: float
    calmar: float
    hit_rate_calendar: float
    hit_rate_calendar_nonzero: float
    hit_rate_active: float
    up_month_share: float
    skewness: float
    kurtosis: float
    var95: float
    cvar95: float
    worst_month: float
    avg_gain_bps: float
    avg_loss_bps: float
    payoff_ratio: float
    ev_per_active_day_bps: float
    entries: int
    active_days: int
    mean_abs_weight: float
    mean_abs_turnover: float

    def to_dict(self) -> dict:
        return asdict(self)


def max_drawdown(equity) -> float:
    """Largest peak-to-trough loss of a positive equity curve, as a fraction."""
    e = np.asarray(equity, dtype=float)
    if e.size == 0:
        return 0.0
    if np.any(e <= 0):
        raise ValueError("equity must be strictly positive")
    peak = np.maximum.accumulate(e)
    return float(np.max(1.0 - e / peak))


def monthly_returns(dates, returns) -> pd.Series:
    s = pd.Series(np.asarray(returns, dtype=float), index=pd.DatetimeIndex(dates))
    return (1.0 + s).groupby(s.index.to_period("M")).prod() - 1.0


def tail_metrics(returns, dates=None):
    """``(var95, cvar95, worst_month)`` of daily returns.

    ``worst_month`` is NaN when no dates are supplied.
    """
    r = np.asarray(returns, dtype=float)
    if r.size < 20:
        raise TooShort(f"tail metrics need >= 20 observations, have {r.size}")
    q = np.percentile(r, 5)
    var95 = max(0.0, -float(q))
    cvar95 = max(0.0, -float(np.mean(r[r <= q])))
    worst = float(monthly_returns(dates, r).min()) if dates is not None else math.nan
    return var95, cvar95, worst


def annualized_expectancy(ev_bps: float, active_days: int, total_days: int,
                          periods: int = PERIODS) -> float:
    """Active-day expectancy scaled by the active share and annualised (a fraction)."""
    return ev_bps * 1e-4 * active_days / total_days * periods


def _safe_ratio(a: float, b: float) -> float:
    return a / b if b != 0 else math.nan


def perf_summary(ledger: DailyLedger, allow_zero_vol: bool = False,
                 periods: int = PERIODS) -> PerfSummary:
    net = np.asarray(ledger.net_return, dtype=float)
    n = net.size
    if n == 0:
        raise TooShort("empty ledger")
    # a constant series can leave a rounding-level stdev; treat it as exactly zero
    vol_d = float(np.std(net, ddof=1)) if n > 1 and np.ptp(net) > 0 else 0.0
    if vol_d == 0 and not allow_zero_vol:
        raise ZeroVol("net returns have zero dispersion; Sharpe is undefined")
    mean_d = float(np.mean(net))
    ann_return = mean_d * periods
    ann_vol = vol_d * math.sqrt(periods)
    sharpe = _safe_ratio(ann_return, ann_vol)

    equity = np.cumprod(1.0 + net)
    cagr = float(equity[-1] ** (periods / n) - 1.0)
    mdd = max_drawdown(np.concatenate(([1.0], equity)))

    active = np.abs(ledger.held_weight) > ACTIVE_WEIGHT
    act = net[active]
    gains, losses = act[act > 0], act[act < 0]
    avg_gain = float(np.mean(gains)) * 1e4 if gains.size else math.nan
    avg_loss = float(np.mean(losses)) * 1e4 if losses.size else math.nan
    nonzero = net[net != 0]

    if n >= 20:
        var95, cvar95, worst = tail_metrics(net, ledger.dates)
    else:
        var95 = cvar95 = worst = math.nan
    months = monthly_returns(ledger.dates, net)
    with np.errstate(all="ignore"):
        skew = float(stats.skew(net)) if vol_d > 0 else math.nan
        kurt = float(stats.kurtosis(net, fisher=False)) if vol_d > 0 else math.nan

    return PerfSummary(
        days=n,
        ann_return=ann_return,
        ann_vol=ann_vol,
        sharpe=sharpe,
        cagr=cagr,
        max_drawdown=mdd,
        calmar=_safe_ratio(ann_return, mdd),
        hit_rate_calendar=float(np.mean(net > 0)),
        hit_rate_calendar_nonzero=float(np.mean(nonzero > 0)) if nonzero.size else math.nan,
        hit_rate_active=float(np.mean(act > 0)) if act.size else math.nan,
        up_month_share=float(np.mean(months.values > 0)),
        skewness=skew,
        kurtosis=kurt,
        var95=var95,
        cvar95=cvar95,
        worst_month=worst,
        avg_gain_bps=avg_gain,
        avg_loss_bps=avg_loss,
        payoff_ratio=_safe_ratio(avg_gain, abs(avg_loss)) if gains.size and losses.size else math.nan,
        ev_per_active_day_bps=float(np.mean(act)) * 1e4 if act.size else math.nan,
        entries=int(np.sum(ledger.entry)),
        active_days=int(np.sum(active)),
        mean_abs_weight=float(np.mean(np.abs(ledger.filled_weight))),
        mean_abs_turnover=float(np.mean(ledger.turnover)),
    )


# ---------------------------------------------------------------------------
# Attribution and slicing
# ---------------------------------------------------------------------------

def _subset(ledger: DailyLedger, mask) -> DailyLedger:
    idx = np.flatnonzero(mask)
    cols = {c: getattr(ledger, c)[idx] for c in DailyLedger.COLUMNS}
    return DailyLedger(ledger.dates[idx], **cols)


def attribution(ledger: DailyLedger, spans: dict | None = None) -> dict:
    """Summaries per ex-ante regime label and per named date span.

    ``spans`` maps a label to ``(start, end)`` ISO dates (either may be None).
    Rows with no days are ``None``.
    """
    out = {"regime": {}, "span": {}}
    for label in ("bull", "chop", "bear"):
        mask = ledger.regime == label
        out["regime"][label] = perf_summary(_subset(ledger, mask), allow_zero_vol=True) if mask.any() else None
    spans = spans or {"full": (None, None)}
    for name, (lo, hi) in spans.items():
        mask = np.ones(len(ledger), dtype=bool)
        if lo is not None:
            mask &= ledger.dates >= np.datetime64(lo, "D")
        if hi is not None:
            mask &= ledger.dates <= np.datetime64(hi, "D")
        out["span"][name] = perf_summary(_subset(ledger, mask), allow_zero_vol=True) if mask.any() else None
    return out


def yearly_summaries(ledger: DailyLedger) -> dict[int, PerfSummary]:
    """Non-overlapping calendar-year summaries."""
    years = ledger.dates.astype("datetime64[Y]").astype(int) + 1970
    return {int(y): perf_summary(_subset(ledger, years == y), allow_zero_vol=True)
            for y in np.unique(years)}


# ---------------------------------------------------------------------------
# Volatility-normalised view
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScaledReport:
    target_vol: float
    scale: float
    scaled_return: float
    scaled_alpha: float
    sharpe: float
    information_ratio: float

    def to_dict(self) -> dict:
        return asdict(self)


def vol_scaling(ann_vol: float, sharpe: float, alpha_annual: float,
                information_ratio: float = math.nan, target_vol: float = 0.15) -> ScaledReport:
    """Restate performance at ``target_vol`` assuming returns scale linearly with exposure."""
    if not ann_vol > 0:
        raise ZeroVol("annualised volatility must be positive to rescale")
    c = target_vol / ann_vol
    return ScaledReport(target_vol, c, sharpe * target_vol, c * alpha_annual, sharpe, information_ratio)


def scale_returns(ledger: DailyLedger, c: float) -> DailyLedger:
    return replace(ledger, net_return=ledger.net_return * c, gross_return=ledger.gross_return * c)
