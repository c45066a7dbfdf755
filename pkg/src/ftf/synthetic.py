"""Seeded synthetic daily OHLC: a geometric random walk with injected trend segments."""

from __future__ import annotations

import numpy as np

from .market_data import PriceSeries, business_days, nyse_holidays


def generate_prices(seed: int = 7, start: str = "2005-01-03", end: str = "2025-10-31",
                    daily_vol: float = 0.009, mean_segment: float = 80.0,
                    drifts=(0.0020, 0.0, -0.0015), drift_probs=(0.40, 0.35, 0.25),
                    start_price: float = 430.0, holidays: str | None = "nyse",
                    dates=None) -> PriceSeries:
    """Close-to-close log returns ``drift_segment + daily_vol * eps``.

    Segment lengths are geometric with mean ``mean_segment``; each segment
    draws one drift from ``drifts`` with ``drift_probs``. Opens gap from the
    previous close by a fraction of the day's move and highs/lows extend
    beyond the open/close envelope by half-normal amounts.
    """
    rng = np.random.default_rng(seed)
    if dates is None:
        hol = nyse_holidays(start, end) if holidays == "nyse" else ()
        dates = business_days(start, end, hol)
    dates = np.asarray(dates, dtype="datetime64[D]")
    n = len(dates)

    drift = np.empty(n)
    t = 0
    while t < n:
        length = int(rng.geometric(1.0 / mean_segment))
        drift[t:t + length] = rng.choice(np.asarray(drifts), p=np.asarray(drift_probs))
        t += length
    log_ret = drift + daily_vol * rng.standard_normal(n)
    log_ret[0] = 0.0
    close = start_price * np.exp(np.cumsum(log_ret))

    prev = np.concatenate(([close[0]], close[:-1]))
    gap = rng.uniform(0.0, 0.3, n)
    open_ = prev * np.exp(gap * log_ret)
    span = daily_vol * close
    high = np.maximum(open_, close) + np.abs(rng.normal(0.0, 0.4, n)) * span
    low = np.minimum(open_, close) - np.abs(rng.normal(0.0, 0.4, n)) * span
    low = np.maximum(low, 0.5 * np.minimum(open_, close))
    return PriceSeries(dates, open_, high, low, close, "synthetic")


def trending_prices(seed: int = 3, n: int = 4000, drift: float = 0.0012,
                    daily_vol: float = 0.008, start: str = "2005-01-03") -> PriceSeries:
    """Single persistent up-trend; the full strategy should earn, its mirror should not."""
    dates = business_days(start, np.datetime64(start) + int(n * 1.5))[:n]
    return generate_prices(seed, dates=dates, daily_vol=daily_vol, drifts=(drift,),
                           drift_probs=(1.0,), mean_segment=1e9)
