"""
Regime signal: EMA-smoothed log price -> standardized slope -> bounded
trend probability, blended with a K-day momentum bit into ``p_bull``.

Every value at day t is a function of closes up to and including t.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .errors import ConfigError, DegenerateTraining, InvalidLambda, UndefinedMomentum
from .market_data import PriceSeries

CLIP_BOUND = 3.0


@dataclass(frozen=True)
class SignalParams:
    lambda_ema: float = 0.94
    momentum_window: int = 50
    omega: float = 0.6
    activation_threshold: float = 0.52

    def __post_init__(self):
        if not 0.0 < self.lambda_ema < 1.0:
            raise InvalidLambda(self.lambda_ema)
        if int(self.momentum_window) != self.momentum_window or self.momentum_window < 1:
            raise ConfigError("signal.momentum_window", f"must be an integer >= 1, got {self.momentum_window!r}")
        if not 0.0 <= self.omega <= 1.0:
            raise ConfigError("signal.omega", f"must lie in [0, 1], got {self.omega!r}")
        if not 0.5 < self.activation_threshold <= 1.0:
            raise ConfigError("signal.activation_threshold",
                              f"must lie in (0.5, 1], got {self.activation_threshold!r}")


@dataclass(frozen=True)
class TrainStats:
    mu_train: float
    sigma_train: float

    def __post_init__(self):
        if not (np.isfinite(self.sigma_train) and self.sigma_train > 0):
            raise DegenerateTraining(f"slope dispersion on the training window is {self.sigma_train!r}")


@dataclass(eq=False)
class SignalSeries:
    dates: np.ndarray
    y_tilde: np.ndarray
    slope: np.ndarray
    z: np.ndarray
    p_trend: np.ndarray
    m: np.ndarray
    p_bull: np.ndarray
    p_bear: np.ndarray
    tradeable: np.ndarray = field(repr=False)

    FIELDS = ("y_tilde", "slope", "z", "p_trend", "m", "p_bull", "p_bear", "tradeable")

    def __len__(self) -> int:
        return len(self.dates)

    def __getitem__(self, item: slice) -> "SignalSeries":
        return SignalSeries(self.dates[item], *(getattr(self, f)[item] for f in self.FIELDS))

    def to_frame(self) -> pd.DataFrame:
        data = {"date": self.dates}
        data.update({f: getattr(self, f) for f in self.FIELDS})
        return pd.DataFrame(data)

    def to_csv(self, path) -> None:
        self.to_frame().to_csv(path, index=False, float_format="%.17g", lineterminator="\n")


def ema_smooth(y, lambda_ema: float, initial: float | None = None) -> np.ndarray:
    """Forward recursion ``s_t = lam*s_{t-1} + (1-lam)*y_t``.

    Without ``initial`` the recursion starts at ``s_0 = y_0``; with it,
    ``initial`` plays the role of ``s_{-1}`` (used to continue a filter
    from a previous segment).
    """
    if not 0.0 < lambda_ema < 1.0:
        raise InvalidLambda(lambda_ema)
    y = np.asarray(y, dtype=float)
    if y.size == 0:
        raise ValueError("ema_smooth needs a nonempty sequence")
    out = np.empty_like(y)
    lam = float(lambda_ema)
    one_minus = 1.0 - lam
    if initial is None:
        prev = y[0]
        out[0] = prev
        start = 1
    else:
        prev = float(initial)
        start = 0
    for t in range(start, len(y)):
        prev = lam * prev + one_minus * y[t]
        out[t] = prev
    return out


def fit_train_stats(slope) -> TrainStats:
    """Mean and population standard deviation of the defined training slopes."""
    s = np.asarray(slope, dtype=float)
    s = s[np.isfinite(s)]
    if s.size == 0:
        raise DegenerateTraining("no defined slopes in the training window")
    return TrainStats(float(np.mean(s)), float(np.std(s)))


def standardize_slope(slope, stats: TrainStats) -> np.ndarray:
    if not stats.sigma_train > 0:
        raise DegenerateTraining("sigma_train must be positive")
    return (np.asarray(slope, dtype=float) - stats.mu_train) / stats.sigma_train


def trend_probability(z):
    return (np.clip(z, -CLIP_BOUND, CLIP_BOUND) + CLIP_BOUND) / (2 * CLIP_BOUND)


def momentum_indicator(close, window: int) -> np.ndarray:
    """1.0 where ``close_t / close_{t-K} > 1``, 0.0 otherwise, NaN for the first K days."""
    c = np.asarray(close, dtype=float)
    out = np.full(c.shape, np.nan)
    if len(c) > window:
        out[window:] = (c[window:] / c[:-window] > 1.0).astype(float)
    return out


def blend_regime(p_trend, m, omega: float):
    """Return ``(p_bull, p_bear)``; raises if any momentum value is undefined."""
    m = np.asarray(m, dtype=float)
    if np.any(np.isnan(m)):
        raise UndefinedMomentum("momentum bit is undefined (warm-up); gate before blending")
    p_bull = omega * np.asarray(p_trend, dtype=float) + (1.0 - omega) * m
    return p_bull, 1.0 - p_bull


def build_signal(series: PriceSeries, params: SignalParams, stats: TrainStats) -> SignalSeries:
    """Compute every signal field for each day of ``series``.

    Day 0 has no slope and the first ``momentum_window`` days have no
    momentum bit; those days carry NaN probabilities and ``tradeable=False``.
    """
    y = np.log(series.close)
    y_tilde = ema_smooth(y, params.lambda_ema)
    slope = np.full_like(y_tilde, np.nan)
    slope[1:] = np.diff(y_tilde)
    z = standardize_slope(slope, stats)
    p_trend = trend_probability(z)
    m = momentum_indicator(series.close, params.momentum_window)

    ok = ~np.isnan(m) & ~np.isnan(slope)
    p_bull = np.full_like(y, np.nan)
    p_bull[ok], _ = blend_regime(p_trend[ok], m[ok], params.omega)
    return SignalSeries(series.dates, y_tilde, slope, z, p_trend, m, p_bull, 1.0 - p_bull, ok)


def entry_gate(signal: SignalSeries, threshold: float, direction: int = 1) -> np.ndarray:
    """Boolean activation mask. ``direction=-1`` mirrors it for the short-side variant."""
    with np.errstate(invalid="ignore"):
        if direction >= 0:
            gate = (signal.p_bull >= threshold) & (signal.slope > 0)
        else:
            gate = (signal.p_bear >= threshold) & (signal.slope < 0)
    return gate & signal.tradeable
