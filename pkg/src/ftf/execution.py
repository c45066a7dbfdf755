"""
Trade management and fills.

A single position (long, or short for the reversed variant) is stepped
through the day's close. Exit checks run in a fixed order: hard stop,
trailing stop, timeout, regime de-risk; then the entry gate when flat, or a
weight refresh when holding. Realized weights are delayed by the latency
mode and charged linear plus square-root-impact costs on every change.

P&L convention: the return booked on day t is earned by the weight filled
at the close of day t-1.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np
import pandas as pd

from .errors import ConfigError, Warmup
from .market_data import PriceSeries
from .signal import SignalSeries

BULL_LABEL_ABOVE = 0.55
BEAR_LABEL_BELOW = 0.45


class ExitReason(str, enum.Enum):
    HARD_STOP = "hard_stop"
    TRAIL_STOP = "trail_stop"
    TIMEOUT = "timeout"
    DERISK = "derisk"
    SIGNAL_OFF = "signal_off"


@dataclass(frozen=True)
class ExitParams:
    atr_window: int = 14
    hard_stop_mult: float = 2.0
    trail_stop_mult: float = 1.5
    timeout_days: int = 30
    derisk_threshold: float = 0.5
    derisk_mode: str = "halve"
    stop_trigger: str = "close"

    def __post_init__(self):
        if int(self.atr_window) != self.atr_window or self.atr_window < 1:
            raise ConfigError("exits.atr_window", f"must be an integer >= 1, got {self.atr_window!r}")
        for name in ("hard_stop_mult", "trail_stop_mult"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"exits.{name}", f"must be > 0, got {getattr(self, name)!r}")
        if int(self.timeout_days) != self.timeout_days or self.timeout_days < 1:
            raise ConfigError("exits.timeout_days", f"must be an integer >= 1, got {self.timeout_days!r}")
        if not 0.0 <= self.derisk_threshold <= 1.0:
            raise ConfigError("exits.derisk_threshold", f"must lie in [0, 1], got {self.derisk_threshold!r}")
        if self.derisk_mode not in ("halve", "close"):
            raise ConfigError("exits.derisk_mode", f"must be 'halve' or 'close', got {self.derisk_mode!r}")
        if self.stop_trigger not in ("close", "intraday"):
            raise ConfigError("exits.stop_trigger", f"must be 'close' or 'intraday', got {self.stop_trigger!r}")


@dataclass(frozen=True)
class CostModel:
    k: float = 7e-5
    gamma: float = 0.02
    cost_multiplier: float = 1.0
    impact_multiplier: float = 1.0

    def __post_init__(self):
        for name in ("k", "gamma", "cost_multiplier", "impact_multiplier"):
            if not getattr(self, name) >= 0:
                raise ConfigError(f"costs.{name}", f"must be >= 0, got {getattr(self, name)!r}")


@dataclass(frozen=True)
class LatencyMode:
    delay_days: int = 0

    def __post_init__(self):
        if self.delay_days not in (0, 1, 2):
            raise ConfigError("latency.delay_days", f"must be 0, 1 or 2, got {self.delay_days!r}")


@dataclass(frozen=True)
class PositionState:
    status: str = "flat"            # "flat" | "long" | "short"
    entry_price: float = math.nan
    entry_date: np.datetime64 | None = None
    peak_price: float = math.nan    # most favourable close since entry
    age: int = 0
    current_weight: float = 0.0
    scale: float = 1.0              # 0.5 after a de-risk halving
    bear_streak: int = 0

    @property
    def side(self) -> int:
        return {"flat": 0, "long": 1, "short": -1}[self.status]


FLAT = PositionState()


@dataclass(frozen=True)
class DayInputs:
    date: np.datetime64
    close: float
    high: float
    low: float
    p_bull: float
    slope: float
    atr: float
    target_weight: float
    tradeable: bool = True


# ---------------------------------------------------------------------------
# Volatility range
# ---------------------------------------------------------------------------

def true_range(high, low, prev_close=None):
    """``max(H-L, |H-C_prev|, |L-C_prev|)``; falls back to ``H-L`` without a previous close."""
    high = np.asarray(high, dtype=float)
    low = np.asarray(low, dtype=float)
    hl = high - low
    if prev_close is None:
        out = hl
    else:
        pc = np.asarray(prev_close, dtype=float)
        out = np.fmax(hl, np.fmax(np.abs(high - pc), np.abs(low - pc)))
    return out if out.ndim else float(out)


def true_range_series(series: PriceSeries) -> np.ndarray:
    prev = np.concatenate(([np.nan], series.close[:-1]))
    return true_range(series.high, series.low, prev)


def atr(tr, window: int = 14) -> np.ndarray:
    """Trailing simple mean of ``window`` true ranges; NaN during warm-up."""
    tr = np.asarray(tr, dtype=float)
    if len(tr) < window:
        raise Warmup(f"need {window} true-range values, have {len(tr)}")
    out = np.full(tr.shape, np.nan)
    out[window - 1:] = np.lib.stride_tricks.sliding_window_view(tr, window).mean(axis=1)
    return out


def regime_label(p_bull) -> np.ndarray:
    p = np.asarray(p_bull, dtype=float)
    return np.where(p > BULL_LABEL_ABOVE, "bull", np.where(p < BEAR_LABEL_BELOW, "bear", "chop"))


# ---------------------------------------------------------------------------
# State machine
# ---------------------------------------------------------------------------

def _exit(reason: ExitReason):
    return FLAT, 0.0, reason


def step_position(state: PositionState, day: DayInputs, params: ExitParams,
                  threshold: float = 0.52, direction: int = 1):
    """Advance the position by one close.

    Returns ``(new_state, realized_weight, event)`` where ``event`` is
    ``"entry"``, an :class:`ExitReason`, or ``None``. ``direction=-1``
    runs the mirrored short book: the gate uses ``p_bear``, stops sit above
    the entry, and de-risking reacts to ``p_bull``.
    """
    side = 1 if direction >= 0 else -1
    p_own = day.p_bull if side > 0 else 1.0 - day.p_bull
    p_against = 1.0 - p_own

    if state.status != "flat":
        age = state.age + 1
        if params.stop_trigger == "intraday":
            best = day.high if side > 0 else day.low
            worst = day.low if side > 0 else day.high
        else:
            best = worst = day.close
        peak = max(state.peak_price, best) if side > 0 else min(state.peak_price, best)
        adverse_from_entry = side * (state.entry_price - worst)
        adverse_from_peak = side * (peak - worst)

        if adverse_from_entry >= params.hard_stop_mult * day.atr:
            return _exit(ExitReason.HARD_STOP)
        if adverse_from_peak >= params.trail_stop_mult * day.atr:
            return _exit(ExitReason.TRAIL_STOP)
        if age >= params.timeout_days:
            return _exit(ExitReason.TIMEOUT)

        scale, streak = state.scale, 0
        if p_against > params.derisk_threshold:
            streak = state.bear_streak + 1
            if params.derisk_mode == "close" or streak >= 2:
                return _exit(ExitReason.DERISK)
            scale = 0.5

        target = day.target_weight * scale
        if not target > 0:
            return _exit(ExitReason.SIGNAL_OFF)
        weight = side * target
        return (replace(state, peak_price=peak, age=age, current_weight=weight,
                        scale=scale, bear_streak=streak), weight, None)

    with np.errstate(invalid="ignore"):
        gate = (day.tradeable and p_own >= threshold and side * day.slope > 0
                and math.isfinite(day.atr) and day.target_weight > 0)
    if not gate:
        return FLAT, 0.0, None
    weight = side * day.target_weight
    new = PositionState(status="long" if side > 0 else "short", entry_price=day.close,
                        entry_date=day.date, peak_price=day.close, age=0,
                        current_weight=weight)
    return new, weight, "entry"


# ---------------------------------------------------------------------------
# Fills and costs
# ---------------------------------------------------------------------------

def apply_latency(target_weights, mode: LatencyMode | int) -> np.ndarray:
    delay = mode.delay_days if isinstance(mode, LatencyMode) else int(mode)
    t = np.asarray(target_weights, dtype=float)
    out = np.zeros_like(t)
    if delay == 0:
        out[:] = t
    elif delay < len(t):
        out[delay:] = t[:-delay]
    return out


def apply_costs(filled_weights, gross_returns, model: CostModel, prev_weight: float = 0.0) -> dict:
    """Per-day turnover, linear cost, impact cost and net return."""
    w = np.asarray(filled_weights, dtype=float)
    gross = np.asarray(gross_returns, dtype=float)
    turnover = np.abs(np.diff(w, prepend=prev_weight))
    linear = model.cost_multiplier * model.k * turnover
    impact = model.impact_multiplier * model.gamma * turnover ** 1.5
    return {"turnover": turnover, "linear_cost": linear, "impact_cost": impact,
            "net_return": gross - linear - impact}


@dataclass(eq=False)
class DailyLedger:
    """Column-oriented per-day record of one simulation."""

    dates: np.ndarray
    asset_return: np.ndarray
    target_weight: np.ndarray
    filled_weight: np.ndarray
    held_weight: np.ndarray
    turnover: np.ndarray
    gross_return: np.ndarray
    linear_cost: np.ndarray
    impact_cost: np.ndarray
    net_return: np.ndarray
    status: np.ndarray
    entry: np.ndarray
    exit_reason: np.ndarray
    age: np.ndarray
    p_bull: np.ndarray
    regime: np.ndarray
    meta: dict = field(default_factory=dict, repr=False)

    COLUMNS = ("asset_return", "target_weight", "filled_weight", "held_weight", "turnover",
               "gross_return", "linear_cost", "impact_cost", "net_return", "status",
               "entry", "exit_reason", "age", "p_bull", "regime")

    def __len__(self) -> int:
        return len(self.dates)

    def __getitem__(self, item: slice) -> "DailyLedger":
        return DailyLedger(self.dates[item], *(getattr(self, c)[item] for c in self.COLUMNS),
                           meta=dict(self.meta))

    @property
    def equity(self) -> np.ndarray:
        return np.cumprod(1.0 + self.net_return)

    @classmethod
    def concat(cls, parts: list["DailyLedger"]) -> "DailyLedger":
        cols = {c: np.concatenate([getattr(p, c) for p in parts]) for c in cls.COLUMNS}
        return cls(np.concatenate([p.dates for p in parts]), **cols)

    def equals(self, other: "DailyLedger") -> bool:
        def same(a, b):
            return np.array_equal(a, b, equal_nan=a.dtype.kind == "f")
        return all(same(getattr(self, c), getattr(other, c)) for c in ("dates",) + self.COLUMNS)

    def to_frame(self) -> pd.DataFrame:
        data = {"date": pd.to_datetime(self.dates).strftime("%Y-%m-%d")}
        data.update({c: getattr(self, c) for c in self.COLUMNS})
        return pd.DataFrame(data)

    def to_csv(self, path) -> None:
        self.to_frame().to_csv(path, index=False, float_format="%.17g", lineterminator="\n")


def simulate_path(series: PriceSeries, signal: SignalSeries, target_weights, atr_values,
                  exits: ExitParams, costs: CostModel, latency: LatencyMode = LatencyMode(0),
                  threshold: float = 0.52, direction: int = 1, start: int = 0,
                  flatten_at_end: bool = False) -> DailyLedger:
    """Run the position state machine from day ``start`` (flat) to the end.

    All inputs are aligned day-by-day over ``series``. Days before ``start``
    only supply the previous close and the ex-ante regime label of the first
    simulated day. ``flatten_at_end`` forces the final fill to zero so a
    slice closes out its own position and pays for it.
    """
    n = len(series)
    if not (len(signal) == n and len(target_weights) == n and len(atr_values) == n):
        raise ValueError("series, signal, target weights and ATR must be aligned")
    if not 0 <= start < n:
        raise ValueError(f"start={start} outside [0, {n})")

    close, high, low = series.close, series.high, series.low
    targets = np.asarray(target_weights, dtype=float)
    atr_values = np.asarray(atr_values, dtype=float)
    m = n - start
    realized = np.zeros(m)
    status = np.zeros(m, dtype=np.int8)
    entry = np.zeros(m, dtype=bool)
    reason = np.full(m, "", dtype=object)
    age = np.zeros(m, dtype=np.int32)

    state = FLAT
    for j, t in enumerate(range(start, n)):
        day = DayInputs(series.dates[t], float(close[t]), float(high[t]), float(low[t]),
                        float(signal.p_bull[t]), float(signal.slope[t]), float(atr_values[t]),
                        float(targets[t]), bool(signal.tradeable[t]))
        state, w, event = step_position(state, day, exits, threshold, direction)
        realized[j] = w
        status[j] = state.side
        age[j] = state.age
        if event == "entry":
            entry[j] = True
        elif event is not None:
            reason[j] = event.value

    filled = apply_latency(realized, latency)
    if flatten_at_end:
        filled[-1] = 0.0
    held = np.concatenate(([0.0], filled[:-1]))

    prev_close = close[start - 1] if start > 0 else close[start]
    asset = np.empty(m)
    asset[0] = close[start] / prev_close - 1.0
    asset[1:] = close[start + 1:] / close[start:-1] - 1.0
    gross = held * asset
    cost = apply_costs(filled, gross, costs)

    p = signal.p_bull
    ex_ante = np.concatenate(([p[start - 1] if start > 0 else p[start]], p[start:-1]))
    return DailyLedger(
        dates=series.dates[start:], asset_return=asset, target_weight=realized,
        filled_weight=filled, held_weight=held, turnover=cost["turnover"],
        gross_return=gross, linear_cost=cost["linear_cost"], impact_cost=cost["impact_cost"],
        net_return=cost["net_return"], status=status, entry=entry,
        exit_reason=reason.astype(str), age=age, p_bull=p[start:].copy(),
        regime=regime_label(ex_ante),
    )
