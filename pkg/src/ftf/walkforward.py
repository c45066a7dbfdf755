"""
Rolling train -> freeze -> test evaluation.

Each window fits every data-dependent quantity on its training slice and
freezes it in a :class:`FrozenParams`. The out-of-sample run recomputes the
recursive filters (EMA, EWMA variance, ATR) forward from the start of the
training slice, so the first test day sees exactly the filter state a
continuous computation would have reached, while every parameter comes from
the frozen bundle.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Sequence

import numpy as np
import pandas as pd

from .errors import ConfigError, DegenerateTraining, InsufficientHistory, OverlapInStitch
from .execution import (
    CostModel,
    DailyLedger,
    ExitParams,
    LatencyMode,
    atr,
    simulate_path,
    true_range_series,
)
from .market_data import PriceSeries
from .signal import (
    SignalParams,
    TrainStats,
    build_signal,
    ema_smooth,
    entry_gate,
    fit_train_stats,
)
from .sizing import (
    KellyParams,
    VolParams,
    confidence_weight,
    ewma_variance,
    final_weight,
    kelly_root,
    vol_target_weight,
)

ABLATIONS = ("full", "slope_only", "momentum_only")


@dataclass(frozen=True)
class WindowSpec:
    train_years: int = 10
    test_months: int = 6
    advance_months: int = 6
    first_test_start: str = "2015-01-01"
    # calendar days the data may start after the nominal train start (holidays)
    history_grace_days: int = 7

    def __post_init__(self):
        if not self.train_years > 0:
            raise ConfigError("windows.train_years", f"must be > 0, got {self.train_years!r}")
        if not self.test_months > 0:
            raise ConfigError("windows.test_months", f"must be > 0, got {self.test_months!r}")
        if not 0 < self.advance_months <= self.test_months:
            raise ConfigError("windows.advance_months",
                              f"must lie in (0, test_months], got {self.advance_months!r}")

    @property
    def overlapping(self) -> bool:
        return self.advance_months < self.test_months


@dataclass(frozen=True)
class Window:
    index: int
    train_start: np.datetime64
    test_start: np.datetime64
    test_end: np.datetime64          # exclusive
    train: slice                     # positions in the series
    test: slice

    @property
    def label(self) -> str:
        return f"{self.test_start}..{self.test_end}"


@dataclass(frozen=True)
class RunVariant:
    latency: int | None = None      # None -> the config's latency mode
    reversed: bool = False
    ablation: str = "full"
    cost_multiplier: float = 1.0
    impact_multiplier: float = 1.0

    def __post_init__(self):
        if self.ablation not in ABLATIONS:
            raise ConfigError("variant.ablation", f"must be one of {ABLATIONS}, got {self.ablation!r}")
        if self.latency is not None:
            LatencyMode(self.latency)

    @property
    def direction(self) -> int:
        return -1 if self.reversed else 1

    @property
    def name(self) -> str:
        return "reversed" if self.reversed else self.ablation


@dataclass(frozen=True)
class StrategyConfig:
    signal: SignalParams = SignalParams()
    vol: VolParams = VolParams()
    kelly: KellyParams = KellyParams()
    exits: ExitParams = ExitParams()
    costs: CostModel = CostModel()
    latency: LatencyMode = LatencyMode(1)
    lambda_grid: tuple = ()
    omega_grid: tuple = ()


@dataclass(frozen=True)
class FrozenParams:
    window: int
    direction: int
    lambda_ema: float
    omega: float
    momentum_window: int
    activation_threshold: float
    mu_train: float
    sigma_train: float
    atr_window: int
    hard_stop_mult: float
    trail_stop_mult: float
    timeout_days: int
    derisk_threshold: float
    derisk_mode: str
    lambda_kelly: float
    f_star: float
    mu: float
    sigma: float
    mu_u: float
    sigma_u: float
    theta: float
    seed_variance: float

    def to_dict(self) -> dict:
        return asdict(self)

    def digest(self) -> str:
        text = json.dumps(self.to_dict(), sort_keys=True, allow_nan=True)
        return hashlib.sha256(text.encode()).hexdigest()

    @property
    def signal_params(self) -> SignalParams:
        return SignalParams(self.lambda_ema, self.momentum_window, self.omega, self.activation_threshold)

    @property
    def train_stats(self) -> TrainStats:
        return TrainStats(self.mu_train, self.sigma_train)

    def exit_params(self, base: ExitParams) -> ExitParams:
        return replace(base, atr_window=self.atr_window, hard_stop_mult=self.hard_stop_mult,
                       trail_stop_mult=self.trail_stop_mult, timeout_days=self.timeout_days,
                       derisk_threshold=self.derisk_threshold, derisk_mode=self.derisk_mode)


# ---------------------------------------------------------------------------
# Windows
# ---------------------------------------------------------------------------

def generate_windows(dates, spec: WindowSpec, end=None) -> list[Window]:
    """Tile ``[first_test_start, end]`` with test slices, each preceded by its train slice."""
    dates = np.asarray(dates, dtype="datetime64[D]")
    if len(dates) == 0:
        raise InsufficientHistory("empty date range")
    last = np.datetime64(end, "D") if end is not None else dates[-1]
    first_test = pd.Timestamp(spec.first_test_start)
    windows = []
    for i in itertools.count():
        test_start = first_test + pd.DateOffset(months=i * spec.advance_months)
        ts = np.datetime64(test_start.date(), "D")
        if ts > last:
            break
        te = np.datetime64((test_start + pd.DateOffset(months=spec.test_months)).date(), "D")
        te = min(te, last + 1)
        tr = np.datetime64((test_start - pd.DateOffset(years=spec.train_years)).date(), "D")
        if dates[0] > tr + spec.history_grace_days:
            raise InsufficientHistory(
                f"window {i}: training must start by {tr} but data begin {dates[0]}")
        a, b, c = np.searchsorted(dates, [tr, ts, te])
        if c <= b:
            continue
        windows.append(Window(len(windows), tr, ts, te, slice(int(a), int(b)), slice(int(b), int(c))))
    if not windows:
        raise InsufficientHistory("no test window intersects the data")
    return windows


# ---------------------------------------------------------------------------
# Fit
# ---------------------------------------------------------------------------

def _signal_params_for(variant: RunVariant, base: SignalParams, lam: float, omega: float) -> SignalParams:
    if variant.ablation == "slope_only":
        omega = 1.0
    elif variant.ablation == "momentum_only":
        omega = 0.0
    return replace(base, lambda_ema=lam, omega=omega)


def _slope_stats(close, lam: float) -> TrainStats:
    y_tilde = ema_smooth(np.log(close), lam)
    return fit_train_stats(np.diff(y_tilde))


def _unit_rule_returns(train: PriceSeries, params: SignalParams, stats: TrainStats,
                       direction: int) -> np.ndarray:
    sig = build_signal(train, params, stats)
    gate = entry_gate(sig, params.activation_threshold, direction).astype(float)
    r = train.close[1:] / train.close[:-1] - 1.0
    return direction * gate[:-1] * r


def _sharpe(x) -> float:
    s = np.std(x)
    return float(np.mean(x) / s) if s > 0 else -math.inf


def fit_window(series: PriceSeries, window: Window, config: StrategyConfig,
               variant: RunVariant = RunVariant()) -> FrozenParams:
    """Estimate and freeze every data-dependent parameter on the training slice."""
    train = series[window.train]
    if len(train) < 2:
        raise InsufficientHistory(f"window {window.index}: empty training slice")
    if len(train) <= max(config.signal.momentum_window, config.exits.atr_window) + 1:
        raise InsufficientHistory(f"window {window.index}: training slice shorter than warm-ups")
    direction = variant.direction

    lambdas = tuple(config.lambda_grid) or (config.signal.lambda_ema,)
    omegas = tuple(config.omega_grid) or (config.signal.omega,)
    if variant.ablation != "full":
        omegas = omegas[:1]
    best = None
    for lam, om in itertools.product(lambdas, omegas):
        params = _signal_params_for(variant, config.signal, lam, om)
        stats = _slope_stats(train.close, lam)
        score = _sharpe(_unit_rule_returns(train, params, stats, direction))
        if best is None or score > best[0]:
            best = (score, params, stats)
    _, sparams, stats = best

    rule = _unit_rule_returns(train, sparams, stats, direction)
    mu, sigma = float(np.mean(rule)), float(np.std(rule))

    # unit-notional managed sleeve: weight 1 through the full exit logic, no costs
    sig = build_signal(train, sparams, stats)
    tr_atr = atr(true_range_series(train), config.exits.atr_window)
    sleeve = simulate_path(train, sig, np.ones(len(train)), tr_atr, config.exits,
                           CostModel(0.0, 0.0), LatencyMode(0), sparams.activation_threshold,
                           direction)
    mu_u, sigma_u = float(np.mean(sleeve.gross_return)), float(np.std(sleeve.gross_return))

    k = config.kelly
    f_star = kelly_root(mu, sigma, k.k, k.gamma, k.n) if sigma > 0 else 0.0
    r = train.close[1:] / train.close[:-1] - 1.0
    ex = config.exits
    return FrozenParams(
        window=window.index, direction=direction,
        lambda_ema=sparams.lambda_ema, omega=sparams.omega,
        momentum_window=sparams.momentum_window,
        activation_threshold=sparams.activation_threshold,
        mu_train=stats.mu_train, sigma_train=stats.sigma_train,
        atr_window=ex.atr_window, hard_stop_mult=ex.hard_stop_mult,
        trail_stop_mult=ex.trail_stop_mult, timeout_days=ex.timeout_days,
        derisk_threshold=ex.derisk_threshold, derisk_mode=ex.derisk_mode,
        lambda_kelly=k.lambda_kelly, f_star=f_star, mu=mu, sigma=sigma,
        mu_u=mu_u, sigma_u=sigma_u, theta=config.vol.theta,
        seed_variance=float(np.var(r)),
    )


# ---------------------------------------------------------------------------
# Out-of-sample
# ---------------------------------------------------------------------------

def target_weights(span: PriceSeries, sig, params: FrozenParams, config: StrategyConfig) -> np.ndarray:
    """Pre-gating sized weight for each day of ``span`` under frozen parameters."""
    r = span.close[1:] / span.close[:-1] - 1.0
    var_next = np.empty(len(span))
    var_next[0] = params.seed_variance
    var_next[1:] = ewma_variance(r, params.theta, params.seed_variance)
    w_vol = vol_target_weight(np.sqrt(var_next), config.vol)
    p_own = sig.p_bull if params.direction > 0 else sig.p_bear
    w_conf = confidence_weight(w_vol, np.nan_to_num(p_own, nan=0.5))
    kelly = replace(config.kelly, lambda_kelly=params.lambda_kelly)
    return final_weight(params.f_star, w_conf, w_vol, sig.tradeable, kelly, config.vol)


def run_oos(series: PriceSeries, window: Window, params: FrozenParams, config: StrategyConfig,
            variant: RunVariant = RunVariant()) -> DailyLedger:
    """Simulate the test slice of ``window`` with ``params`` held fixed.

    ``series`` must contain the training slice as well; those days only
    advance the recursive filters. The slice starts flat and is closed out
    on its last day.
    """
    start = window.train.start
    span = series[start:window.test.stop]
    sig = build_signal(span, params.signal_params, params.train_stats)
    exits = params.exit_params(config.exits)
    span_atr = atr(true_range_series(span), exits.atr_window)
    targets = target_weights(span, sig, params, config)
    costs = replace(config.costs, cost_multiplier=variant.cost_multiplier,
                    impact_multiplier=variant.impact_multiplier)
    latency = config.latency if variant.latency is None else LatencyMode(variant.latency)
    ledger = simulate_path(span, sig, targets, span_atr, exits, costs, latency,
                           params.activation_threshold, params.direction,
                           start=window.test.start - start, flatten_at_end=True)
    ledger.meta.update(window=window.index, params_digest=params.digest())
    return ledger


def stitch(ledgers: Sequence[DailyLedger]) -> DailyLedger:
    """Concatenate disjoint, time-ordered OOS slices into one ledger."""
    if not ledgers:
        raise ValueError("nothing to stitch")
    for a, b in zip(ledgers, ledgers[1:]):
        if len(a) and len(b) and b.dates[0] <= a.dates[-1]:
            raise OverlapInStitch(f"slice starting {b.dates[0]} overlaps slice ending {a.dates[-1]}")
    return DailyLedger.concat(list(ledgers))


# ---------------------------------------------------------------------------
# Orchestration
# ---------------------------------------------------------------------------

@dataclass
class WalkForwardResult:
    windows: list[Window]
    params: list[FrozenParams]
    ledgers: list[DailyLedger]
    variant: RunVariant
    stitched: DailyLedger | None = None
    skipped: list[tuple[int, str]] = field(default_factory=list)


def _fit_task(args):
    series, window, config, variant = args
    try:
        return fit_window(series, window, config, variant), None
    except DegenerateTraining as exc:
        return None, str(exc)


def _map(fn, items, workers: int):
    if workers and workers > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def fit_all(series: PriceSeries, windows: Sequence[Window], config: StrategyConfig,
            variant: RunVariant = RunVariant(), workers: int = 1):
    """Fit every window; degenerate windows come back as ``None`` with a reason."""
    return _map(_fit_task, [(series, w, config, variant) for w in windows], workers)


def run_windows(series: PriceSeries, windows: Sequence[Window], fits, config: StrategyConfig,
                variant: RunVariant = RunVariant(), stitch_slices: bool | None = None) -> WalkForwardResult:
    kept_w, kept_p, ledgers, skipped = [], [], [], []
    for w, (p, why) in zip(windows, fits):
        if p is None:
            skipped.append((w.index, why))
            continue
        kept_w.append(w)
        kept_p.append(p)
        ledgers.append(run_oos(series, w, p, config, variant))
    if not ledgers:
        raise DegenerateTraining("every window was degenerate")
    result = WalkForwardResult(kept_w, kept_p, ledgers, variant, skipped=skipped)
    if stitch_slices is None:
        stitch_slices = all(a.test_end <= b.test_start for a, b in zip(kept_w, kept_w[1:]))
    if stitch_slices:
        result.stitched = stitch(ledgers)
    return result


def walk_forward(series: PriceSeries, spec: WindowSpec, config: StrategyConfig,
                 variant: RunVariant = RunVariant(), workers: int = 1) -> WalkForwardResult:
    """Fit and test every window. Overlapping specs return per-slice ledgers only."""
    windows = generate_windows(series.dates, spec)
    fits = fit_all(series, windows, config, variant, workers)
    return run_windows(series, windows, fits, config, variant,
                       stitch_slices=None if not spec.overlapping else False)


def _cell_task(args):
    series, windows, fits, config, variant = args
    from .analytics.metrics import perf_summary

    res = run_windows(series, windows, fits, config, variant, stitch_slices=True)
    summary = perf_summary(res.stitched, allow_zero_vol=True)
    return {
        "variant": variant.name, "cost_multiplier": variant.cost_multiplier,
        "impact_multiplier": variant.impact_multiplier,
        "latency": config.latency.delay_days if variant.latency is None else variant.latency,
        "days": summary.days, "sharpe": summary.sharpe, "ann_return": summary.ann_return,
        "ann_vol": summary.ann_vol, "max_drawdown": summary.max_drawdown,
        "mean_net_return": float(np.mean(res.stitched.net_return)),
        "mean_abs_turnover": summary.mean_abs_turnover,
    }


def run_stress_grid(series: PriceSeries, spec: WindowSpec, config: StrategyConfig,
                    cost_multipliers=(0.5, 1.0, 1.5, 2.0), impact_multipliers=(0.5, 1.0, 1.5, 2.0),
                    latencies=(0, 1, 2), variants: Sequence[RunVariant] | None = None,
                    workers: int = 1) -> list[dict]:
    """One full OOS run per grid cell; rows come back in cartesian order.

    Cost and impact multipliers only scale the charged frictions. Sizing
    keeps the base ``k`` and ``gamma``, so every cell shares one set of
    frozen parameters per signal variant.
    """
    windows = generate_windows(series.dates, spec)
    if variants is None:
        variants = [RunVariant(latency=lat, cost_multiplier=c, impact_multiplier=i)
                    for c, i, lat in itertools.product(cost_multipliers, impact_multipliers, latencies)]
    fit_cache = {}
    tasks = []
    for v in variants:
        key = (v.reversed, v.ablation)
        if key not in fit_cache:
            fit_cache[key] = fit_all(series, windows, config, RunVariant(reversed=v.reversed, ablation=v.ablation), workers)
        tasks.append((series, windows, fit_cache[key], config, v))
    return _map(_cell_task, tasks, workers)
