"""Walk-forward backtesting of a trend/momentum regime strategy with
volatility-targeted, friction-adjusted Kelly sizing and ATR trade management."""

from .execution import CostModel, DailyLedger, ExitParams, LatencyMode
from .market_data import PriceSeries, align_calendar, business_days, load_csv, simple_returns
from .signal import SignalParams, TrainStats, build_signal
from .sizing import KellyParams, TrainMoments, VolParams, kelly_fraction
from .walkforward import (
    FrozenParams,
    RunVariant,
    StrategyConfig,
    WindowSpec,
    fit_window,
    generate_windows,
    run_oos,
    run_stress_grid,
    stitch,
    walk_forward,
)

__version__ = "0.1.0"
