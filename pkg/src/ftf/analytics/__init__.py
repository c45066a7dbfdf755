from .bootstrap import BootstrapResult, block_bootstrap_sharpe
from .capacity import CapacityResult, aum_mapping, capacity_curve, zero_growth_point
from .metrics import (
    PerfSummary,
    ScaledReport,
    annualized_expectancy,
    attribution,
    max_drawdown,
    perf_summary,
    tail_metrics,
    vol_scaling,
    yearly_summaries,
)
from .regression import RegressionResult, capm_regression
from .spa import SpaResult, spa_test

__all__ = [
    "BootstrapResult", "CapacityResult", "PerfSummary", "RegressionResult", "ScaledReport",
    "SpaResult", "annualized_expectancy", "attribution", "aum_mapping", "block_bootstrap_sharpe",
    "capacity_curve", "capm_regression", "max_drawdown", "perf_summary", "spa_test",
    "tail_metrics", "vol_scaling", "yearly_summaries", "zero_growth_point",
]
