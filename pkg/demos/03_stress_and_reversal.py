"""
Cost, impact and latency stress, plus the mirrored and ablated variants.

Every cell reruns the full walk-forward. Multipliers scale the charged
frictions only, so all cells share one set of frozen parameters. A reduced
grid keeps the run short; the CLI ``stress`` command does the full 4x4x3.

    python demos/03_stress_and_reversal.py
"""

from pathlib import Path

import pandas as pd

from ftf import RunVariant, StrategyConfig, WindowSpec, load_csv, run_stress_grid

DATA = Path(__file__).resolve().parents[1] / "data" / "synthetic_trend.csv"
series = load_csv(DATA)
spec = WindowSpec(train_years=5, test_months=6, advance_months=6,
                  first_test_start=str(series.dates[0] + 5 * 366))
config = StrategyConfig()

rows = run_stress_grid(series, spec, config, cost_multipliers=(0.5, 2.0),
                       impact_multipliers=(0.5, 2.0), latencies=(0, 1, 2))
grid = pd.DataFrame(rows)
print(grid[["cost_multiplier", "impact_multiplier", "latency", "sharpe", "mean_net_return"]]
      .to_string(index=False, float_format="{:.4g}".format))

variants = [RunVariant(), RunVariant(reversed=True),
            RunVariant(ablation="slope_only"), RunVariant(ablation="momentum_only")]
table = pd.DataFrame(run_stress_grid(series, spec, config, variants=variants))
print()
print(table[["variant", "days", "sharpe", "mean_net_return", "mean_abs_turnover"]]
      .to_string(index=False, float_format="{:.4g}".format))
# On a persistent up-trend the mirrored book should lose what the full one earns.
