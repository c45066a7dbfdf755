"""Assemble the analytics of a walk-forward run into a JSON-ready bundle."""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from .analytics.bootstrap import block_bootstrap_sharpe
from .analytics.capacity import CapacityResult, capacity_curve
from .analytics.metrics import attribution, perf_summary, tail_metrics, vol_scaling, yearly_summaries
from .analytics.regression import capm_regression
from .errors import DataError, NoPositiveBranch, TooShort
from .execution import DailyLedger
from .walkforward import WalkForwardResult


def jsonable(obj):
    """Recursively convert to plain JSON types; non-finite floats become ``None``."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.datetime64):
        return str(obj.astype("datetime64[D]"))
    if hasattr(obj, "to_dict"):
        return jsonable(obj.to_dict())
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def dumps(obj) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


@dataclass
class ReportBundle:
    summary: dict
    regression: dict | None
    bootstrap: dict | None
    tails: dict | None
    attribution: dict
    yearly: dict
    scaled: dict | None
    capacity: dict | None
    windows: list
    skipped: list
    settings: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return dumps(self.to_dict())


def benchmark_returns(ledger: DailyLedger, path: Path | None = None, column: str = "close") -> np.ndarray:
    """Benchmark daily returns on the ledger's dates.

    Without ``path`` the traded asset's own close-to-close return is used.
    """
    if path is None:
        return np.asarray(ledger.asset_return, dtype=float)
    try:
        frame = pd.read_csv(path, parse_dates=["date"])
    except (OSError, ValueError) as exc:
        raise DataError(f"cannot read benchmark {path}: {exc}") from None
    if column not in frame:
        raise DataError(f"benchmark {path} has no column {column!r}")
    px = frame.set_index("date")[column].sort_index()
    ret = px.pct_change()
    idx = pd.DatetimeIndex(ledger.dates.astype("datetime64[ns]"))
    out = ret.reindex(idx)
    if out.isna().any():
        raise DataError(f"benchmark {path} does not cover every ledger date")
    return out.to_numpy(dtype=float)


def capacity_inputs(result: WalkForwardResult, overrides: dict) -> tuple[float, float]:
    """Mean unit-sleeve moments across windows unless the config pins them."""
    mu_u = overrides.get("mu_u")
    sigma_u = overrides.get("sigma_u")
    if mu_u is None:
        mu_u = float(np.mean([p.mu_u for p in result.params]))
    if sigma_u is None:
        sigma_u = float(np.mean([p.sigma_u for p in result.params]))
    return float(mu_u), float(sigma_u)


def run_capacity(mu_u: float, sigma_u: float, k: float, gamma: float, n: float,
                 section: dict, mean_abs_turnover: float | None) -> tuple[CapacityResult, list[str]]:
    notes = []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", NoPositiveBranch)
        turnover = mean_abs_turnover if mean_abs_turnover and mean_abs_turnover > 0 else None
        res = capacity_curve(
            mu_u, sigma_u, k, gamma, n,
            adv_dollars=section["adv_dollars"] if turnover else None,
            mean_abs_turnover=turnover,
            reference_L_max=float(section["reference_l_max"]),
            reference_aum_max=float(section["reference_aum_max"]),
        )
    for w in caught:
        if issubclass(w.category, NoPositiveBranch):
            notes.append(f"capacity: {w.message}")
    if turnover is None:
        notes.append("capacity: zero mean turnover, AUM mapping skipped")
    return res, notes


def _capacity_dict(res: CapacityResult) -> dict:
    d = res.to_dict()
    d.pop("L_grid")
    d.pop("g_grid")
    return d


def build_report(result: WalkForwardResult, cfg, benchmark: np.ndarray | None = None) -> ReportBundle:
    """Every analytic of the stitched OOS ledger under the settings in ``cfg`` (a RunConfig)."""
    ledger = result.stitched
    a = cfg.section("analytics")
    notes = []
    summary = perf_summary(ledger, allow_zero_vol=True)

    bench = benchmark_returns(ledger) if benchmark is None else benchmark
    reg = None
    try:
        reg = capm_regression(ledger.net_return, bench, hac_lags=a["hac_lags"])
    except (TooShort, DataError) as exc:
        notes.append(f"regression skipped: {exc}")

    boot = None
    try:
        boot = block_bootstrap_sharpe(ledger.net_return, a["bootstrap_resamples"],
                                      a["bootstrap_block"], a["seed"])
    except TooShort as exc:
        notes.append(f"bootstrap skipped: {exc}")

    tails = None
    try:
        var95, cvar95, worst = tail_metrics(ledger.net_return, ledger.dates)
        tails = {"var95": var95, "cvar95": cvar95, "worst_month": worst}
    except TooShort as exc:
        notes.append(f"tail metrics skipped: {exc}")

    spans = {"full": (None, None)}
    for start in a["subperiod_starts"]:
        spans[f"{str(start)[:4]}+"] = (str(start), None)
    attr = attribution(ledger, spans)

    scaled = None
    if summary.ann_vol > 0 and reg is not None:
        scaled = vol_scaling(summary.ann_vol, summary.sharpe, reg.alpha_annual,
                             reg.information_ratio, a["report_target_vol"])

    strat = cfg.strategy()
    mu_u, sigma_u = capacity_inputs(result, cfg.section("capacity"))
    cap = None
    if sigma_u > 0:
        cap_res, cap_notes = run_capacity(mu_u, sigma_u, strat.costs.k, strat.costs.gamma,
                                          strat.kelly.n, cfg.section("capacity"),
                                          summary.mean_abs_turnover)
        cap = _capacity_dict(cap_res)
        notes.extend(cap_notes)

    windows = []
    for w, p, led in zip(result.windows, result.params, result.ledgers):
        windows.append({
            "index": w.index, "train_start": w.train_start, "test_start": w.test_start,
            "test_end": w.test_end, "oos_days": len(led), "params_digest": p.digest(),
            "params": p.to_dict(),
        })

    return ReportBundle(
        summary=summary.to_dict(),
        regression=reg.to_dict() if reg else None,
        bootstrap=boot.to_dict() if boot else None,
        tails=tails,
        attribution=attr,
        yearly={str(y): s for y, s in yearly_summaries(ledger).items()},
        scaled=scaled.to_dict() if scaled else None,
        capacity=cap,
        windows=windows,
        skipped=[{"index": i, "reason": why} for i, why in result.skipped],
        settings={"variant": result.variant.name, "latency": strat.latency.delay_days,
                  "hac_lags": a["hac_lags"], "bootstrap_seed": a["seed"],
                  "bootstrap_resamples": a["bootstrap_resamples"],
                  "bootstrap_block": a["bootstrap_block"]},
        notes=notes,
    )


def equity_frame(ledger: DailyLedger) -> pd.DataFrame:
    return pd.DataFrame({
        "date": ledger.dates.astype(str),
        "net_return": ledger.net_return,
        "equity": ledger.equity,
    })
