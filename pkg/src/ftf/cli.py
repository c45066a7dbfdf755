"""
Command-line front end.

    ftf backtest  --config cfg.toml --out dir
    ftf stress    --config cfg.toml --out dir
    ftf capacity  --config cfg.toml --out dir [--mu-u X --sigma-u Y]
    ftf spa       --config cfg.toml --out dir
    ftf gen-data  --out data/synthetic_gold.csv --seed 7

Exit codes: 0 success, 1 configuration error, 2 data error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import hashlib
import itertools
import platform
import subprocess
import sys
import warnings
from dataclasses import replace
from pathlib import Path

import numpy as np
import pandas as pd

from . import __version__
from .analytics.metrics import perf_summary
from .analytics.spa import spa_test
from .config import RunConfig
from .errors import ConfigError, DataError, FTFError
from .market_data import PriceSeries, align_calendar, business_days, load_csv, load_holidays, nyse_holidays, write_csv
from .report import benchmark_returns, build_report, capacity_inputs, dumps, equity_frame, run_capacity
from .synthetic import generate_prices, trending_prices
from .walkforward import RunVariant, walk_forward, run_stress_grid

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_RUNTIME = 0, 1, 2, 3
ABLATION_VARIANTS = (RunVariant(), RunVariant(ablation="slope_only"),
                     RunVariant(ablation="momentum_only"), RunVariant(reversed=True))


# ---------------------------------------------------------------------------
# Shared plumbing
# ---------------------------------------------------------------------------

def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _git_hash() -> str | None:
    try:
        out = subprocess.run(["git", "rev-parse", "HEAD"], capture_output=True, text=True,
                             timeout=5, cwd=Path(__file__).resolve().parent)
    except (OSError, subprocess.SubprocessError):
        return None
    return out.stdout.strip() or None if out.returncode == 0 else None


def load_config(args) -> RunConfig:
    cfg = RunConfig.load(args.config)
    raw = cfg.raw
    if getattr(args, "out", None):
        raw["output"]["dir"] = str(Path(args.out).resolve())
    if getattr(args, "seed", None) is not None:
        raw["analytics"]["seed"] = args.seed
    if getattr(args, "threads", None) is not None:
        raw["run"]["threads"] = args.threads
    cfg.validate()
    return cfg


def load_series(cfg: RunConfig) -> PriceSeries:
    d = cfg.section("data")
    path = cfg.data_path
    if not path.is_file():
        raise DataError(f"data file not found: {path}")
    series = load_csv(path, d["schema"])
    first, last = series.dates[0], series.dates[-1]
    if d["holidays_file"]:
        hol_path = cfg.resolve(d["holidays_file"])
        if not hol_path.is_file():
            raise DataError(f"holiday file not found: {hol_path}")
        return align_calendar(series, business_days(first, last, load_holidays(hol_path)), "custom")
    if d["calendar"] == "weekday":
        return align_calendar(series, business_days(first, last), "weekday")
    if d["calendar"] == "nyse":
        return align_calendar(series, business_days(first, last, nyse_holidays(first, last)), "nyse")
    return series


def _write_text(path: Path, text: str) -> None:
    path.write_text(text, encoding="utf-8", newline="\n")


def _write_frame(path: Path, frame: pd.DataFrame) -> None:
    frame.to_csv(path, index=False, float_format="%.17g", lineterminator="\n")


def write_manifest(out: Path, cfg: RunConfig, command: str, files: list[str], extra: dict | None = None) -> None:
    """Audit record; the only output that carries a timestamp."""
    manifest = {
        "command": command,
        "timestamp_utc": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        "package_version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "pandas": pd.__version__,
        "git_commit": _git_hash(),
        "config_hash": cfg.digest(),
        "config": cfg.raw,
        "data_path": str(cfg.data_path),
        "data_sha256": _sha256(cfg.data_path) if cfg.data_path.is_file() else None,
        "outputs": {name: _sha256(out / name) for name in files},
    }
    manifest.update(extra or {})
    _write_text(out / "manifest.json", dumps(manifest))


def _prepare(args):
    cfg = load_config(args)
    series = load_series(cfg)
    out = cfg.output_dir
    out.mkdir(parents=True, exist_ok=True)
    return cfg, series, out


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_backtest(args) -> int:
    cfg, series, out = _prepare(args)
    strat = cfg.strategy()
    result = walk_forward(series, cfg.window_spec(), strat, workers=cfg.section("run")["threads"])
    if result.stitched is None:
        raise ConfigError("windows.advance_months", "overlapping test slices cannot be stitched into one report")
    d = cfg.section("data")
    bench = None
    if d["benchmark_path"]:
        bench = benchmark_returns(result.stitched, cfg.resolve(d["benchmark_path"]), d["benchmark_column"])
    bundle = build_report(result, cfg, bench)
    _write_text(out / "report.json", bundle.to_json())
    result.stitched.to_csv(out / "ledger.csv")
    _write_frame(out / "equity.csv", equity_frame(result.stitched))
    write_manifest(out, cfg, "backtest", ["report.json", "ledger.csv", "equity.csv"],
                   {"windows": [{"index": w["index"], "test_start": w["test_start"],
                                 "test_end": w["test_end"], "params_digest": w["params_digest"]}
                                for w in bundle.windows]})
    s = bundle.summary
    print(f"backtest: {s['days']} OOS days, Sharpe {s['sharpe']:.3f}, "
          f"ann return {s['ann_return']:.4%}, max DD {s['max_drawdown']:.4%} -> {out}")
    for note in bundle.notes:
        print(f"note: {note}", file=sys.stderr)
    return EXIT_OK


def cmd_stress(args) -> int:
    cfg, series, out = _prepare(args)
    strat = cfg.strategy()
    spec = cfg.window_spec()
    st = cfg.section("stress")
    workers = cfg.section("run")["threads"]
    rows = run_stress_grid(series, spec, strat, st["cost_multipliers"], st["impact_multipliers"],
                           st["latencies"], workers=workers)
    for r in rows:
        r["grid"] = "cost_impact_latency"
    ablations = run_stress_grid(series, spec, strat, variants=ABLATION_VARIANTS, workers=workers)
    for r in ablations:
        r["grid"] = "ablation"
    frame = pd.DataFrame(rows + ablations)
    cols = ["grid", "variant", "cost_multiplier", "impact_multiplier", "latency"]
    frame = frame[cols + [c for c in frame.columns if c not in cols]]
    _write_frame(out / "stress_grid.csv", frame)
    write_manifest(out, cfg, "stress", ["stress_grid.csv"])
    print(f"stress: {len(rows)} grid cells + {len(ablations)} ablation rows -> {out / 'stress_grid.csv'}")
    return EXIT_OK


def cmd_capacity(args) -> int:
    cfg = load_config(args)
    section = dict(cfg.section("capacity"))
    if args.mu_u is not None:
        section["mu_u"] = args.mu_u
    if args.sigma_u is not None:
        section["sigma_u"] = args.sigma_u
    if args.adv is not None:
        section["adv_dollars"] = args.adv
    strat = cfg.strategy()
    turnover = args.turnover
    if section["mu_u"] is None or section["sigma_u"] is None or turnover is None:
        series = load_series(cfg)
        result = walk_forward(series, cfg.window_spec(), strat, workers=cfg.section("run")["threads"])
        mu_u, sigma_u = capacity_inputs(result, section)
        if turnover is None and result.stitched is not None:
            turnover = perf_summary(result.stitched, allow_zero_vol=True).mean_abs_turnover
    else:
        mu_u, sigma_u = float(section["mu_u"]), float(section["sigma_u"])
    if not sigma_u > 0:
        raise ConfigError("capacity.sigma_u", f"must be > 0, got {sigma_u!r}")

    res, notes = run_capacity(mu_u, sigma_u, strat.costs.k, strat.costs.gamma, strat.kelly.n,
                              section, turnover)
    out = cfg.output_dir
    out.mkdir(parents=True, exist_ok=True)
    _write_frame(out / "capacity_curve.csv", pd.DataFrame({"L": res.L_grid, "g": res.g_grid}))
    body = res.to_dict()
    body.pop("L_grid")
    body.pop("g_grid")
    body["notes"] = notes
    _write_text(out / "capacity.json", dumps(body))
    write_manifest(out, cfg, "capacity", ["capacity_curve.csv", "capacity.json"])
    for note in notes:
        print(f"warning: {note}", file=sys.stderr)
    print(f"capacity: L* = {res.L_star:.4g}, L_max = {res.L_max:.4g}, AUM_max = {res.aum_max:.4g}")
    if res.divergence_note():
        print(f"capacity: {res.divergence_note()}")
    return EXIT_OK


def spa_grid(section: dict) -> list[dict]:
    return [{"lambda_ema": lam, "momentum_window": k, "activation_threshold": thr}
            for lam, k, thr in itertools.product(section["lambda_grid"], section["momentum_grid"],
                                                 section["threshold_grid"])]


def cmd_spa(args) -> int:
    cfg = load_config(args)
    sp = cfg.section("spa")
    grid = spa_grid(sp)
    if len(grid) < 2:
        raise ConfigError("spa", f"candidate grid expands to {len(grid)} configuration(s); need >= 2")
    series = load_series(cfg)
    out = cfg.output_dir
    out.mkdir(parents=True, exist_ok=True)
    base = cfg.strategy()
    spec = cfg.window_spec()
    workers = cfg.section("run")["threads"]
    returns, dates = [], None
    for cand in grid:
        strat = replace(base, signal=replace(base.signal, **cand), lambda_grid=(), omega_grid=())
        res = walk_forward(series, spec, strat, workers=workers)
        if res.stitched is None:
            raise ConfigError("windows.advance_months", "SPA needs non-overlapping test slices")
        if dates is not None and not np.array_equal(dates, res.stitched.dates):
            raise FTFError("candidate configurations produced different OOS calendars")
        dates = res.stitched.dates
        returns.append(res.stitched.net_return)
    seed = cfg.section("analytics")["seed"]
    result = spa_test(np.vstack(returns), None, sp["resamples"], sp["block_length"], seed)
    body = result.to_dict()
    body["benchmark"] = "flat (zero return)"
    body["grid"] = grid
    _write_text(out / "spa.json", dumps(body))
    write_manifest(out, cfg, "spa", ["spa.json"])
    print(f"spa: {result.num_configs} configs, p = {result.p_value:.4f}, statistic = {result.statistic:.3f}")
    return EXIT_OK


def cmd_gen_data(args) -> int:
    if args.kind == "trend":
        series = trending_prices(seed=args.seed)
    else:
        series = generate_prices(seed=args.seed, start=args.start, end=args.end)
    out = Path(args.out or "synthetic_gold.csv")
    if out.is_dir() or not out.suffix:
        out.mkdir(parents=True, exist_ok=True)
        out = out / "synthetic_gold.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    write_csv(series, out)
    print(f"gen-data: {len(series)} bars {series.dates[0]}..{series.dates[-1]} -> {out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def _uint(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("must be an unsigned 64-bit integer")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ftf", description=__doc__.split("\n\n")[0].strip())
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed_default=None):
        p.add_argument("--config", help="TOML run configuration (defaults apply when omitted)")
        p.add_argument("--out", help="output directory (overrides output.dir)")
        p.add_argument("--seed", type=_uint, default=seed_default, help="master seed for resampling")
        p.add_argument("--threads", type=_positive_int, help="worker processes")
        return p

    common(sub.add_parser("backtest", help="walk-forward backtest and full report")).set_defaults(fn=cmd_backtest)
    common(sub.add_parser("stress", help="cost/impact/latency grid and ablations")).set_defaults(fn=cmd_stress)
    cap = common(sub.add_parser("capacity", help="growth curve and zero-growth capacity"))
    cap.add_argument("--mu-u", type=float, help="unit-sleeve mean daily return")
    cap.add_argument("--sigma-u", type=float, help="unit-sleeve daily return stdev")
    cap.add_argument("--adv", type=float, help="average daily dollar volume")
    cap.add_argument("--turnover", type=float, help="mean absolute daily weight change")
    cap.set_defaults(fn=cmd_capacity)
    common(sub.add_parser("spa", help="SPA test over the candidate grid")).set_defaults(fn=cmd_spa)

    gen = sub.add_parser("gen-data", help="write a seeded synthetic OHLC dataset")
    gen.add_argument("--out", help="CSV path or directory")
    gen.add_argument("--seed", type=_uint, default=7)
    gen.add_argument("--kind", choices=("regime", "trend"), default="regime")
    gen.add_argument("--start", default="2005-01-03")
    gen.add_argument("--end", default="2025-10-31")
    gen.add_argument("--threads", type=_positive_int, help="ignored; accepted for symmetry")
    gen.set_defaults(fn=cmd_gen_data)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except FTFError as exc:
        print(f"runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except Exception as exc:  # noqa: BLE001
        print(f"runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
