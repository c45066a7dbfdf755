"""
Run configuration: a nested TOML file, environment overrides, validation.

Environment variables named ``FTF_<SECTION>__<KEY>`` override the file,
e.g. ``FTF_SIGNAL__LAMBDA_EMA=0.9``. Values are parsed as TOML literals and
fall back to plain strings.
"""

from __future__ import annotations

import copy
import hashlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .errors import ConfigError
from .execution import CostModel, ExitParams, LatencyMode
from .signal import SignalParams
from .sizing import KellyParams, VolParams
from .walkforward import StrategyConfig, WindowSpec

ENV_PREFIX = "FTF_"

DEFAULTS: dict[str, dict[str, Any]] = {
    "data": {
        "path": "data/synthetic_gold.csv",
        "schema": {"date": "date", "open": "open", "high": "high", "low": "low", "close": "close"},
        "calendar": "nyse",             # weekday | nyse | none
        "holidays_file": "",
        "benchmark_path": "",
        "benchmark_column": "close",
    },
    "windows": {"train_years": 10, "test_months": 6, "advance_months": 6,
                "first_test_start": "2015-01-01"},
    "signal": {"lambda_ema": 0.94, "momentum_window": 50, "omega": 0.6,
               "activation_threshold": 0.52, "lambda_grid": [], "omega_grid": []},
    "vol": {"theta": 0.94, "target_vol_annual": 0.15, "trading_days": 252, "max_leverage": 2.0},
    "kelly": {"n": 1.0, "lambda_kelly": 0.40, "baseline_fraction": 0.25,
              "f_star_epsilon": 1e-6, "baseline_mode": "conf"},
    "exits": {"atr_window": 14, "hard_stop_mult": 2.0, "trail_stop_mult": 1.5,
              "timeout_days": 30, "derisk_threshold": 0.5, "derisk_mode": "halve",
              "stop_trigger": "close"},
    "costs": {"k": 7e-5, "gamma": 0.02, "cost_multiplier": 1.0, "impact_multiplier": 1.0},
    "latency": {"delay_days": 1},
    "analytics": {"bootstrap_resamples": 1000, "bootstrap_block": 20, "hac_lags": 5,
                  "seed": 20251031, "report_target_vol": 0.15,
                  "subperiod_starts": ["2019-01-01", "2022-01-01"]},
    "capacity": {"adv_dollars": 5e10, "mu_u": None, "sigma_u": None,
                 "reference_l_max": 2.9e-6, "reference_aum_max": 7.6e8},
    "stress": {"cost_multipliers": [0.5, 1.0, 1.5, 2.0],
               "impact_multipliers": [0.5, 1.0, 1.5, 2.0], "latencies": [0, 1, 2]},
    "spa": {"lambda_grid": [0.85, 0.90, 0.94, 0.97], "momentum_grid": [20, 50, 100, 150],
            "threshold_grid": [0.52, 0.55, 0.60, 0.65], "resamples": 800, "block_length": 20},
    "output": {"dir": "out"},
    "run": {"threads": 1},
}


def _merge(base: dict, override: Mapping, prefix: str = "") -> dict:
    out = copy.deepcopy(base)
    for key, val in override.items():
        name = f"{prefix}{key}"
        if key not in out:
            raise ConfigError(name, "unknown key")
        if isinstance(out[key], dict) and key != "schema":
            if not isinstance(val, Mapping):
                raise ConfigError(name, "expected a table")
            out[key] = _merge(out[key], val, f"{name}.")
        elif key == "schema":
            out[key] = {**out[key], **dict(val)}
        else:
            out[key] = val
    return out


def _parse_env_value(text: str):
    try:
        return tomllib.loads(f"v = {text}")["v"]
    except tomllib.TOMLDecodeError:
        return text


def env_overrides(environ: Mapping[str, str] | None = None) -> dict:
    environ = os.environ if environ is None else environ
    out: dict = {}
    for name, raw in environ.items():
        if not name.startswith(ENV_PREFIX) or "__" not in name:
            continue
        section, _, key = name[len(ENV_PREFIX):].lower().partition("__")
        out.setdefault(section, {})[key] = _parse_env_value(raw)
    return out


@dataclass
class RunConfig:
    raw: dict
    base_dir: Path = field(default_factory=Path.cwd)

    # -- construction -----------------------------------------------------
    @classmethod
    def from_mapping(cls, mapping: Mapping | None = None, base_dir: str | Path | None = None,
                     environ: Mapping[str, str] | None = None) -> "RunConfig":
        merged = _merge(DEFAULTS, mapping or {})
        merged = _merge(merged, env_overrides(environ))
        cfg = cls(merged, Path(base_dir) if base_dir else Path.cwd())
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path: str | Path | None, environ: Mapping[str, str] | None = None) -> "RunConfig":
        if path is None:
            return cls.from_mapping({}, environ=environ)
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError("--config", f"cannot read {path}: {exc.strerror}") from None
        try:
            mapping = tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError("--config", f"invalid TOML: {exc}") from None
        return cls.from_mapping(mapping, base_dir=path.parent, environ=environ)

    # -- typed views ------------------------------------------------------
    def section(self, name: str) -> dict:
        return self.raw[name]

    def _build(self, cls, section: str, **extra):
        values = {**self.raw[section], **extra}
        try:
            return cls(**values)
        except TypeError as exc:
            raise ConfigError(section, str(exc)) from None

    def strategy(self) -> StrategyConfig:
        sig = dict(self.raw["signal"])
        lambda_grid = tuple(sig.pop("lambda_grid"))
        omega_grid = tuple(sig.pop("omega_grid"))
        try:
            signal = SignalParams(**sig)
        except TypeError as exc:
            raise ConfigError("signal", str(exc)) from None
        for lam in lambda_grid:
            SignalParams(lambda_ema=lam)
        for om in omega_grid:
            if not 0 <= om <= 1:
                raise ConfigError("signal.omega_grid", f"entries must lie in [0, 1], got {om!r}")
        costs = self._build(CostModel, "costs")
        kelly = self._build(KellyParams, "kelly", k=costs.k, gamma=costs.gamma)
        return StrategyConfig(
            signal=signal,
            vol=self._build(VolParams, "vol"),
            kelly=kelly,
            exits=self._build(ExitParams, "exits"),
            costs=costs,
            latency=self._build(LatencyMode, "latency"),
            lambda_grid=lambda_grid,
            omega_grid=omega_grid,
        )

    def window_spec(self) -> WindowSpec:
        return self._build(WindowSpec, "windows")

    def resolve(self, value: str) -> Path:
        p = Path(value)
        return p if p.is_absolute() else self.base_dir / p

    @property
    def data_path(self) -> Path:
        return self.resolve(self.raw["data"]["path"])

    @property
    def output_dir(self) -> Path:
        return self.resolve(self.raw["output"]["dir"])

    def validate(self) -> None:
        self.strategy()
        self.window_spec()
        cal = self.raw["data"]["calendar"]
        if cal not in ("weekday", "nyse", "none"):
            raise ConfigError("data.calendar", f"must be weekday, nyse or none, got {cal!r}")
        a = self.raw["analytics"]
        for key in ("bootstrap_resamples", "bootstrap_block", "hac_lags"):
            if not (isinstance(a[key], int) and a[key] >= (0 if key == "hac_lags" else 1)):
                raise ConfigError(f"analytics.{key}", f"must be a non-negative integer, got {a[key]!r}")
        if not (isinstance(a["seed"], int) and a["seed"] >= 0):
            raise ConfigError("analytics.seed", f"must be an unsigned integer, got {a['seed']!r}")
        s = self.raw["stress"]
        for key in ("cost_multipliers", "impact_multipliers"):
            if not s[key] or any(not (isinstance(v, (int, float)) and v >= 0) for v in s[key]):
                raise ConfigError(f"stress.{key}", "must be a nonempty list of non-negative numbers")
        for lat in s["latencies"]:
            try:
                LatencyMode(lat)
            except ConfigError:
                raise ConfigError("stress.latencies", f"entries must be 0, 1 or 2, got {lat!r}") from None
        spa = self.raw["spa"]
        for lam in spa["lambda_grid"]:
            if not 0 < lam < 1:
                raise ConfigError("spa.lambda_grid", f"entries must lie in (0, 1), got {lam!r}")
        for k in spa["momentum_grid"]:
            if not (isinstance(k, int) and k >= 1):
                raise ConfigError("spa.momentum_grid", f"entries must be integers >= 1, got {k!r}")
        for thr in spa["threshold_grid"]:
            if not 0.5 < thr <= 1:
                raise ConfigError("spa.threshold_grid", f"entries must lie in (0.5, 1], got {thr!r}")
        adv = self.raw["capacity"]["adv_dollars"]
        if not (isinstance(adv, (int, float)) and adv > 0):
            raise ConfigError("capacity.adv_dollars", f"must be > 0, got {adv!r}")
        threads = self.raw["run"]["threads"]
        if not (isinstance(threads, int) and threads >= 1):
            raise ConfigError("run.threads", f"must be an integer >= 1, got {threads!r}")

    def to_json(self) -> str:
        return json.dumps(self.raw, sort_keys=True, separators=(",", ":"))

    def digest(self) -> str:
        return hashlib.sha256(self.to_json().encode()).hexdigest()
