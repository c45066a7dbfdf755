import json

import pandas as pd
import pytest

from ftf.cli import main
from ftf.config import RunConfig, env_overrides
from ftf.errors import ConfigError

from conftest import DATA, ROOT

DEFAULT = ROOT / "configs" / "default.toml"


def write_cfg(tmp_path, body=""):
    p = tmp_path / "cfg.toml"
    p.write_text(f'[data]\npath = "{DATA / "synthetic_gold.csv"}"\n{body}', encoding="utf-8")
    return p


def test_defaults_load_and_hash_stable():
    a, b = RunConfig.load(DEFAULT, environ={}), RunConfig.load(DEFAULT, environ={})
    assert a.digest() == b.digest()
    assert a.strategy().latency.delay_days == 1
    assert a.strategy().kelly.k == a.strategy().costs.k == 7e-5


def test_env_override_and_parsing():
    env = {"FTF_SIGNAL__LAMBDA_EMA": "0.9", "FTF_STRESS__LATENCIES": "[0, 1]", "OTHER": "x"}
    assert env_overrides(env) == {"signal": {"lambda_ema": 0.9}, "stress": {"latencies": [0, 1]}}
    cfg = RunConfig.load(DEFAULT, environ=env)
    assert cfg.strategy().signal.lambda_ema == 0.9
    assert cfg.digest() != RunConfig.load(DEFAULT, environ={}).digest()


@pytest.mark.parametrize("body, field", [
    ("[signal]\nlambda_ema = 1.5\n", "signal.lambda_ema"),
    ("[vol]\ntheta = 0\n", "vol.theta"),
    ("[signal]\nbogus = 1\n", "signal.bogus"),
    ("[latency]\ndelay_days = 4\n", "latency"),
    ("[data]\ncalendar = 'moon'\n", "data.calendar"),
])
def test_validation_names_field(tmp_path, body, field):
    p = tmp_path / "bad.toml"
    p.write_text(body, encoding="utf-8")
    with pytest.raises(ConfigError) as info:
        RunConfig.load(p, environ={})
    assert field in str(info.value)


def test_backtest_outputs(tmp_path, capsys):
    out = tmp_path / "run"
    assert main(["backtest", "--config", str(write_cfg(tmp_path)), "--out", str(out)]) == 0
    for name in ("report.json", "ledger.csv", "equity.csv", "manifest.json"):
        assert (out / name).is_file()
    report = json.loads((out / "report.json").read_text())
    assert report["summary"]["days"] == 2726
    assert report["bootstrap"]["resamples"] == 1000 and report["bootstrap"]["block_length"] == 20
    assert set(report["attribution"]["span"]) == {"full", "2019+", "2022+"}
    manifest = json.loads((out / "manifest.json").read_text())
    assert len(manifest["data_sha256"]) == 64 and len(manifest["config_hash"]) == 64
    assert len(manifest["windows"]) == 22
    ledger = pd.read_csv(out / "ledger.csv")
    assert len(ledger) == 2726 and "exit_reason" in ledger


def test_exit_codes(tmp_path, capsys):
    missing = tmp_path / "m.toml"
    missing.write_text('[data]\npath = "nope.csv"\n', encoding="utf-8")
    assert main(["backtest", "--config", str(missing), "--out", str(tmp_path)]) == 2
    bad = write_cfg(tmp_path, "[signal]\nlambda_ema = 1.5\n")
    assert main(["backtest", "--config", str(bad), "--out", str(tmp_path)]) == 1
    assert "signal.lambda_ema" in capsys.readouterr().err
    corrupt = tmp_path / "bad.csv"
    corrupt.write_text("date,open,high,low,close\n2020-01-02,1,1,1,0\n", encoding="utf-8")
    cfg = tmp_path / "c.toml"
    cfg.write_text(f'[data]\npath = "{corrupt}"\n', encoding="utf-8")
    assert main(["backtest", "--config", str(cfg), "--out", str(tmp_path)]) == 2
    short = tmp_path / "short.csv"
    short.write_text("date,open,high,low,close\n2020-01-02,1,1,1,1\n2020-01-03,1,1,1,1\n", encoding="utf-8")
    cfg.write_text(f'[data]\npath = "{short}"\n[windows]\nfirst_test_start = "2020-01-03"\ntrain_years = 1\n',
                   encoding="utf-8")
    assert main(["backtest", "--config", str(cfg), "--out", str(tmp_path)]) == 2
    assert "training must start" in capsys.readouterr().err


def test_capacity_command(tmp_path, capsys):
    out = tmp_path / "cap"
    code = main(["capacity", "--config", str(write_cfg(tmp_path)), "--out", str(out),
                 "--mu-u", "1e-4", "--sigma-u", "5.7e-4", "--turnover", "0.066"])
    assert code == 0
    curve = pd.read_csv(out / "capacity_curve.csv")
    assert curve.iloc[0].tolist() == [0.0, 0.0]
    body = json.loads((out / "capacity.json").read_text())
    assert 2.0e-6 <= body["L_max"] <= 3.5e-6
    assert body["reference_L_max"] == 2.9e-6 and body["reference_aum_max"] == 7.6e8
    assert "reference" in body["divergence_note"]
    code = main(["capacity", "--config", str(write_cfg(tmp_path)), "--out", str(out),
                 "--mu-u", "5e-5", "--sigma-u", "5.7e-4", "--turnover", "0.066"])
    assert code == 0
    assert json.loads((out / "capacity.json").read_text())["L_max"] == 0.0
    assert "capacity is zero" in capsys.readouterr().err


def test_spa_command(tmp_path):
    grid = ("[spa]\nlambda_grid = [0.9, 0.94]\nmomentum_grid = [50]\nthreshold_grid = [0.52]\n"
            "resamples = 100\n")
    out = tmp_path / "spa"
    assert main(["spa", "--config", str(write_cfg(tmp_path, grid)), "--out", str(out), "--seed", "3"]) == 0
    first = (out / "spa.json").read_bytes()
    assert json.loads(first)["num_configs"] == 2
    assert main(["spa", "--config", str(write_cfg(tmp_path, grid)), "--out", str(out), "--seed", "3"]) == 0
    assert (out / "spa.json").read_bytes() == first
    single = "[spa]\nlambda_grid = [0.9]\nmomentum_grid = [50]\nthreshold_grid = [0.52]\n"
    assert main(["spa", "--config", str(write_cfg(tmp_path, single)), "--out", str(out)]) == 1


def test_stress_command(tmp_path):
    small = ("[stress]\ncost_multipliers = [1.0, 2.0]\nimpact_multipliers = [1.0]\nlatencies = [1]\n")
    out = tmp_path / "st"
    assert main(["stress", "--config", str(write_cfg(tmp_path, small)), "--out", str(out)]) == 0
    frame = pd.read_csv(out / "stress_grid.csv")
    assert len(frame) == 2 + 4
    assert frame[frame.grid == "ablation"].variant.tolist() == ["full", "slope_only", "momentum_only", "reversed"]


def test_gen_data(tmp_path):
    p = tmp_path / "g.csv"
    assert main(["gen-data", "--out", str(p), "--seed", "7"]) == 0
    assert p.read_bytes() == (DATA / "synthetic_gold.csv").read_bytes()
