import math

import numpy as np
import pytest
from dataclasses import replace

from ftf.analytics.metrics import (
    annualized_expectancy,
    attribution,
    max_drawdown,
    perf_summary,
    scale_returns,
    tail_metrics,
    vol_scaling,
    yearly_summaries,
)
from ftf.errors import TooShort, ZeroVol
from ftf.execution import DailyLedger
from ftf.market_data import business_days

from oracles import drawdown_brute


def ledger_from(net, weights=None, start="2020-01-01", regime=None):
    net = np.asarray(net, dtype=float)
    n = net.size
    dates = business_days(start, np.datetime64(start) + 2 * n + 10)[:n]
    w = np.zeros(n) if weights is None else np.asarray(weights, dtype=float)
    z = np.zeros(n)
    return DailyLedger(dates, z, w, w, w, np.abs(np.diff(w, prepend=0.0)), net, z, z, net,
                       np.zeros(n, dtype=np.int8), np.zeros(n, dtype=bool), np.full(n, ""),
                       np.zeros(n, dtype=np.int32), z,
                       np.full(n, "chop") if regime is None else np.asarray(regime))


def test_drawdown_examples():
    assert max_drawdown(np.linspace(1, 3, 50)) == 0.0
    assert max_drawdown([1.0, 0.5, 1.0]) == 0.5


@pytest.mark.parametrize("seed", range(10))
def test_drawdown_vs_quadratic_scan(seed):
    rng = np.random.default_rng(seed)
    eq = np.cumprod(1 + rng.normal(0, 0.02, 500))
    assert max_drawdown(eq) == drawdown_brute(eq)


def test_cagr_doubling():
    net = np.full(252, 2 ** (1 / 252) - 1)
    net[::2] += 1e-9
    net[1::2] -= 1e-9
    s = perf_summary(ledger_from(net))
    assert s.cagr == pytest.approx(1.0, rel=1e-6)


def test_sharpe_hand_value():
    net = np.where(np.arange(1000) % 2 == 0, 2e-4, 0.0)  # mean 1bp, sd ~1bp
    s = perf_summary(ledger_from(net))
    expected = 1e-4 / np.std(net, ddof=1) * math.sqrt(252)
    assert s.sharpe == pytest.approx(expected, rel=1e-12)
    assert s.sharpe == pytest.approx(math.sqrt(252), rel=1e-3)


def test_zero_vol():
    with pytest.raises(ZeroVol):
        perf_summary(ledger_from(np.full(30, 1e-4)))
    assert math.isnan(perf_summary(ledger_from(np.zeros(30)), allow_zero_vol=True).sharpe)


def test_active_day_statistics():
    net = np.array([0.0, 2e-4, -1e-4, 3e-4, 0.0, 5e-5] * 10)
    w = np.array([0.0, 0.5, 0.5, 0.5, 0.0005, 0.5] * 10)
    s = perf_summary(ledger_from(net, w))
    assert s.active_days == 40
    assert s.hit_rate_active == pytest.approx(0.75)
    assert s.hit_rate_calendar == pytest.approx(0.5)
    assert s.hit_rate_calendar_nonzero == pytest.approx(0.75)
    assert s.avg_gain_bps == pytest.approx((2 + 3 + 0.5) / 3)
    assert s.avg_loss_bps == pytest.approx(-1.0)
    assert s.payoff_ratio == pytest.approx(((2 + 3 + 0.5) / 3) / 1.0)
    assert s.ev_per_active_day_bps == pytest.approx((2 - 1 + 3 + 0.5) / 4)


def test_expectancy_identity():
    assert annualized_expectancy(2.58, 1132, 2793) == pytest.approx(0.0263, abs=2e-4)


def test_raw_kurtosis_normal():
    net = np.random.default_rng(0).normal(0, 0.01, 200_000)
    assert perf_summary(ledger_from(net, start="1990-01-01")).kurtosis == pytest.approx(3.0, abs=0.05)


def test_tail_examples():
    alt = np.tile([1e-4, -1e-4], 50)
    var, cvar, _ = tail_metrics(alt)
    assert var == pytest.approx(1e-4) and cvar == pytest.approx(1e-4)
    pos = np.linspace(1e-4, 1e-3, 40)
    assert tail_metrics(pos)[:2] == (0.0, 0.0)
    with pytest.raises(TooShort):
        tail_metrics(np.zeros(19))


def test_var_sort_oracle():
    x = np.random.default_rng(3).uniform(-0.01, 0.01, 1000)
    s = np.sort(x)
    # linear interpolation at rank 0.05 * (n - 1)
    pos = 0.05 * (x.size - 1)
    q = s[int(pos)] + (pos - int(pos)) * (s[int(pos) + 1] - s[int(pos)])
    var, cvar, _ = tail_metrics(x)
    assert var == pytest.approx(-q, rel=1e-12)
    assert cvar == pytest.approx(-s[s <= q].mean(), rel=1e-12)


def test_worst_month():
    net = np.zeros(60)
    net[25] = -0.02
    net[26] = -0.01
    led = ledger_from(net, start="2021-01-01")
    worst = tail_metrics(led.net_return, led.dates)[2]
    assert worst == pytest.approx(0.98 * 0.99 - 1)


def test_attribution_partition():
    rng = np.random.default_rng(1)
    labels = rng.choice(["bull", "chop", "bear"], 300)
    net = np.where(labels == "bull", rng.normal(5e-4, 1e-4, 300), rng.normal(0, 1e-6, 300))
    led = ledger_from(net, regime=labels)
    out = attribution(led, {"full": (None, None), "late": ("2020-06-01", None)})
    assert sum(out["regime"][k].days for k in ("bull", "chop", "bear")) == 300
    assert out["regime"]["bull"].ann_return > 100 * abs(out["regime"]["chop"].ann_return)
    assert out["span"]["full"].days == 300
    all_bull = attribution(ledger_from(net, regime=np.full(300, "bull")))
    assert all_bull["regime"]["bull"] == perf_summary(ledger_from(net), allow_zero_vol=True)
    assert all_bull["regime"]["bear"] is None


def test_yearly_summaries_partition():
    led = ledger_from(np.random.default_rng(2).normal(0, 1e-3, 800), start="2019-01-01")
    ys = yearly_summaries(led)
    assert sum(s.days for s in ys.values()) == 800
    assert min(ys) == 2019


def test_vol_scaling_arithmetic():
    r = vol_scaling(0.0091, 2.88, 0.0225)
    assert r.scale == pytest.approx(16.48, abs=0.01)
    assert r.scaled_return == pytest.approx(0.432, abs=1e-12)
    assert r.scaled_alpha == pytest.approx(0.371, abs=1e-3)
    same = vol_scaling(0.15, 1.1, 0.02)
    assert same.scale == 1.0 and same.scaled_alpha == 0.02
    with pytest.raises(ZeroVol):
        vol_scaling(0.0, 1.0, 0.01)


def test_scaling_invariance():
    led = ledger_from(np.random.default_rng(4).normal(1e-4, 1e-3, 500))
    a = perf_summary(led)
    b = perf_summary(scale_returns(led, 3.7))
    assert b.sharpe == pytest.approx(a.sharpe, abs=1e-12)
    assert b.ann_return == pytest.approx(3.7 * a.ann_return, rel=1e-12)
    assert b.ann_vol == pytest.approx(3.7 * a.ann_vol, rel=1e-12)
