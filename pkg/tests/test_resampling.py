import numpy as np
import pytest

from ftf.analytics.bootstrap import (
    annualized_sharpe,
    block_bootstrap_sharpe,
    circular_block_indices,
    stationary_indices,
)
from ftf.analytics.spa import spa_test, stationary_kernel_variance
from ftf.errors import DegenerateLoss, TooShort


def test_circular_indices_are_wrapped_blocks():
    idx = circular_block_indices(50, 7, 20, np.random.default_rng(0))
    assert idx.shape == (20, 50)
    steps = (np.diff(idx, axis=1) % 50)[:, :6]
    assert np.all(steps == 1)


def test_stationary_indices_mean_block():
    idx = stationary_indices(5000, 20, 4, np.random.default_rng(1))
    breaks = np.mean((np.diff(idx, axis=1) % 5000) != 1)
    assert breaks == pytest.approx(1 / 20, rel=0.15)


def test_bootstrap_defaults_and_determinism():
    r = np.random.default_rng(0).normal(2e-4, 1e-3, 1500)
    a = block_bootstrap_sharpe(r, seed=42)
    b = block_bootstrap_sharpe(r, seed=42)
    assert (a.ci_low, a.ci_high) == (b.ci_low, b.ci_high)
    assert a.resamples == 1000 and a.block_length == 20
    assert a.ci_low <= a.point_sharpe <= a.ci_high
    assert a.point_sharpe == pytest.approx(annualized_sharpe(r))


def test_bootstrap_concentrated_series():
    r = 1e-3 + np.random.default_rng(2).normal(0, 1e-6, 500)
    res = block_bootstrap_sharpe(r, resamples=300, seed=1)
    assert res.ci_low <= res.point_sharpe <= res.ci_high
    assert (res.ci_high - res.ci_low) / res.point_sharpe < 0.5


def test_bootstrap_too_short():
    with pytest.raises(TooShort):
        block_bootstrap_sharpe(np.zeros(39), block_length=20)


def test_spa_identical_to_benchmark():
    bench = np.random.default_rng(0).normal(0, 1e-3, 300)
    res = spa_test(np.vstack([bench, bench, bench]), bench, resamples=200)
    assert res.p_value == 1.0


def test_spa_planted_edge_and_determinism():
    rng = np.random.default_rng(5)
    x = rng.normal(0, 1.0, (10, 500))
    x[3] += 10.0 / np.sqrt(500)  # mean differential of 10 standard errors
    a = spa_test(x, resamples=400, seed=9)
    b = spa_test(x, resamples=400, seed=9)
    assert a.p_value == b.p_value and a.p_value < 0.01
    assert a.best_config == 3
    assert a.num_configs == 10


def test_spa_errors():
    with pytest.raises(ValueError):
        spa_test(np.zeros((1, 100)))
    x = np.random.default_rng(0).normal(size=(3, 100))
    x[1] = 0.5
    with pytest.raises(DegenerateLoss):
        spa_test(x)
    with pytest.raises(TooShort):
        spa_test(np.zeros((2, 30)))


def test_kernel_variance_matches_direct_sum():
    rng = np.random.default_rng(12)
    d = rng.normal(size=(3, 240))
    n, q = d.shape[1], 1 / 20
    x = d - d.mean(axis=1, keepdims=True)
    want = (x ** 2).sum(axis=1) / n
    for i in range(1, n):
        kappa = (1 - i / n) * (1 - q) ** i + (i / n) * (1 - q) ** (n - i)
        want += 2 * kappa * (x[:, :n - i] * x[:, i:]).sum(axis=1) / n
    np.testing.assert_allclose(stationary_kernel_variance(d, 20), want, rtol=1e-12)


def test_kernel_variance_near_iid_variance_for_short_blocks():
    d = np.random.default_rng(13).normal(0, 2.0, (1, 20_000))
    assert abs(stationary_kernel_variance(d, 1.0)[0] / 4.0 - 1) < 0.05
