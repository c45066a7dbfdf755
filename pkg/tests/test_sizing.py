import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ftf.errors import ConfigError, InvalidTheta
from ftf.sizing import (
    KellyParams,
    TrainMoments,
    VolParams,
    confidence_weight,
    ewma_variance,
    final_weight,
    growth_rate,
    kelly_fraction,
    kelly_root,
    vol_target_weight,
)

from oracles import ewma_direct, kelly_oracle

SIGMA_STAR = 0.15 / math.sqrt(252)


def test_ewma_zero_returns_geometric_decay():
    out = ewma_variance(np.zeros(30), 0.94, 2e-4)
    np.testing.assert_allclose(out, 2e-4 * 0.94 ** np.arange(1, 31), rtol=1e-14)


def test_ewma_no_memory_limit():
    r = np.random.default_rng(0).normal(0, 0.01, 50)
    np.testing.assert_allclose(ewma_variance(r, 1e-12, 1e-4), r ** 2, rtol=1e-9)


@pytest.mark.parametrize("seed", range(5))
def test_ewma_matches_direct_sum(seed):
    rng = np.random.default_rng(seed)
    r = rng.standard_t(4, 300) * 0.01
    theta = rng.uniform(0.8, 0.99)
    np.testing.assert_allclose(ewma_variance(r, theta, 1e-4), ewma_direct(r, theta, 1e-4),
                               rtol=1e-12, atol=0)


def test_ewma_invalid():
    with pytest.raises(InvalidTheta):
        ewma_variance([0.1], 1.0, 1e-4)
    with pytest.raises(InvalidTheta):
        VolParams(theta=0.0)


def test_vol_target_examples():
    p = VolParams()
    assert vol_target_weight(SIGMA_STAR, p) == pytest.approx(1.0)
    assert vol_target_weight(0.0, p) == 2.0
    assert vol_target_weight(2 * SIGMA_STAR, p) == pytest.approx(0.5)
    assert vol_target_weight(SIGMA_STAR / 2 - 1e-12, p) == 2.0


def test_confidence_weight_examples():
    assert confidence_weight(1.3, 0.5) == 0.0
    assert confidence_weight(1.3, 1.0) == 1.3
    assert confidence_weight(1.2, 0.75) == pytest.approx(0.6)
    assert confidence_weight(1.2, 0.2) == 0.0


def test_kelly_classic_limit():
    m = TrainMoments(1e-4, 2e-3, 1e-4, 2e-3)
    f = kelly_fraction(m, KellyParams(k=0.0, gamma=0.0, n=1.0))
    assert f == pytest.approx(25.0, rel=1e-12)


def test_kelly_no_edge():
    assert kelly_root(7e-5, 5.7e-4, 7e-5, 0.02, 1.0) == 0.0
    assert kelly_root(-1e-3, 5.7e-4, 0.0, 0.0, 1.0) == 0.0


def test_kelly_reference_parameters_vs_oracle():
    f = kelly_root(1e-4, 5.7e-4, 7e-5, 0.02, 1.0)
    f_ref = kelly_oracle(1e-4, 5.7e-4, 7e-5, 0.02, 1.0)
    assert f == pytest.approx(f_ref, rel=1e-6)
    # frozen value: 4 * 3e-5 / (0.06 + sqrt(0.0036 + 16 * 5.7e-4**2 * 3e-5)) squared
    assert f == pytest.approx(1.0e-6, rel=1e-4)


def test_kelly_grid_dominance():
    rng = np.random.default_rng(4)
    for _ in range(20):
        mu, sigma = rng.uniform(0, 1e-3), rng.uniform(1e-3, 2e-2)
        k, gamma = rng.uniform(0, 2e-4), rng.uniform(0, 0.05)
        f = kelly_root(mu, sigma, k, gamma)
        fs = rng.uniform(0, max(4 * f, 1.0), 10_000)
        assert growth_rate(f, mu, sigma, k, gamma) >= growth_rate(fs, mu, sigma, k, gamma).max() - 1e-18


@settings(max_examples=200, deadline=None)
@given(st.floats(1e-6, 1e-3), st.floats(1e-4, 5e-2), st.floats(0, 5e-4), st.floats(0, 0.1),
       st.floats(0, 5e-4), st.floats(0, 0.1))
def test_kelly_monotone_in_costs(mu, sigma, k1, g1, k2, g2):
    lo_k, hi_k = sorted((k1, k2))
    lo_g, hi_g = sorted((g1, g2))
    assert kelly_root(mu, sigma, hi_k, lo_g) <= kelly_root(mu, sigma, lo_k, lo_g)
    assert kelly_root(mu, sigma, lo_k, hi_g) <= kelly_root(mu, sigma, lo_k, lo_g)


def test_final_weight_branches():
    vol, kelly = VolParams(), KellyParams()
    # tiny f*: baseline of 25% of the confidence-scaled budget on gated days only
    w = final_weight(0.0, np.array([0.8, 0.8]), np.array([1.0, 1.0]), np.array([True, False]), kelly, vol)
    np.testing.assert_allclose(w, [0.2, 0.0])
    alt = KellyParams(baseline_mode="vol")
    assert final_weight(0.0, 0.8, 1.0, True, alt, vol) == pytest.approx(0.25)
    # cap binds: 0.4 * 25 * 0.5 = 5 -> 2
    assert final_weight(25.0, 0.5, 1.0, True, kelly, vol) == 2.0
    assert final_weight(25.0, 0.0, 1.0, True, kelly, vol) == 0.0
    assert final_weight(0.5, 0.8, 1.0, True, kelly, vol) == pytest.approx(0.16)


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 1e3), st.floats(0, 2), st.floats(0, 2), st.booleans())
def test_final_weight_bounds(f, wc, wv, gate):
    w = final_weight(f, wc, wv, gate, KellyParams(), VolParams())
    assert 0.0 <= w <= 2.0


def test_param_validation():
    with pytest.raises(ConfigError, match="kelly.lambda_kelly"):
        KellyParams(lambda_kelly=0.0)
    with pytest.raises(ConfigError, match="kelly.baseline_mode"):
        KellyParams(baseline_mode="x")
    with pytest.raises(ConfigError, match="vol.max_leverage"):
        VolParams(max_leverage=0)
