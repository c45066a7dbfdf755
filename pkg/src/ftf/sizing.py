"""
Position sizing: EWMA volatility target, confidence shaping and the
friction-adjusted Kelly fraction.

The Kelly objective is the small-return log-growth approximation

    g(f) = mu*f - 0.5*sigma^2*f^2 - n*k*f - gamma*(n*f)^1.5

whose maximiser has a closed form after substituting ``f = x^2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, InvalidTheta

TRADING_DAYS = 252


@dataclass(frozen=True)
class VolParams:
    theta: float = 0.94
    target_vol_annual: float = 0.15
    trading_days: int = TRADING_DAYS
    max_leverage: float = 2.0

    def __post_init__(self):
        if not 0.0 < self.theta < 1.0:
            raise InvalidTheta(self.theta)
        if not self.target_vol_annual > 0:
            raise ConfigError("vol.target_vol_annual", f"must be > 0, got {self.target_vol_annual!r}")
        if not self.trading_days > 0:
            raise ConfigError("vol.trading_days", f"must be > 0, got {self.trading_days!r}")
        if not self.max_leverage > 0:
            raise ConfigError("vol.max_leverage", f"must be > 0, got {self.max_leverage!r}")

    @property
    def target_vol_daily(self) -> float:
        return self.target_vol_annual / math.sqrt(self.trading_days)


@dataclass(frozen=True)
class KellyParams:
    k: float = 7e-5
    gamma: float = 0.02
    n: float = 1.0
    lambda_kelly: float = 0.40
    baseline_fraction: float = 0.25
    f_star_epsilon: float = 1e-6
    # "conf": baseline = fraction * w_conf; "vol": baseline = fraction * w_vol
    baseline_mode: str = "conf"

    def __post_init__(self):
        checks = [
            ("k", self.k >= 0, ">= 0"),
            ("gamma", self.gamma >= 0, ">= 0"),
            ("n", self.n > 0, "> 0"),
            ("lambda_kelly", 0 < self.lambda_kelly <= 1, "in (0, 1]"),
            ("baseline_fraction", 0 <= self.baseline_fraction <= 1, "in [0, 1]"),
            ("f_star_epsilon", self.f_star_epsilon >= 0, ">= 0"),
            ("baseline_mode", self.baseline_mode in ("conf", "vol"), "one of 'conf', 'vol'"),
        ]
        for name, ok, rule in checks:
            if not ok:
                raise ConfigError(f"kelly.{name}", f"must be {rule}, got {getattr(self, name)!r}")


@dataclass(frozen=True)
class TrainMoments:
    """Daily moments estimated on a training window.

    ``mu, sigma`` describe the unit-weight gated rule and drive Kelly;
    ``mu_u, sigma_u`` describe the unit-notional managed sleeve and drive
    the capacity curve.
    """

    mu: float
    sigma: float
    mu_u: float
    sigma_u: float


# ---------------------------------------------------------------------------
# Volatility targeting
# ---------------------------------------------------------------------------

def ewma_variance(returns, theta: float, seed_variance: float) -> np.ndarray:
    """One-step-ahead variance forecasts.

    ``out[t]`` is the forecast for the day after ``returns[t]``, i.e.
    ``out[t] = theta*out[t-1] + (1-theta)*returns[t]**2`` with
    ``out[-1] = seed_variance``.
    """
    if not 0.0 < theta < 1.0:
        raise InvalidTheta(theta)
    if seed_variance < 0:
        raise ValueError("seed_variance must be >= 0")
    r = np.asarray(returns, dtype=float)
    out = np.empty_like(r)
    prev = float(seed_variance)
    w_new = 1.0 - theta
    for t in range(len(r)):
        prev = theta * prev + w_new * r[t] * r[t]
        out[t] = prev
    return out


def vol_target_weight(sigma_hat, params: VolParams):
    """``min(W_max, sigma*/sigma_hat)``; a zero forecast maps to the cap."""
    s = np.asarray(sigma_hat, dtype=float)
    if np.any(s < 0):
        raise ValueError("volatility forecast must be >= 0")
    target = params.target_vol_daily
    with np.errstate(divide="ignore"):
        ratio = np.where(s > 0, target / np.where(s > 0, s, 1.0), np.inf)
    out = np.minimum(params.max_leverage, ratio)
    return out if out.ndim else float(out)


def confidence_weight(w_vol, p):
    """Share of the volatility budget in use: ``w_vol * clip((p - 0.5)/0.5, 0, 1)``."""
    share = np.clip((np.asarray(p, dtype=float) - 0.5) / 0.5, 0.0, 1.0)
    out = np.asarray(w_vol, dtype=float) * share
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# Friction-adjusted Kelly
# ---------------------------------------------------------------------------

def growth_rate(f, mu: float, sigma: float, k: float, gamma: float, n: float = 1.0):
    f = np.asarray(f, dtype=float)
    out = mu * f - 0.5 * (sigma * f) ** 2 - n * k * f - gamma * (n * f) ** 1.5
    return out if out.ndim else float(out)


def kelly_root(mu: float, sigma: float, k: float, gamma: float, n: float = 1.0) -> float:
    """Maximiser of :func:`growth_rate` over ``f >= 0``.

    The positive root of ``2 s^2 x^2 + 3 g n^1.5 x - 2 (mu - n k) = 0`` is
    evaluated in its rationalised form ``2c / (b + sqrt(b^2 + 4ac))``, which
    is algebraically identical and avoids cancellation when the impact term
    dominates.
    """
    edge = mu - n * k
    if not edge > 0:
        return 0.0
    if not sigma > 0:
        raise ValueError("sigma must be > 0 when the net edge is positive")
    b = 3.0 * gamma * n ** 1.5
    disc = b * b + 16.0 * sigma * sigma * edge
    x = 4.0 * edge / (b + math.sqrt(disc))
    return x * x


def kelly_fraction(moments: TrainMoments, params: KellyParams) -> float:
    return kelly_root(moments.mu, moments.sigma, params.k, params.gamma, params.n)


def final_weight(f_star: float, w_conf, w_vol, gate_active, kelly: KellyParams, vol: VolParams):
    """Combine Kelly fraction, confidence share and vol budget into a capped weight.

    When ``f_star`` is at or below ``kelly.f_star_epsilon`` and the entry
    gate is active, a baseline of ``baseline_fraction`` times the
    confidence-scaled budget (or the raw vol budget, per ``baseline_mode``)
    is used instead.
    """
    w_conf = np.asarray(w_conf, dtype=float)
    w_vol = np.asarray(w_vol, dtype=float)
    gate = np.asarray(gate_active, dtype=bool)
    if f_star > kelly.f_star_epsilon:
        w = kelly.lambda_kelly * f_star * w_conf
    else:
        budget = w_conf if kelly.baseline_mode == "conf" else w_vol
        w = np.where(gate, kelly.baseline_fraction * budget, 0.0)
    out = np.clip(w, 0.0, vol.max_leverage)
    return out if out.ndim else float(out)
