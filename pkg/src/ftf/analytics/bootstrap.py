"""Block-resampling schemes and the bootstrap Sharpe confidence interval."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from ..errors import TooShort

PERIODS = 252


@dataclass(frozen=True)
class BootstrapResult:
    point_sharpe: float
    ci_low: float
    ci_high: float
    resamples: int
    block_length: int
    seed: int
    confidence: float = 0.95

    def to_dict(self) -> dict:
        return asdict(self)


def circular_block_indices(n: int, block_length: int, resamples: int,
                           rng: np.random.Generator) -> np.ndarray:
    """``(resamples, n)`` indices built from fixed-length blocks that wrap around."""
    n_blocks = -(-n // block_length)
    starts = rng.integers(0, n, size=(resamples, n_blocks))
    idx = (starts[:, :, None] + np.arange(block_length)) % n
    return idx.reshape(resamples, -1)[:, :n]


def stationary_indices(n: int, mean_block: float, resamples: int,
                       rng: np.random.Generator) -> np.ndarray:
    """Politis-Romano stationary bootstrap: geometric block lengths with mean ``mean_block``."""
    p = 1.0 / mean_block
    idx = np.empty((resamples, n), dtype=np.int64)
    idx[:, 0] = rng.integers(0, n, size=resamples)
    restart = rng.random((resamples, n)) < p
    fresh = rng.integers(0, n, size=(resamples, n))
    for t in range(1, n):
        idx[:, t] = np.where(restart[:, t], fresh[:, t], (idx[:, t - 1] + 1) % n)
    return idx


def annualized_sharpe(x, axis=-1, periods: int = PERIODS):
    x = np.asarray(x, dtype=float)
    sd = x.std(axis=axis, ddof=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(sd > 0, x.mean(axis=axis) / sd, np.nan) * math.sqrt(periods)


def block_bootstrap_sharpe(returns, resamples: int = 1000, block_length: int = 20,
                           seed: int = 0, confidence: float = 0.95) -> BootstrapResult:
    """Percentile CI of the annualised Sharpe under circular moving-block resampling."""
    r = np.asarray(returns, dtype=float)
    if r.size < 2 * block_length:
        raise TooShort(f"need >= {2 * block_length} observations, have {r.size}")
    rng = np.random.default_rng(seed)
    idx = circular_block_indices(r.size, block_length, resamples, rng)
    sharpes = annualized_sharpe(r[idx], axis=1)
    tail = (1.0 - confidence) / 2.0 * 100.0
    lo, hi = np.nanpercentile(sharpes, [tail, 100.0 - tail])
    return BootstrapResult(float(annualized_sharpe(r)), float(lo), float(hi),
                           int(resamples), int(block_length), int(seed), confidence)
