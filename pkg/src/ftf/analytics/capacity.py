"""
Friction-aware capacity: the growth curve in participation ``L``

    g(L) = mu_u*L - 0.5*(sigma_u*L)^2 - n*k*L - gamma*(n*L)^1.5,

its maximiser, its positive zero-growth root, and the AUM that root maps to.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from ..errors import NoPositiveBranch
from ..sizing import growth_rate, kelly_root


@dataclass(frozen=True)
class CapacityResult:
    mu_u: float
    sigma_u: float
    k: float
    gamma: float
    n: float
    L_star: float
    L_max: float
    g_star: float
    L_grid: np.ndarray = field(repr=False)
    g_grid: np.ndarray = field(repr=False)
    positive_branch: bool = True
    adv_dollars: float = math.nan
    mean_abs_turnover: float = math.nan
    aum_max: float = math.nan
    reference_L_max: float = math.nan
    reference_aum_max: float = math.nan

    def divergence_note(self) -> str:
        if not math.isfinite(self.reference_L_max):
            return ""
        rel = (self.L_max - self.reference_L_max) / self.reference_L_max
        note = (f"computed zero-growth participation {self.L_max:.4g} vs reference "
                f"{self.reference_L_max:.4g} ({rel:+.1%})")
        if math.isfinite(self.reference_aum_max) and math.isfinite(self.aum_max):
            note += (f"; implied AUM {self.aum_max:.4g} vs reference {self.reference_aum_max:.4g}"
                     f" (reference AUM implies L_max = "
                     f"{implied_l_max(self.reference_aum_max, self.adv_dollars, self.mean_abs_turnover):.4g})")
        return note

    def to_dict(self) -> dict:
        d = asdict(self)
        d["L_grid"] = self.L_grid.tolist()
        d["g_grid"] = self.g_grid.tolist()
        d["divergence_note"] = self.divergence_note()
        return d


def bisect_root(fn, lo: float, hi: float, rel_tol: float = 1e-15, max_iter: int = 400) -> float:
    """Bisection on a sign change ``fn(lo) > 0 >= fn(hi)``."""
    f_lo = fn(lo)
    if not (f_lo > 0 and fn(hi) <= 0):
        raise ValueError("root is not bracketed")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if fn(mid) > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= rel_tol * hi:
            break
    return 0.5 * (lo + hi)


def zero_growth_point(mu_u: float, sigma_u: float, k: float, gamma: float, n: float = 1.0) -> float:
    """Largest ``L`` with ``g(L) >= 0``; zero when the mean edge does not clear ``n*k``."""
    if not mu_u > n * k:
        return 0.0
    L_star = kelly_root(mu_u, sigma_u, k, gamma, n)
    fn = lambda L: growth_rate(L, mu_u, sigma_u, k, gamma, n)
    hi = 2.0 * L_star
    while fn(hi) > 0:
        hi *= 2.0
    return bisect_root(fn, L_star, hi)


def aum_mapping(L_max: float, adv_dollars: float, mean_abs_turnover: float) -> float:
    if not (adv_dollars > 0 and mean_abs_turnover > 0 and L_max >= 0):
        raise ValueError("ADV and turnover must be positive, L_max non-negative")
    return L_max * adv_dollars / mean_abs_turnover


def implied_l_max(aum: float, adv_dollars: float, mean_abs_turnover: float) -> float:
    return aum * mean_abs_turnover / adv_dollars if adv_dollars > 0 else math.nan


def capacity_curve(mu_u: float, sigma_u: float, k: float, gamma: float, n: float = 1.0,
                   L_grid=None, adv_dollars: float | None = None,
                   mean_abs_turnover: float | None = None,
                   reference_L_max: float = math.nan,
                   reference_aum_max: float = math.nan) -> CapacityResult:
    """Evaluate the growth curve and locate its maximiser and zero-growth root.

    Without an explicit grid, 201 points from 0 to ``1.25 * L_max`` are used.
    A non-positive branch emits :class:`NoPositiveBranch` and reports zero
    capacity.
    """
    if not sigma_u > 0:
        raise ValueError("sigma_u must be > 0")
    positive = mu_u > n * k
    if not positive:
        warnings.warn(f"mean edge {mu_u:.3g} does not exceed n*k = {n * k:.3g}; capacity is zero",
                      NoPositiveBranch, stacklevel=2)
    L_star = kelly_root(mu_u, sigma_u, k, gamma, n)
    L_max = zero_growth_point(mu_u, sigma_u, k, gamma, n)
    if L_grid is None:
        top = 1.25 * L_max if L_max > 0 else 1e-6
        L_grid = np.linspace(0.0, top, 201)
    L_grid = np.asarray(L_grid, dtype=float)
    if np.any(L_grid < 0):
        raise ValueError("participation grid must be non-negative")
    g_grid = growth_rate(L_grid, mu_u, sigma_u, k, gamma, n)
    aum = math.nan
    if adv_dollars is not None and mean_abs_turnover is not None:
        aum = aum_mapping(L_max, adv_dollars, mean_abs_turnover)
    return CapacityResult(
        mu_u=mu_u, sigma_u=sigma_u, k=k, gamma=gamma, n=n, L_star=L_star, L_max=L_max,
        g_star=float(growth_rate(L_star, mu_u, sigma_u, k, gamma, n)),
        L_grid=L_grid, g_grid=np.atleast_1d(g_grid), positive_branch=positive,
        adv_dollars=math.nan if adv_dollars is None else float(adv_dollars),
        mean_abs_turnover=math.nan if mean_abs_turnover is None else float(mean_abs_turnover),
        aum_max=aum, reference_L_max=reference_L_max, reference_aum_max=reference_aum_max,
    )
