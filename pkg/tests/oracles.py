"""Independent reference computations used as test oracles."""

import math

import numpy as np

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def growth(f, mu, sigma, k, gamma, n=1.0):
    return mu * f - 0.5 * sigma ** 2 * f ** 2 - n * k * f - gamma * (n * f) ** 1.5


def kelly_oracle(mu, sigma, k, gamma, n=1.0, grid_points=2001):
    """Dense grid then golden-section refinement of the concave growth curve on f >= 0."""
    edge = mu - n * k
    top = 2.0 * edge / sigma ** 2 if edge > 0 else 1.0
    f = np.linspace(0.0, top, grid_points)
    i = int(np.argmax(growth(f, mu, sigma, k, gamma, n)))
    a, b = f[max(i - 1, 0)], f[min(i + 1, grid_points - 1)]
    c, d = b - GOLDEN * (b - a), a + GOLDEN * (b - a)
    gc, gd = growth(c, mu, sigma, k, gamma, n), growth(d, mu, sigma, k, gamma, n)
    for _ in range(200):
        if gc >= gd:
            b, d, gd = d, c, gc
            c = b - GOLDEN * (b - a)
            gc = growth(c, mu, sigma, k, gamma, n)
        else:
            a, c, gc = c, d, gd
            d = a + GOLDEN * (b - a)
            gd = growth(d, mu, sigma, k, gamma, n)
        if b - a <= 1e-15 * max(b, 1e-300):
            break
    return 0.5 * (a + b)


def ewma_direct(returns, theta, seed):
    """sigma2[t] = theta^(t+1) seed + (1-theta) sum_j theta^j r[t-j]^2, summed explicitly."""
    r = np.asarray(returns, dtype=float)
    out = np.empty(r.size)
    for t in range(r.size):
        j = np.arange(t + 1)
        out[t] = theta ** (t + 1) * seed + (1 - theta) * np.sum(theta ** j * r[t - j] ** 2)
    return out


def drawdown_brute(equity):
    e = list(equity)
    best = 0.0
    for i in range(len(e)):
        for j in range(i, len(e)):
            best = max(best, 1.0 - e[j] / e[i])
    return best


def reference_ledger(close, p_bull, slope, atr, target, tradeable, thr=0.52, hard=2.0,
                     trail=1.5, timeout=30, derisk=0.5, delay=1, k=7e-5, gamma=0.02):
    """Straight-line long-only ledger: close-triggered stops, halve-then-close de-risk."""
    n = len(close)
    w = np.zeros(n)
    pos, entry, peak, age, scale, streak = False, 0.0, 0.0, 0, 1.0, 0
    for t in range(n):
        if pos:
            age += 1
            peak = max(peak, close[t])
            stop = (entry - close[t] >= hard * atr[t] or peak - close[t] >= trail * atr[t]
                    or age >= timeout)
            streak = streak + 1 if 1 - p_bull[t] > derisk else 0
            scale = 0.5 if streak == 1 else scale
            if stop or streak >= 2 or target[t] * scale <= 0:
                pos, scale, streak = False, 1.0, 0
            else:
                w[t] = target[t] * scale
        elif (tradeable[t] and p_bull[t] >= thr and slope[t] > 0 and np.isfinite(atr[t])
              and target[t] > 0):
            pos, entry, peak, age, scale, streak = True, close[t], close[t], 0, 1.0, 0
            w[t] = target[t]
    filled = np.concatenate([np.zeros(delay), w[: n - delay]]) if delay else w.copy()
    held = np.concatenate([[0.0], filled[:-1]])
    r = np.concatenate([[0.0], close[1:] / close[:-1] - 1])
    dw = np.abs(np.diff(filled, prepend=0.0))
    return w, filled, held * r - k * dw - gamma * dw ** 1.5
