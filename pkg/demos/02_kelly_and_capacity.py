"""
Friction-adjusted Kelly sizing and the capacity frontier.

With linear cost ``k`` and impact ``gamma * L**1.5`` the growth rate of a
sleeve levered ``L`` is concave; its maximiser is the Kelly root and its
positive zero is the largest participation that still grows capital.

    python demos/02_kelly_and_capacity.py
"""

import numpy as np

from ftf.analytics import aum_mapping, capacity_curve
from ftf.sizing import growth_rate, kelly_root

k, gamma = 7e-5, 0.02

# Frictionless Kelly is mu / sigma**2; costs pull the root towards zero.
for mu in (2e-4, 5e-4, 1e-3):
    sigma = 0.01
    f = kelly_root(mu, sigma, k, gamma)
    print(f"mu {mu:.0e}: frictionless {mu / sigma**2:.2f}, with costs {f:.4g}, "
          f"growth there {growth_rate(f, mu, sigma, k, gamma):.3e}")

# Brute-force check of one root on a fine grid.
grid = np.linspace(0, 1e-3, 200_001)
g = growth_rate(grid, 5e-4, 0.01, k, gamma)
print(f"grid argmax {grid[np.argmax(g)]:.3e} vs root {kelly_root(5e-4, 0.01, k, gamma):.3e}")

# Capacity for a small edge sleeve.
cap = capacity_curve(mu_u=1.5e-4, sigma_u=0.009, k=k, gamma=gamma,
                     adv_dollars=5e10, mean_abs_turnover=0.05)
print(f"\nL* = {cap.L_star:.4g}, L_max = {cap.L_max:.4g}, g(L*) = {cap.g_star:.3e}")
print(f"implied AUM at 5% daily turnover: ${aum_mapping(cap.L_max, 5e10, 0.05):,.0f}")

# Once the edge is below the linear cost there is no positive branch.
import warnings

with warnings.catch_warnings(record=True) as caught:
    warnings.simplefilter("always")
    dead = capacity_curve(mu_u=5e-5, sigma_u=0.009, k=k, gamma=gamma)
print(f"mu_u < k: L_max = {dead.L_max}, warning: {caught[0].message}")
