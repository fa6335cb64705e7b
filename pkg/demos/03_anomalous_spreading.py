"""Anomalous self-similar spreading of the limiting energy diffusion.

For power-law coefficients a(e) = K e^{alpha/2} the limit equation
spreads an initially concentrated energy distribution as e ~ t^beta with
beta = 2/(4 - alpha): slower than ballistic, faster than classical
sqrt(t) diffusion once alpha > 0.  alpha = 4/3 gives the
Richardson-like exponent beta = 3/4.

The demo solves the equation from a near-delta initial profile and fits
the median energy growth on a log-log scale.

Run:  python3 demos/03_anomalous_spreading.py
"""

import numpy as np

from gyrodiff import (DiffusionCoefficientTable, EnergyGrid,
                      gaussian_profile, median_energy, scaling_exponent,
                      self_similar_fit, solve)

for alpha in (1.0, 4.0 / 3.0, 2.0):
    beta = scaling_exponent(alpha)
    grid = EnergyGrid(120.0, 1200)
    e = np.linspace(0.0, 120.0, 1201)
    table = DiffusionCoefficientTable(e_values=e,
                                      a_values=e ** (alpha / 2.0),
                                      method="analytic", n=1)
    times = list(np.linspace(1.0, 10.0, 10))
    solutions = solve(gaussian_profile(grid, 0.0), table, 10.0, 0.005,
                      output_times=times)
    beta_hat, se = self_similar_fit(solutions, (1.0, 10.0))
    print(f"alpha = {alpha:.4f}:  predicted beta = {beta:.4f}   "
          f"fitted beta = {beta_hat:.4f} +- {se:.4f}")
    for t, p in solutions[::3]:
        print(f"    t = {t:4.1f}   median energy {median_energy(p):7.3f}")
