"""Two independent views of the wave.

The Green kernel of d^4 + c^2 d^2 + 1 fixes the exponential tail, and the
wave is recovered as a maximiser of int G(u^2) on a level set of the
quadratic constraint functional.
"""

import numpy as np

from beamwave import BeamParameters, make_grid, solve_beam
from beamwave.analysis import (decay_rate, green_kernel, kernel_decay_fit,
                               variational_maximize)

for c in (0.0, 0.5, 1.0, 1.3):
    fit = kernel_decay_fit(c)
    print(f"c = {c:3.1f}: K(0) = {green_kernel(0.0, c):.10f}, kernel tail rate {fit.rate:.6f}, "
          f"theory {decay_rate(c):.6f}")

grid = make_grid(512, 12 * np.pi)
res = variational_maximize(1.0, 1.0, grid=grid)
wave = solve_beam(BeamParameters(1.0), grid)
u = res.scaled_profile.values
u = np.roll(u, grid.n_points // 2 - int(np.argmax(np.abs(u))))
u *= np.sign(u[grid.n_points // 2])
print(f"multiplier kappa        {res.kappa:.10f} (Rayleigh {res.kappa_rayleigh:.10f})")
print(f"Euler-Lagrange residual {res.el_residual:.2e}")
print(f"|kappa^-1/2 U - phi|    {np.max(np.abs(u - wave.phi)):.2e}")
for lam in (0.5, 1.0, 2.0):
    M = variational_maximize(lam, 1.0, grid=grid).objective
    print(f"lambda = {lam}: M / lambda^2 = {M / lam ** 2:.12f}")
