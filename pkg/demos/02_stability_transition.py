"""Follow the beam branch across the stability transition.

The momentum-like quantity c |phi'|^2 peaks at the wavespeed where the real
eigenvalue pair collides at the origin; its derivative along the branch is
the VK quantity.
"""

import numpy as np

from beamwave import BeamParameters, make_grid, solve_beam
from beamwave.continuation import (Controls, branch_diagnostics, eigen_transition, extend_branch,
                                   locate_transition, momentum_derivative)

start = solve_beam(BeamParameters(1.25), make_grid(256, 12 * np.pi))
curve = extend_branch(start, 1.39, ds=0.01, controls=Controls(ds_max=0.01))
branch_diagnostics(curve)
fd = momentum_derivative(curve)

print(f"{'c':>8} {'c|phi_x|^2':>12} {'vk':>10} {'d/dc FD':>10} {'max Re':>10}")
for pt, d in zip(curve.points, fd):
    vk = "-" if pt.vk_value is None else f"{pt.vk_value:10.4f}"
    print(f"{pt.parameter:8.4f} {pt.diag_momentum:12.6f} {vk:>10} {d:10.4f} {pt.max_re_lambda:10.2e}")

print(f"argmax of c|phi_x|^2     c* = {locate_transition(curve):.4f}")
print(f"max Re(lambda) reaches 0 at {eigen_transition(curve):.4f}")
