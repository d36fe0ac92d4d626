"""Kick the c = 1 wave along its unstable eigenvector and watch it grow.

The shift-matched distance to the wave grows like exp(lambda t) with the
eigenvalue from the spectrum until the solution runs away.
"""

import numpy as np

from beamwave import BeamParameters, make_grid, solve_beam
from beamwave.dynamics import evolve, perturbed_wave_initial
from beamwave.stability import ranked_mode

wave = solve_beam(BeamParameters(1.0), make_grid(512, 12 * np.pi))
mode = ranked_mode(wave)
eps = 1e-3
start = perturbed_wave_initial(wave, mode, eps)
run = evolve(start, 12.0, 1e-3, wave.params, wave_reference=wave, sample_every=250, epsilon=eps)

print(f"eigenvalue             {mode[0]:.5f}")
for t, H, sup, dev in run.samples:
    print(f"t = {t:6.2f}   H = {H:+.10f}   sup|u| = {sup:10.4f}   deviation = {dev:.3e}")
rate, window = run.growth_fit
print(f"fitted growth rate     {rate:.5f} over t in [{window[0]:.2f}, {window[1]:.2f}]")
print(f"termination            {run.termination}")
