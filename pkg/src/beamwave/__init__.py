"""Traveling waves of fourth-order beam and NLS equations: profiles, branches, stability and dynamics."""

from .analysis import (DecayFit, VariationalResult, decay_rate, fit_decay_rate, green_kernel,
                       green_kernel_derivative, kernel_decay_fit, variational_maximize)
from .config import RunConfig, load_config
from .continuation import (BranchPoint, ContinuationCurve, Controls, Termination, branch_diagnostics,
                           eigen_transition, extend_branch, locate_transition, momentum_derivative)
from .dynamics import (EvolutionState, EvolutionSummary, energy, evolve, irk_gauss4_step,
                       perturbed_wave_initial)
from .errors import *  # noqa: F401,F403
from .grid import (PeriodicGrid, RealField, apply_beam_symbol, constraint_functional, default_grid,
                   differentiate, inner, invert_beam_symbol, make_grid, norm_sq, resample)
from .nonlinearity import Nonlinearity, eval_F, eval_Fprime, eval_G, profile_nonlinear_term
from .params import BeamParameters, NlsParameters, ProfileEquation
from .profile import (HomotopyPlan, TravelingWave, homotopy_solve, newton_cg_solve, profile_residual,
                      solve_beam, solve_nls)
from .stability import (LinearOperatorMatrix, SpectrumReport, assemble_operator, eigen_linearization,
                        index_report, internal_modes, morse_index, real_mode,
                        solve_L_plus_constrained, vk_beam, vk_nls)

__version__ = "0.1.0"
