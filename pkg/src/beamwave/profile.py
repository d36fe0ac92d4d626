"""
Traveling-wave profiles by inexact Newton iteration with preconditioned CG.

The discrete residual is

    R(phi) = alpha D4 phi + mu D2 phi + omega phi - N(phi),

and each Newton correction solves ``J delta = -R`` with ``J`` the (symmetric)
linearisation, by conjugate gradients preconditioned with the inverse of the
constant-coefficient symbol. Iterates are kept even, which removes the
translation mode ``phi'`` from the kernel of ``J``.

The iterate is held as FFT coefficients. Rounding the grid samples of a
converged profile to double precision perturbs its residual by about
``eps * k_max^4`` (~1.5e-10 on 1024 points over [-12 pi, 12 pi)); the
coefficients of the trigonometric interpolant do not suffer from this, so
``TravelingWave.coefficients`` is the exact representation and
``TravelingWave.profile`` its rounded samples.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import (HomotopyBroken, InvalidArgument, NoConvergence,
                     TrivialSolution)
from .grid import PeriodicGrid, RealField
from .nonlinearity import Nonlinearity
from .params import BEAM, NLS, BeamParameters, NlsParameters, ProfileEquation

log = logging.getLogger(__name__)

CG_MAX_ITER = 500
CG_FORCING = 1e-3
MAX_HALVINGS = 20


@dataclass(frozen=True)
class TravelingWave:
    """Converged profile together with the equation it solves."""

    profile: RealField
    equation: ProfileEquation
    family: str
    residual_sup: float
    centered: bool = True
    newton_steps: int = 0
    coefficients: np.ndarray = None

    def __post_init__(self):
        if self.coefficients is None:
            object.__setattr__(self, "coefficients", np.fft.fft(self.profile.values))

    @property
    def grid(self) -> PeriodicGrid:
        return self.profile.grid

    @property
    def phi(self) -> np.ndarray:
        return self.profile.values

    @property
    def wavespeed(self) -> float:
        return self.equation.wavespeed

    @property
    def params(self):
        eq = self.equation
        if self.family == NLS:
            return NlsParameters(eq.mu, eq.omega)
        return BeamParameters(eq.wavespeed, eq.gamma, eq.nonlinearity)


@dataclass
class HomotopyPlan:
    """Ordered parameter sweeps starting from ``start``.

    ``stages`` holds ``(name, start_value, end_value, steps)`` tuples; each
    stage moves one parameter of the generalised profile equation.
    """

    start: ProfileEquation
    stages: list = field(default_factory=list)
    family: str = BEAM

    def __post_init__(self):
        current = {name: self.start.get(name) for name in ProfileEquation.PARAMETERS}
        for i, (name, a, b, steps) in enumerate(self.stages):
            if name not in current:
                raise InvalidArgument(f"stage {i}: unknown parameter {name!r}")
            if int(steps) != steps or steps < 1:
                raise InvalidArgument(f"stage {i}: step count must be >= 1")
            if not np.isclose(a, current[name], rtol=0, atol=1e-12):
                raise InvalidArgument(
                    f"stage {i}: {name} starts at {a} but the chain is at {current[name]}"
                )
            current[name] = b

    def target(self) -> ProfileEquation:
        eq = self.start
        for name, _, b, _ in self.stages:
            eq = eq.with_(**{name: b})
        return eq


# ----------------------------------------------------------------------------
# operators
# ----------------------------------------------------------------------------


def _even(v, grid):
    return 0.5 * (v + v[grid.reflection])


def _even_hat(phat, grid):
    # real, even fields have real FFT coefficients symmetric under j -> -j
    return 0.5 * (phat.real + phat.real[grid.reflection]) + 0j


def residual(phi: np.ndarray, eq: ProfileEquation, grid: PeriodicGrid) -> np.ndarray:
    """Discrete profile residual at the samples ``phi``."""
    return residual_hat(np.fft.fft(phi), eq, grid)


def residual_hat(phat: np.ndarray, eq: ProfileEquation, grid: PeriodicGrid) -> np.ndarray:
    """Residual of the trigonometric interpolant with FFT coefficients ``phat``."""
    sym = eq.symbol(grid.wavenumbers)
    lin = np.fft.ifft(sym * phat).real
    return lin - eq.nonlinear(np.fft.ifft(phat).real)


def profile_residual(wave_or_field, eq: ProfileEquation = None) -> RealField:
    """Residual of a field (or a wave's profile) re-evaluated from scratch."""
    if isinstance(wave_or_field, TravelingWave):
        eq = eq or wave_or_field.equation
        g = wave_or_field.grid
        return RealField(residual_hat(wave_or_field.coefficients, eq, g), g)
    else:
        f = wave_or_field
    return RealField(residual(f.values, eq, f.grid), f.grid)


def _jacobian_apply(v, potential, sym):
    return np.fft.ifft(sym * np.fft.fft(v)).real + potential * v


def _pcg(b, potential, sym, grid, rtol, maxiter):
    """Preconditioned CG for ``(sym(D) + diag(potential)) x = b`` on even fields."""
    precond = 1.0 / sym
    x = np.zeros_like(b)
    r = b.copy()
    bnorm = np.linalg.norm(b)
    if bnorm == 0:
        return x, 0
    z = np.fft.ifft(precond * np.fft.fft(r)).real
    p = z.copy()
    rz = r @ z
    for it in range(1, maxiter + 1):
        Ap = _jacobian_apply(p, potential, sym)
        pAp = p @ Ap
        if pAp == 0 or not np.isfinite(pAp):
            break
        a = rz / pAp
        x += a * p
        r -= a * Ap
        r = _even(r, grid)
        if np.linalg.norm(r) <= rtol * bnorm:
            return _even(x, grid), it
        z = np.fft.ifft(precond * np.fft.fft(r)).real
        rz_new = r @ z
        p = z + (rz_new / rz) * p
        rz = rz_new
    return _even(x, grid), maxiter


def trivial_threshold(eq: ProfileEquation) -> float:
    return 1e-3 * np.sqrt(max(eq.symbol_min(), 0.0))


def _center(phi, grid):
    """Roll the field so that max |phi| sits on the node x = 0."""
    shift = grid.n_points // 2 - int(np.argmax(np.abs(phi)))
    return np.roll(phi, shift)


def seed_profile(grid: PeriodicGrid, omega: float = 1.0) -> RealField:
    """``sqrt(2 omega) sech(sqrt(omega) x)``, the soliton of ``-phi'' + omega phi - phi^3 = 0``."""
    if not omega > 0:
        raise InvalidArgument(f"omega must be positive, got {omega}")
    return RealField(np.sqrt(2.0 * omega) / np.cosh(np.sqrt(omega) * grid.x), grid)


def seed_quadratic(grid: PeriodicGrid, omega: float = 1.0) -> RealField:
    """``-3 omega sech^2(sqrt(omega) x / 2)``, solving ``-phi'' + omega phi + phi^2/2 = 0``."""
    if not omega > 0:
        raise InvalidArgument(f"omega must be positive, got {omega}")
    return RealField(-3.0 * omega / np.cosh(0.5 * np.sqrt(omega) * grid.x) ** 2, grid)


def newton_cg_solve(seed, equation: ProfileEquation, tol: float = 1e-10,
                    max_outer: int = 50, family: str = BEAM,
                    cg_maxiter: int = CG_MAX_ITER) -> TravelingWave:
    """Solve the discrete profile equation starting from ``seed``.

    Parameters
    ----------
    seed : RealField or TravelingWave
        Initial guess; a field is centred and symmetrised before the first
        step, a wave is reused with its exact coefficients.
    equation : ProfileEquation
        Equation (and parameters) to solve.
    tol : float
        Target for the sup-norm of the residual.
    max_outer : int
        Cap on Newton iterations.

    Raises
    ------
    NoConvergence
        Residual not below ``tol`` after ``max_outer`` steps, or the line
        search could not reduce it.
    TrivialSolution
        The iteration collapsed onto the zero solution.
    """
    if not tol > 0:
        raise InvalidArgument("tol must be positive")
    grid = seed.grid
    eq = equation
    if isinstance(seed, TravelingWave):
        seed_field = seed.profile
    else:
        seed_field = seed
    threshold = trivial_threshold(eq)
    sym = eq.symbol(grid.wavenumbers)
    if np.min(sym) <= 0:
        raise NoConvergence(
            f"linear symbol is not positive on the grid (min {np.min(sym):.3g}); "
            "no decaying wave can be resolved"
        )
    phi = _even(_center(np.array(seed_field.values, dtype=float), grid), grid)
    if np.max(np.abs(phi)) < threshold:
        raise TrivialSolution("seed is numerically zero")
    phat = _even_hat(np.fft.fft(phi), grid)
    if isinstance(seed, TravelingWave):
        phat = _even_hat(seed.coefficients, grid)

    R = residual_hat(phat, eq, grid)
    res = np.max(np.abs(R))
    steps = 0
    while res >= tol:
        if steps >= max_outer:
            raise NoConvergence(f"residual {res:.3e} after {steps} Newton steps")
        potential = -eq.nonlinear_derivative(phi)
        rtol = min(CG_FORCING, res)
        delta, _ = _pcg(-R, potential, sym, grid, rtol, cg_maxiter)
        dhat = _even_hat(np.fft.fft(delta), grid)
        merit = np.linalg.norm(R)
        t = 1.0
        for _ in range(MAX_HALVINGS + 1):
            trial = phat + t * dhat
            R_trial = residual_hat(trial, eq, grid)
            if np.linalg.norm(R_trial) < merit:
                break
            t *= 0.5
        else:
            raise NoConvergence(f"line search failed at residual {res:.3e}")
        phat, R = trial, R_trial
        phi = np.fft.ifft(phat).real
        res = np.max(np.abs(R))
        steps += 1
        log.debug("newton step %d: residual %.3e (t=%g)", steps, res, t)
        if not np.all(np.isfinite(phi)):
            raise NoConvergence("iterate became non-finite")
    phi = np.fft.ifft(phat).real
    if np.max(np.abs(phi)) < threshold:
        raise TrivialSolution(f"converged to |phi|_inf = {np.max(np.abs(phi)):.3e}")
    centered = int(np.argmax(np.abs(phi))) == grid.n_points // 2
    return TravelingWave(RealField(phi, grid), eq, family, float(res), centered, steps, phat)


def _stage_values(a, b, steps):
    return np.linspace(a, b, steps + 1)[1:] if a != b else np.full(steps, b)


def homotopy_solve(plan: HomotopyPlan, grid: PeriodicGrid, tol: float = 1e-10,
                   seed: RealField = None, max_outer: int = 50) -> TravelingWave:
    """Continue the plan's start equation to its target, one Newton solve per step."""
    eq = plan.start
    if seed is None:
        seed = default_seed(eq, grid)
    current = seed
    wave = None
    for i, (name, a, b, steps) in enumerate(plan.stages):
        for value in _stage_values(a, b, steps):
            trial_eq = eq.with_(**{name: float(value)})
            try:
                wave = newton_cg_solve(current, trial_eq, tol, max_outer, plan.family)
            except (NoConvergence, TrivialSolution) as exc:
                last = None if wave is None else {k: wave.equation.get(k) for k in ProfileEquation.PARAMETERS}
                raise HomotopyBroken(
                    f"stage {i} ({name} = {value:.6g}) failed: {exc}", stage=i, last_good=last
                ) from exc
            current = wave
            eq = trial_eq
    if wave is None:
        wave = newton_cg_solve(current, eq, tol, max_outer, plan.family)
    return wave


def default_seed(eq: ProfileEquation, grid: PeriodicGrid) -> RealField:
    """Explicit second-order soliton matching the plan's start nonlinearity."""
    if eq.nonlinearity.is_polynomial:
        return seed_profile(grid, eq.omega)
    return seed_quadratic(grid, eq.omega)


def beam_plan(params: BeamParameters, alpha_steps: int = 10, mu_steps: int = 40,
              blend_steps: int = 20) -> HomotopyPlan:
    """Default two-stage continuation from the explicit second-order soliton.

    Stage 1 raises the fourth-order coefficient 0 -> 1 at ``mu = -1``; stage 2
    moves ``mu`` from -1 to ``c^2``. Non-cubic nonlinearities get a final
    blend stage from the cubic (or quadratic) start term.
    """
    nl = params.nonlinearity
    cubic = nl.is_polynomial and nl.coefficients == (1.0,)
    start = ProfileEquation(nl, gamma=params.gamma, alpha=0.0, mu=-1.0, omega=1.0,
                            blend=1.0 if cubic else 0.0)
    stages = [("alpha", 0.0, 1.0, alpha_steps), ("mu", -1.0, params.wavespeed ** 2, mu_steps)]
    if not cubic:
        stages.append(("blend", 0.0, 1.0, blend_steps))
    return HomotopyPlan(start, stages, BEAM)


def nls_plan(params: NlsParameters, alpha_steps: int = 10, mu_steps: int = 40) -> HomotopyPlan:
    start = ProfileEquation(Nonlinearity.cubic(), alpha=0.0, mu=-1.0, omega=params.omega)
    stages = [("alpha", 0.0, 1.0, alpha_steps), ("mu", -1.0, params.mu, mu_steps)]
    return HomotopyPlan(start, stages, NLS)


def solve_beam(params: BeamParameters, grid: PeriodicGrid = None, tol: float = 1e-10,
               plan: HomotopyPlan = None) -> TravelingWave:
    from .grid import default_grid

    grid = grid or default_grid()
    return homotopy_solve(plan or beam_plan(params), grid, tol)


def solve_nls(params: NlsParameters, grid: PeriodicGrid = None, tol: float = 1e-10) -> TravelingWave:
    from .grid import default_grid

    grid = grid or default_grid()
    return homotopy_solve(nls_plan(params), grid, tol)
