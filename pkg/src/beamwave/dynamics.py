"""
Lab-frame time evolution of the nonlinear beam equation

    u_tt + u_xxxx + u - gamma F(u^2) u = 0

written as the Hamiltonian pair ``u_t = v``, ``v_t = -u_xxxx - u + gamma F(u^2) u``
with energy

    H = int 1/2 v^2 + 1/2 u_xx^2 + W(u),   W(u) = u^2/2 - (gamma/2) G(u^2).

Time stepping is the two-stage Gauss-Legendre Runge-Kutta method (order 4,
symplectic and symmetric). Its stage equations are solved by a fixed-point
iteration in which the linear part is inverted exactly, one 4x4 system per
Fourier mode.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InvalidArgument, StageNonConvergence, UnsupportedForFamily
from .grid import RealField
from .nonlinearity import eval_F, eval_G
from .params import BeamParameters

SQ3 = np.sqrt(3.0)
GAUSS_A = np.array([[0.25, 0.25 - SQ3 / 6.0], [0.25 + SQ3 / 6.0, 0.25]])
GAUSS_B = np.array([0.5, 0.5])

INNER_TOL = 1e-12
INNER_MAX = 100
BLOWUP_THRESHOLD = 1e6
BLOWUP_GROWTH = 10.0  # stage failure after this growth of sup|u| counts as blowup


@dataclass(frozen=True)
class EvolutionState:
    u: RealField
    v: RealField
    time: float
    hamiltonian: float

    @property
    def grid(self):
        return self.u.grid


@dataclass
class EvolutionSummary:
    """Sampled diagnostics of a run.

    ``samples`` rows are ``(time, hamiltonian, sup_norm_u, deviation)``;
    deviation is ``nan`` when no reference wave was given. ``termination`` is
    ``"completed"``, ``"Blowup"`` or ``"StageNonConvergence"``.
    """

    samples: list
    growth_fit: tuple = None
    termination: str = "completed"
    final_state: EvolutionState = field(default=None, repr=False)

    def column(self, j):
        return np.array([row[j] for row in self.samples])

    @property
    def times(self):
        return self.column(0)

    @property
    def hamiltonian(self):
        return self.column(1)

    @property
    def sup_u(self):
        return self.column(2)

    @property
    def deviation(self):
        return self.column(3)

    def relative_drift(self) -> float:
        H = self.hamiltonian
        return float(np.max(np.abs(H - H[0])) / abs(H[0])) if H[0] != 0 else float(np.max(np.abs(H)))


def _check(params):
    if not params.nonlinearity.is_polynomial:
        raise UnsupportedForFamily("time evolution is implemented for polynomial nonlinearities")


def _force(u, params):
    return params.gamma * eval_F(params.nonlinearity, u * u) * u


def _energy(u, v, grid, params):
    uxx = np.fft.ifft(grid.multiplier(2) * np.fft.fft(u)).real
    W = 0.5 * u * u
    if params.gamma != 0:
        W = W - 0.5 * params.gamma * eval_G(params.nonlinearity, u * u)
    return grid.spacing * float(np.sum(0.5 * v * v + 0.5 * uxx * uxx + W))


def energy(state: EvolutionState, params: BeamParameters) -> float:
    """Discrete Hamiltonian of ``(u, v)`` with spectral ``u_xx`` and trapezoid quadrature."""
    _check(params)
    return _energy(state.u.values, state.v.values, state.grid, params)


def make_state(u, v, params: BeamParameters, time: float = 0.0) -> EvolutionState:
    grid = u.grid
    if isinstance(v, np.ndarray):
        v = RealField(v, grid)
    return EvolutionState(u, v, float(time), _energy(u.values, v.values, grid, params))


def _stage_inverse(grid, dt):
    """Per-mode inverse of ``I - dt (A_gauss kron L_k)`` with ``L_k = [[0, 1], [-s_k, 0]]``."""
    k = grid.wavenumbers
    s = k ** 4 + 1.0
    n = grid.n_points
    Lk = np.zeros((n, 2, 2))
    Lk[:, 0, 1] = 1.0
    Lk[:, 1, 0] = -s
    M = np.tile(np.eye(4), (n, 1, 1))
    for i in range(2):
        for j in range(2):
            M[:, 2 * i:2 * i + 2, 2 * j:2 * j + 2] -= dt * GAUSS_A[i, j] * Lk
    return np.linalg.inv(M), s


def _apply_gauss(inv, rhs):
    # rhs: (4, n) complex in the order (u1, v1, u2, v2)
    return np.einsum("kij,jk->ik", inv, rhs)


def _gauss_step(u, v, dt, params, grid, inv, s, inner_tol, inner_max):
    uh, vh = np.fft.fft(u), np.fft.fft(v)
    base = np.array([uh, vh, uh, vh])
    # explicit predictor: stages equal to the current state
    fh = np.fft.fft(_force(u, params))
    forces = [fh, fh]
    Y = None
    for it in range(inner_max):
        rhs = base.copy()
        for i in range(2):
            rhs[2 * i + 1] += dt * (GAUSS_A[i, 0] * forces[0] + GAUSS_A[i, 1] * forces[1])
        Y_new = _apply_gauss(inv, rhs)
        U = np.fft.ifft(Y_new[[0, 2]], axis=1).real
        if Y is not None:
            change = np.max(np.abs(U - np.fft.ifft(Y[[0, 2]], axis=1).real))
            if change < inner_tol:
                Y = Y_new
                break
        Y = Y_new
        forces = [np.fft.fft(_force(U[0], params)), np.fft.fft(_force(U[1], params))]
        if not np.all(np.isfinite(U)):
            break
    else:
        raise StageNonConvergence(
            f"Gauss stage iteration did not reach {inner_tol:g} in {inner_max} sweeps; reduce dt"
        )
    if not np.all(np.isfinite(Y)):
        raise StageNonConvergence("stage iteration diverged; reduce dt")
    U = np.fft.ifft(Y[[0, 2]], axis=1).real
    fh = [np.fft.fft(_force(U[0], params)), np.fft.fft(_force(U[1], params))]
    du = sum(GAUSS_B[i] * Y[2 * i + 1] for i in range(2))
    dv = sum(GAUSS_B[i] * (-s * Y[2 * i] + fh[i]) for i in range(2))
    return np.fft.ifft(uh + dt * du).real, np.fft.ifft(vh + dt * dv).real


def irk_gauss4_step(state: EvolutionState, dt: float, params: BeamParameters,
                    inner_tol: float = INNER_TOL, inner_max: int = INNER_MAX,
                    _cache: dict = None) -> EvolutionState:
    """One two-stage Gauss step of size ``dt`` (negative ``dt`` steps backwards)."""
    _check(params)
    if dt == 0 or not np.isfinite(dt):
        raise InvalidArgument("dt must be a non-zero finite number")
    grid = state.grid
    if _cache is not None and _cache.get("key") == (grid, dt):
        inv, s = _cache["inv"], _cache["s"]
    else:
        inv, s = _stage_inverse(grid, dt)
        if _cache is not None:
            _cache.update(key=(grid, dt), inv=inv, s=s)
    with np.errstate(over="ignore", invalid="ignore"):
        u, v = _gauss_step(state.u.values, state.v.values, dt, params, grid, inv, s, inner_tol, inner_max)
    return EvolutionState(RealField(u, grid), RealField(v, grid), state.time + dt,
                          _energy(u, v, grid, params))


def perturbed_wave_initial(wave, eigenpair, epsilon: float) -> EvolutionState:
    """Lab-frame data ``(phi + eps v, -c phi' + eps (w - c v'))`` at t = 0.

    ``eigenpair = (lam, v, w)`` is an eigenvector of the linearisation in the
    co-moving frame, where ``w`` is the co-moving time derivative; the lab-frame
    velocity of the perturbation is therefore ``w - c v'``. ``v`` is rescaled to
    unit L2 norm (with ``w`` scaled alike), so ``|u - phi|_2 = eps``.
    """
    _, vmode, wmode = eigenpair
    grid = wave.grid
    v = np.asarray(vmode, dtype=float)
    w = np.asarray(wmode, dtype=float)
    nv = np.sqrt(grid.spacing * float(v @ v))
    if nv == 0:
        raise InvalidArgument("eigenfunction v must be non-zero")
    v, w = v / nv, w / nv
    c = wave.wavespeed
    d1 = grid.multiplier(1)
    phi_x = np.fft.ifft(d1 * wave.coefficients).real
    v_x = np.fft.ifft(d1 * np.fft.fft(v)).real
    u0 = wave.phi + epsilon * v
    ut0 = -c * phi_x + epsilon * (w - c * v_x)
    return make_state(RealField(u0, grid), RealField(ut0, grid), wave.params)


def shift_deviation(u: np.ndarray, phi_hat: np.ndarray, grid, newton_steps: int = 20):
    """``min_s |u - phi(. - s)|_2`` and the minimising shift ``s``.

    The best grid shift comes from an FFT cross-correlation and is refined by
    Newton iteration on the trigonometric interpolant of the correlation.
    """
    uh = np.fft.fft(u)
    n = grid.n_points
    h = grid.spacing
    k = grid.wavenumbers.copy()
    k[n // 2] = 0.0
    cross = uh * np.conj(phi_hat)
    corr = np.fft.ifft(cross).real
    # corr[m] = sum_j u_{j+m} phi_j, i.e. u correlated with phi moved right by m h
    m = int(np.argmax(corr))
    s = m * h if m <= n // 2 else (m - n) * h
    for _ in range(newton_steps):
        e = np.exp(1j * k * s)
        d1 = np.sum(1j * k * cross * e).real
        d2 = np.sum(-(k * k) * cross * e).real
        if d2 >= 0:
            break
        step = d1 / d2
        s -= step
        if abs(step) < 1e-14 * grid.half_length:
            break
    C = np.sum(cross * np.exp(1j * k * s)).real / n
    dev2 = h * (float(u @ u) + np.sum(np.abs(phi_hat) ** 2) / n - 2.0 * C)
    return float(np.sqrt(max(dev2, 0.0))), float(s)


def fit_growth(times, deviation, epsilon, lo=10.0, hi=100.0):
    """Least-squares exponential rate of ``deviation`` over ``[lo eps, hi eps]``.

    Only the first contiguous stretch of samples inside the window is used.
    Returns ``(rate, (t_start, t_end))`` or ``None`` with fewer than 3 samples.
    """
    t = np.asarray(times)
    d = np.asarray(deviation)
    inside = (d >= lo * epsilon) & (d <= hi * epsilon)
    idx = np.flatnonzero(inside)
    if idx.size < 3:
        return None
    run = np.split(idx, np.flatnonzero(np.diff(idx) > 1) + 1)[0]
    if run.size < 3:
        return None
    slope, _ = np.polyfit(t[run], np.log(d[run]), 1)
    return float(slope), (float(t[run[0]]), float(t[run[-1]]))


def evolve(initial: EvolutionState, T: float, dt: float, params: BeamParameters,
           wave_reference=None, sample_every: int = 10, inner_tol: float = INNER_TOL,
           inner_max: int = INNER_MAX, blowup_threshold: float = BLOWUP_THRESHOLD,
           epsilon: float = None) -> EvolutionSummary:
    """Integrate to time ``T`` with fixed ``dt``, sampling every ``sample_every`` steps.

    With a ``wave_reference`` the deviation is the shift-matched distance to
    the reference profile and an exponential growth rate is fitted over the
    window ``[10 eps, 100 eps]``; ``eps`` defaults to the initial deviation.

    The run stops with ``termination = "Blowup"`` once ``sup|u|`` exceeds
    ``blowup_threshold``, or when the stage iteration fails after ``sup|u|``
    has grown by more than ``BLOWUP_GROWTH``. Any other stage failure raises
    ``StageNonConvergence`` whose ``summary`` attribute holds the samples
    collected so far.
    """
    _check(params)
    if not (T > 0 and dt > 0):
        raise InvalidArgument("T and dt must be positive")
    if sample_every < 1:
        raise InvalidArgument("sample_every must be >= 1")
    grid = initial.grid
    phi_hat = None if wave_reference is None else np.fft.fft(wave_reference.phi)

    def sample(state):
        u = state.u.values
        dev = np.nan if phi_hat is None else shift_deviation(u, phi_hat, grid)[0]
        return (state.time, state.hamiltonian, float(np.max(np.abs(u))), dev)

    n_steps = int(round(T / dt))
    summary = EvolutionSummary([sample(initial)])
    sup0 = max(summary.samples[0][2], np.finfo(float).tiny)
    cache = {}
    state = initial
    for step in range(1, n_steps + 1):
        try:
            state = irk_gauss4_step(state, dt, params, inner_tol, inner_max, _cache=cache)
        except StageNonConvergence as exc:
            if float(np.max(np.abs(state.u.values))) > BLOWUP_GROWTH * sup0:
                # the fixed-dt stage solve cannot follow a collapsing solution
                summary.termination = "Blowup"
                break
            summary.termination = "StageNonConvergence"
            summary.final_state = state
            _finish(summary, epsilon)
            exc.summary = summary
            raise
        state = replace(state, time=step * dt + initial.time)
        sup = float(np.max(np.abs(state.u.values)))
        if not np.isfinite(sup) or sup > blowup_threshold:
            summary.termination = "Blowup"
            break
        if step % sample_every == 0 or step == n_steps:
            summary.samples.append(sample(state))
    summary.final_state = state
    _finish(summary, epsilon)
    return summary


def _finish(summary, epsilon):
    dev = summary.deviation
    if np.all(np.isnan(dev)):
        return
    eps = epsilon if epsilon is not None else dev[0]
    if eps > 0:
        summary.growth_fit = fit_growth(summary.times, dev, eps)
