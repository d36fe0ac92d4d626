"""
Green's kernel of ``d^4 + c^2 d^2 + 1``, tail-decay fitting, and the
constrained variational construction of the wave.

The kernel is the inverse Fourier transform of ``1 / (xi^4 - c^2 xi^2 + 1)``,

    K(x) = (1/2pi) int exp(i xi x) / (xi^4 - c^2 xi^2 + 1) dxi,

so that ``K * f`` inverts the operator exactly. The quartic has roots
``+-a +- ib`` with ``a = sqrt(2 + c^2)/2`` and ``b = sqrt(2 - c^2)/2``;
closing the contour in the upper half plane gives, for ``x >= 0``,

    K^(j)(x) = Re[(i xi1)^j exp(i xi1 x) / (s xi1)],   xi1 = a + ib,
    s = sqrt(4 - c^4),

and in particular ``K(x) = exp(-b|x|) (a cos(ax) + b sin(a|x|)) / s``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (InsufficientTail, InvalidArgument, InvalidOrder, NoConvergence,
                     UnsupportedForFamily, WindowBelowFloor)
from .grid import (PeriodicGrid, RealField, _check_wavespeed, beam_symbol,
                   constraint_functional, resample, make_grid)
from .nonlinearity import Nonlinearity, eval_F, eval_G


def decay_rate(c: float) -> float:
    """Theoretical tail rate ``sqrt(2 - c^2) / 2``."""
    _check_wavespeed(c)
    return float(np.sqrt(2.0 - c * c) / 2.0)


def _roots(c):
    _check_wavespeed(c)
    a = np.sqrt(2.0 + c * c) / 2.0
    b = np.sqrt(2.0 - c * c) / 2.0
    return a, b, np.sqrt(4.0 - c ** 4)


def _kernel(x, c, j):
    a, b, s = _roots(c)
    x = np.asarray(x, dtype=float)
    xi = a + 1j * b
    ax = np.abs(x)
    val = ((1j * xi) ** j * np.exp(1j * xi * ax) / (s * xi)).real
    if j % 2:
        val = np.sign(x) * val  # odd derivatives of an even kernel; 0 at x = 0
    return val if val.ndim else float(val)


def green_kernel(x, c: float):
    """Kernel ``K(x)`` of ``(d^4 + c^2 d^2 + 1)^{-1}``; accepts scalars or arrays."""
    return _kernel(x, c, 0)


def green_kernel_derivative(x, c: float, j: int):
    """``j``-th derivative of :func:`green_kernel` for ``j`` in 1..3.

    ``K'''`` jumps by 1 at the origin (``K'''(0+) = 1/2``); the value returned
    at ``x = 0`` is the average, 0.
    """
    if j not in (1, 2, 3):
        raise InvalidOrder(f"derivative order must be 1, 2 or 3, got {j}")
    return _kernel(x, c, j)


@dataclass(frozen=True)
class DecayFit:
    rate: float
    intercept: float
    window: tuple
    residual_r2: float
    n_points: int = 0


def _local_maxima(x, f, refine: int = 8):
    """Peaks of ``|f|`` located on a ``refine``-times finer trigonometric interpolant."""
    n = len(f)
    if refine > 1:
        grid = make_grid(n, -x[0])
        fine = resample(RealField(f, grid), make_grid(refine * n, -x[0]))
        x, f = fine.grid.x, fine.values
    y = np.abs(f)
    i = np.flatnonzero((y[1:-1] > y[:-2]) & (y[1:-1] >= y[2:])) + 1
    # parabolic vertex through the three samples around each peak
    y0, y1, y2 = y[i - 1], y[i], y[i + 1]
    den = y0 - 2.0 * y1 + y2
    shift = np.where(den != 0, 0.5 * (y0 - y2) / np.where(den != 0, den, 1.0), 0.0)
    h = x[1] - x[0]
    return x[i] + shift * h, y1 - 0.25 * (y0 - y2) * shift


def fit_envelope(x, values, window):
    """Exponential rate through the local maxima of ``|values|`` inside ``window``."""
    xp, yp = x, np.abs(values)
    i = np.flatnonzero((yp[1:-1] > yp[:-2]) & (yp[1:-1] >= yp[2:])) + 1
    lo, hi = window
    sel = (xp[i] >= lo) & (xp[i] <= hi)
    return _fit(xp[i][sel], yp[i][sel], window)


def _fit(xm, ym, window):
    if xm.size < 4:
        raise InsufficientTail(f"only {xm.size} envelope maxima in window {window}; need 4")
    logs = np.log(ym)
    slope, intercept = np.polyfit(xm, logs, 1)
    pred = slope * xm + intercept
    ss_res = float(np.sum((logs - pred) ** 2))
    ss_tot = float(np.sum((logs - logs.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return DecayFit(float(-slope), float(intercept), (float(window[0]), float(window[1])),
                    float(r2), int(xm.size))


def fit_decay_rate(wave, window: tuple = None) -> DecayFit:
    """Fit ``|phi(x)| ~ C exp(-rate x)`` through the tail envelope on ``x > 0``.

    The envelope is the sequence of local maxima of ``|phi|``, located on an
    8x zero-padded interpolant. The default window starts where the envelope
    drops below ``1e-2 max|phi|`` and ends at ``0.75 L`` (away from the
    periodic image), or earlier where it reaches ``1e2`` times the noise floor.
    """
    phi = wave.phi if hasattr(wave, "phi") else np.asarray(wave.values)
    grid = wave.grid
    L = grid.half_length
    amp = float(np.max(np.abs(phi)))
    floor = 1e2 * np.finfo(float).eps * amp
    xm, ym = _local_maxima(grid.x, phi)
    right = xm > 0
    xm, ym = xm[right], ym[right]
    if window is None:
        tail = ym < 1e-2 * amp
        if not tail.any():
            raise InsufficientTail("profile never drops below 1e-2 of its maximum")
        lo = float(xm[np.argmax(tail)])
        hi = 0.75 * L
        above = xm[(xm >= lo) & (ym > floor)]
        if above.size:
            hi = min(hi, float(above.max()))
        if lo >= hi:
            raise InsufficientTail(f"tail only starts at x = {lo:.3g}, beyond 0.75 L; enlarge the domain")
        window = (lo, hi)
    lo, hi = window
    if not (0 <= lo < hi <= L):
        raise InvalidArgument(f"window {window} must lie inside (0, {L}]")
    sel = (xm >= lo) & (xm <= hi)
    if sel.any() and np.min(ym[sel]) <= floor:
        raise WindowBelowFloor(f"tail envelope in {window} falls to the noise floor {floor:.1e}")
    return _fit(xm[sel], ym[sel], window)


def kernel_decay_fit(c: float, window=(5.0, 25.0), n_samples: int = 20001) -> DecayFit:
    """Decay fit of ``|K|`` sampled densely on ``window``."""
    x = np.linspace(window[0] - 1.0, window[1] + 1.0, n_samples)
    return fit_envelope(x, green_kernel(x, c), window)


@dataclass
class VariationalResult:
    maximizer: RealField
    lambda_: float
    kappa: float
    objective: float
    el_residual: float
    kappa_rayleigh: float = None
    iterations: int = 0

    @property
    def scaled_profile(self) -> RealField:
        """``kappa^{-1/2} U``, the wave itself when F is cubic."""
        return self.maximizer * (1.0 / np.sqrt(self.kappa))


def _objective(u, nl, h):
    return h * float(np.sum(eval_G(nl, u * u)))


def variational_maximize(lam: float, c: float, nl: Nonlinearity = None, grid: PeriodicGrid = None,
                         tol: float = 1e-10, max_iter: int = 20000) -> VariationalResult:
    """Maximize ``I[u] = int G(u^2)`` on the constraint set ``L[u] = lam``.

    Preconditioned projected gradient ascent: the ascent direction is the
    component of ``A^{-1} grad I`` tangent to the constraint set in the
    ``A``-inner product, ``A = d^4 + c^2 d^2 + 1``; each trial point is scaled
    back onto ``L[u] = lam``. Steps backtrack from 1 by halving until the
    Armijo condition holds. Stops when the sup-norm of the direction is below
    ``tol``.
    """
    if not lam > 0:
        raise InvalidArgument(f"lambda must be positive, got {lam}")
    _check_wavespeed(c)
    nl = nl or Nonlinearity.cubic()
    if not nl.is_polynomial:
        raise UnsupportedForFamily("the variational problem needs a polynomial F")
    grid = grid or make_grid(1024, 12 * np.pi)
    h = grid.spacing
    sym = beam_symbol(grid, c)

    def A_inv(f):
        return np.fft.ifft(np.fft.fft(f) / sym).real

    def L(u):
        uh = np.fft.fft(u)
        return h * float(np.sum(sym * np.abs(uh) ** 2)) / grid.n_points

    def to_manifold(u):
        return u * np.sqrt(lam / L(u))

    x = grid.x
    u = to_manifold(1.0 / np.cosh(x))
    I = _objective(u, nl, h)
    it = 0
    for it in range(1, max_iter + 1):
        grad = 2.0 * eval_F(nl, u * u) * u
        pg = A_inv(grad)
        g = pg - (h * float(grad @ u) / lam) * u
        gnorm = float(np.max(np.abs(g)))
        if gnorm < tol:
            break
        # directional derivative of I along g in the A metric
        slope = h * float(grad @ g)
        tau = 1.0
        while True:
            trial = to_manifold(u + tau * g)
            I_trial = _objective(trial, nl, h)
            if I_trial >= I + 1e-4 * tau * slope or tau < 1e-12:
                break
            tau *= 0.5
        if tau < 1e-12:
            raise NoConvergence(f"line search stalled with direction norm {gnorm:.2e}")
        u, I = trial, I_trial
    else:
        raise NoConvergence(f"ascent stalled above tol: direction norm {gnorm:.2e} after {max_iter} steps")

    FU = eval_F(nl, u * u) * u
    kappa = h * float(FU @ u) / lam
    kappa_r = h * float(A_inv(FU) @ FU) / (h * float(u @ FU))
    Au = np.fft.ifft(sym * np.fft.fft(u)).real
    el = float(np.max(np.abs(Au - FU / kappa)))
    U = RealField(u, grid)
    return VariationalResult(U, float(lam), float(kappa), _objective(u, nl, h), el, float(kappa_r), it)


def constraint_value(result: VariationalResult, c: float) -> float:
    return constraint_functional(result.maximizer, c)
