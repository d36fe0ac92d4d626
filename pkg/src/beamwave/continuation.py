"""
Pseudo-arclength continuation of wave branches.

Unknowns are the even profile (held as FFT coefficients) and one scalar
parameter: the wavespeed ``c`` (``mu = c^2``) for beam families or the
frequency ``omega`` for the NLS family. Each corrector is a bordered Newton
solve with a dense collocation Jacobian.

The arclength metric is ``|dphi|^2 / (2L) + dp^2``, i.e. the mean-square
profile change over the period plus the parameter change.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import (DegenerateKernel, IndexMismatch, NoConvergence,
                     NoTransitionInRange)
from .grid import SQRT2, RealField, diff_matrix
from .params import NLS
from .profile import TravelingWave, _even_hat, residual_hat
from .stability import EIGEN_TOL, IndexVerdict, eigen_linearization, linearization_matrix

log = logging.getLogger(__name__)


class Termination(Enum):
    REACHED_END = "ReachedEnd"
    STEP_FAILURE = "StepFailure"
    PARAMETER_BOUND = "ParameterBound"


@dataclass
class BranchPoint:
    parameter: float
    wave: TravelingWave
    diag_norm: float
    diag_momentum: float
    vk_value: float = None
    max_re_lambda: float = None
    counts: tuple = None
    n_L: int = None
    index_ok: bool = None


@dataclass
class ContinuationCurve:
    points: list
    direction: int
    termination: Termination = Termination.REACHED_END
    turning_points: list = field(default_factory=list)
    message: str = ""

    @property
    def parameters(self):
        return np.array([p.parameter for p in self.points])

    @property
    def momentum(self):
        return np.array([p.diag_momentum for p in self.points])

    def __len__(self):
        return len(self.points)


@dataclass(frozen=True)
class Controls:
    ds_min: float = 1e-4
    ds_max: float = 0.05
    tol: float = 1e-10
    max_corrector: int = 12
    halve_above: int = 8
    double_below: int = 3
    max_points: int = 2000
    stop_at_fold: bool = False


def parameter_of(wave: TravelingWave) -> float:
    if wave.family == NLS:
        return wave.equation.omega
    return wave.equation.wavespeed


def _with_parameter(wave_eq, family, p):
    if family == NLS:
        return wave_eq.with_(omega=float(p))
    return wave_eq.with_(mu=float(p) ** 2)


def _admissible(eq, family, p) -> bool:
    if family == NLS:
        return p > 0 and eq.mu < 2.0 * np.sqrt(p)
    return 0.0 < p < SQRT2


def make_point(wave: TravelingWave) -> BranchPoint:
    g = wave.grid
    k = g.wavenumbers
    d1 = np.fft.ifft(1j * k * wave.coefficients * (np.arange(g.n_points) != g.n_points // 2)).real
    norm_d1 = g.spacing * float(d1 @ d1)
    p = parameter_of(wave)
    if wave.family == NLS:
        momentum = g.spacing * float(wave.phi @ wave.phi)
    else:
        momentum = p * norm_d1
    return BranchPoint(p, wave, norm_d1, momentum)


class _System:
    """Residual and dense Jacobian of the profile equation in (phi, p)."""

    def __init__(self, wave: TravelingWave):
        self.family = wave.family
        self.eq0 = wave.equation
        self.grid = g = wave.grid
        self.D2 = diff_matrix(g, 2)
        self.D4 = diff_matrix(g, 4)
        self.refl = g.reflection
        n = g.n_points
        self.P = 0.5 * (np.eye(n) + np.eye(n)[self.refl])
        self.theta = 1.0 / (2.0 * g.half_length)

    def eq(self, p):
        return _with_parameter(self.eq0, self.family, p)

    def residual(self, phat, p):
        return residual_hat(phat, self.eq(p), self.grid)

    def dres_dp(self, phi, p):
        if self.family == NLS:
            return phi
        return 2.0 * p * (self.D2 @ phi)

    def jacobian(self, phi, p):
        eq = self.eq(p)
        J = eq.alpha * self.D4 + eq.mu * self.D2
        J[np.diag_indices_from(J)] += eq.omega - eq.nonlinear_derivative(phi)
        # restrict to even fields; odd directions (the translation mode) map to themselves
        return J @ self.P + (np.eye(len(phi)) - self.P)

    def metric(self, dphi, dp):
        return self.theta * self.grid.spacing * float(dphi @ dphi) + dp * dp


def _phys(phat):
    return np.fft.ifft(phat).real


def _natural_solve(sys, phat, p, tol, max_iter):
    """Newton at fixed parameter with dense Jacobian; returns (phat, iterations)."""
    g = sys.grid
    for it in range(max_iter + 1):
        R = sys.residual(phat, p)
        if np.max(np.abs(R)) < tol:
            return phat, it
        if it == max_iter or not np.all(np.isfinite(R)):
            break
        phi = _phys(phat)
        delta = np.linalg.solve(sys.jacobian(phi, p), -R)
        phat = _even_hat(phat + np.fft.fft(delta), g)
    raise NoConvergence(f"natural-parameter Newton failed at p={p:.6g}")


def _corrector(sys, phat, p, base_phat, base_p, tan_phi, tan_p, ds, controls):
    g = sys.grid
    h = g.spacing
    n = g.n_points
    base_phi = _phys(base_phat)
    for it in range(controls.max_corrector + 1):
        phi = _phys(phat)
        R = sys.residual(phat, p)
        N = sys.theta * h * float((phi - base_phi) @ tan_phi) + (p - base_p) * tan_p - ds
        if np.max(np.abs(R)) < controls.tol and abs(N) < controls.tol:
            return phat, p, it
        if it == controls.max_corrector or not np.all(np.isfinite(R)):
            break
        B = np.empty((n + 1, n + 1))
        B[:n, :n] = sys.jacobian(phi, p)
        B[:n, n] = sys.dres_dp(phi, p)
        B[n, :n] = sys.theta * h * tan_phi
        B[n, n] = tan_p
        sol = np.linalg.solve(B, -np.concatenate([R, [N]]))
        phat = _even_hat(phat + np.fft.fft(sol[:n]), g)
        p = p + sol[n]
    raise NoConvergence("corrector did not converge")


def _to_wave(sys, phat, p, template):
    phi = _phys(phat)
    res = float(np.max(np.abs(sys.residual(phat, p))))
    centered = int(np.argmax(np.abs(phi))) == sys.grid.n_points // 2
    return TravelingWave(RealField(phi, sys.grid), sys.eq(p), template.family, res, centered, 0, phat)


def extend_branch(start: TravelingWave, target_parameter: float, ds: float = 0.02,
                  controls: Controls = None) -> ContinuationCurve:
    """Trace the branch through ``start`` until the parameter reaches ``target_parameter``.

    The first step is a natural-parameter step of size ``ds`` (giving the
    initial secant); later steps use secant prediction and a bordered Newton
    corrector. ``ds`` is halved on corrector failure or slow convergence and
    doubled after fast convergence, within ``[ds_min, ds_max]``.
    """
    controls = controls or Controls()
    if ds <= 0:
        raise ValueError("ds must be positive")
    p0 = parameter_of(start)
    sys = _System(start)
    points = [make_point(start)]
    direction = int(np.sign(target_parameter - p0))
    curve = ContinuationCurve(points, direction)
    if direction == 0:
        return curve

    ds = min(max(ds, controls.ds_min), controls.ds_max)
    phat_prev, p_prev = _even_hat(start.coefficients, sys.grid), p0

    # first point: natural-parameter step
    while True:
        step = min(ds, abs(target_parameter - p0))
        p1 = p0 + direction * step
        if not _admissible(sys.eq0, sys.family, p1):
            curve.termination = Termination.PARAMETER_BOUND
            return curve
        try:
            phat1, _ = _natural_solve(sys, phat_prev, p1, controls.tol, controls.max_corrector)
            break
        except NoConvergence:
            ds *= 0.5
            if ds < controls.ds_min:
                curve.termination = Termination.STEP_FAILURE
                curve.message = "first natural-parameter step failed"
                return curve
    points.append(make_point(_to_wave(sys, phat1, p1, start)))
    if np.isclose(p1, target_parameter, rtol=0, atol=1e-14):
        return curve
    phat_cur, p_cur = phat1, p1

    while len(points) < controls.max_points:
        dphi = _phys(phat_cur) - _phys(phat_prev)
        dp = p_cur - p_prev
        norm = np.sqrt(sys.metric(dphi, dp))
        tan_phi, tan_p = dphi / norm, dp / norm
        try:
            pred_phat = phat_cur + ds * np.fft.fft(tan_phi)
            pred_p = p_cur + ds * tan_p
            phat_new, p_new, iters = _corrector(sys, pred_phat, pred_p, phat_cur, p_cur,
                                                tan_phi, tan_p, ds, controls)
            if not _admissible(sys.eq0, sys.family, p_new):
                raise NoConvergence("left the admissible parameter window")
        except NoConvergence:
            ds *= 0.5
            if ds < controls.ds_min:
                if not _admissible(sys.eq0, sys.family, p_cur + tan_p * controls.ds_min):
                    curve.termination = Termination.PARAMETER_BOUND
                else:
                    curve.termination = Termination.STEP_FAILURE
                curve.message = f"corrector failed at p={p_cur:.6g} with ds < ds_min"
                return curve
            continue

        crossed = (p_new - target_parameter) * direction >= 0
        if crossed:
            # land exactly on the target from the last point
            try:
                phat_t, _ = _natural_solve(sys, phat_cur + (target_parameter - p_cur) / (p_new - p_cur)
                                           * (phat_new - phat_cur), target_parameter,
                                           controls.tol, controls.max_corrector)
                points.append(make_point(_to_wave(sys, phat_t, target_parameter, start)))
            except NoConvergence:
                points.append(make_point(_to_wave(sys, phat_new, p_new, start)))
            curve.termination = Termination.REACHED_END
            return curve

        if (p_new - p_cur) * np.sign(dp) < 0:
            curve.turning_points.append(len(points) - 1)
            if controls.stop_at_fold:
                curve.termination = Termination.PARAMETER_BOUND
                curve.message = f"turning point near p={p_cur:.6g}"
                return curve
        points.append(make_point(_to_wave(sys, phat_new, p_new, start)))
        phat_prev, p_prev = phat_cur, p_cur
        phat_cur, p_cur = phat_new, p_new
        if iters > controls.halve_above:
            ds = max(ds * 0.5, controls.ds_min)
        elif iters < controls.double_below:
            ds = min(ds * 2.0, controls.ds_max)
        log.debug("branch point %d: p=%.6f ds=%.3g iters=%d", len(points), p_new, ds, iters)
    curve.termination = Termination.STEP_FAILURE
    curve.message = "max_points reached"
    return curve


def branch_diagnostics(curve: ContinuationCurve, eigen_tol: float = EIGEN_TOL):
    """Fill VK values, max Re(lambda) and index counts for each branch point.

    Returns the table as a list of ``(parameter, diag_momentum, vk_value,
    max_re_lambda)`` rows. Points where L_+ has a degenerate numerical kernel
    keep ``vk_value = None`` (the VK criterion does not apply there).
    """
    if not curve.points:
        raise ValueError("empty curve")
    rows = []
    for pt in curve.points:
        try:
            rep = eigen_linearization(pt.wave, eigen_tol=eigen_tol)
            pt.vk_value = rep.vk_value
            pt.max_re_lambda = rep.max_re
            pt.counts = rep.counts
            pt.n_L = rep.n_L
            pt.index_ok = rep.index_identity_ok
        except DegenerateKernel:
            A, _ = linearization_matrix(pt.wave)
            pt.max_re_lambda = float(np.linalg.eigvals(A).real.max())
            pt.vk_value = None
        rows.append((pt.parameter, pt.diag_momentum, pt.vk_value, pt.max_re_lambda))
    return rows


def _vertex(x, y):
    """Abscissa of the extremum of the parabola through three points."""
    a = np.polyfit(x, y, 2)
    return float(-a[1] / (2.0 * a[0]))


def locate_transition(curve: ContinuationCurve) -> float:
    """Parameter value of the interior maximum of ``diag_momentum``.

    Quadratic interpolation through the largest sample and its neighbours.
    """
    params = curve.parameters
    m = curve.momentum
    if len(m) < 3:
        raise NoTransitionInRange("need at least three branch points")
    i = int(np.argmax(m))
    if i == 0 or i == len(m) - 1:
        raise NoTransitionInRange("diag_momentum has no interior maximum on this branch")
    return _vertex(params[i - 1:i + 2], m[i - 1:i + 2])


def eigen_transition(curve: ContinuationCurve, eigen_tol: float = EIGEN_TOL) -> float:
    """Parameter where max Re(lambda) reaches zero, from the branch diagnostics.

    Near the collision the real pair behaves like ``lambda^2 ~ (c* - c)``, so
    ``lambda^2`` is linearly extrapolated from the last two unstable points.
    """
    params = curve.parameters
    re = np.array([np.nan if p.max_re_lambda is None else p.max_re_lambda for p in curve.points])
    unstable = re > eigen_tol
    for i in range(len(re) - 1):
        if unstable[i] != unstable[i + 1]:
            j = i if unstable[i] else i + 1  # last unstable index
            k = j - 1 if unstable[i] else j + 1  # its unstable neighbour
            if 0 <= k < len(re) and unstable[k]:
                x = params[[k, j]]
                y = re[[k, j]] ** 2
                root = x[1] - y[1] * (x[1] - x[0]) / (y[1] - y[0])
                lo, hi = sorted(params[[i, i + 1]])
                return float(np.clip(root, lo, hi))
            return float(0.5 * (params[i] + params[i + 1]))
    raise NoTransitionInRange("max Re(lambda) does not change sign along the branch")


def check_index_counts(curve: ContinuationCurve):
    """Raise ``IndexMismatch`` at the first point violating the index count."""
    verdicts = []
    for pt in curve.points:
        if pt.counts is None or pt.vk_value is None:
            continue
        k_r, k_c, k_i = pt.counts
        n_D = 1 if pt.vk_value < 0 else 0
        v = IndexVerdict(k_r, k_c, k_i, pt.n_L, n_D, k_r == 0 and k_c == 0)
        if v.lhs != v.rhs:
            raise IndexMismatch(f"index count fails at parameter {pt.parameter:.6g}: {v}")
        verdicts.append(v)
    return verdicts


def momentum_derivative(curve: ContinuationCurve) -> np.ndarray:
    """Centered finite-difference derivative of ``diag_momentum`` along the curve.

    Uses the five-point interpolating stencil on the (generally non-uniform)
    parameter samples, falling back to three points next to the ends. End
    points are ``nan``.
    """
    p = curve.parameters
    m = curve.momentum
    out = np.full(len(p), np.nan)
    for i in range(1, len(p) - 1):
        r = 2 if 2 <= i <= len(p) - 3 else 1
        x = p[i - r:i + r + 1] - p[i]
        out[i] = np.polyder(np.polyfit(x, m[i - r:i + r + 1], 2 * r))[-1]
    return out
