"""
Spectral stability of computed waves.

Dense Fourier collocation matrices for L_+ and L_-, their Morse indices,
the constrained inverse of L_+ on {phi'}^perp, the Vakhitov-Kolokolov
quantities, and the full spectrum of the Hamiltonian linearisation

    beam:  (v, w)_t = [[0, I], [-L_+, 2c D1]] (v, w)
    NLS:   (v1, v2)_t = [[0, -L_-], [L_+, 0]] (v1, v2)

classified into real, complex-quadrant and negative-Krein imaginary
eigenvalues and checked against the count k_r + 2k_c + 2k_i^- = n(L) - n(D).
"""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import (DegenerateKernel, EigenFailure, FredholmViolation, InvalidArgument,
                     IndexMismatch, UnsupportedForFamily)
from .grid import PeriodicGrid, RealField, diff_matrix
from .nonlinearity import linearization_potentials
from .params import BEAM, NLS
from .profile import TravelingWave

L_PLUS = "L_plus"
L_MINUS = "L_minus"

EIGEN_TOL = 1e-4      # |Re lambda| below this counts as zero
ZERO_TOL = 1e-3       # |lambda| below this belongs to the generalised kernel
MORSE_TOL = 1e-8      # relative to the largest symbol value on the grid
KERNEL_TOL = 1e-6
ORTHO_TOL = 1e-8


@lru_cache(maxsize=8)
def _diff_matrices(grid: PeriodicGrid):
    return {k: diff_matrix(grid, k) for k in (1, 2, 4)}


@dataclass
class LinearOperatorMatrix:
    entries: np.ndarray
    which: str
    wave: TravelingWave = field(repr=False, default=None)
    _eig: tuple = field(default=None, repr=False)

    @property
    def n(self):
        return self.entries.shape[0]

    def symbol_scale(self) -> float:
        eq = self.wave.equation
        return float(np.max(np.abs(eq.symbol(self.wave.grid.wavenumbers))))

    def eigh(self):
        """Cached ``(eigenvalues, eigenvectors)`` in ascending order."""
        if self._eig is None:
            self._eig = np.linalg.eigh(self.entries)
        return self._eig

    def __matmul__(self, v):
        return self.entries @ np.asarray(v)


def assemble_operator(wave: TravelingWave, which: str = L_PLUS) -> LinearOperatorMatrix:
    """Dense symmetric matrix of ``L_+`` or ``L_-`` about the wave.

    ``alpha D4 + mu D2 + omega I - diag(V)`` with the potentials of
    :func:`~beamwave.nonlinearity.linearization_potentials`.
    """
    eq = wave.equation
    grid = wave.grid
    v_minus, v_plus = linearization_potentials(eq.nonlinearity, eq.gamma, wave.phi)
    if which == L_PLUS:
        V = v_plus
    elif which == L_MINUS:
        if v_minus is None:
            raise UnsupportedForFamily("L_minus is not defined for the exponential family")
        V = v_minus
    else:
        raise ValueError(f"unknown operator {which!r}")
    D = _diff_matrices(grid)
    A = eq.alpha * D[4] + eq.mu * D[2]
    A[np.diag_indices_from(A)] += eq.omega - V
    A = 0.5 * (A + A.T)
    return LinearOperatorMatrix(A, which, wave)


def morse_index(op: LinearOperatorMatrix, tol: float = MORSE_TOL) -> int:
    """Number of eigenvalues below ``-tol`` after scaling by the largest symbol value."""
    evals = op.eigh()[0]
    scale = op.symbol_scale() if op.wave is not None else 1.0
    return int(np.sum(evals / scale < -tol))


def numerical_kernel(op: LinearOperatorMatrix, tol: float = KERNEL_TOL) -> np.ndarray:
    evals, evecs = op.eigh()
    return evecs[:, np.abs(evals) < tol]


def solve_L_plus_constrained(op: LinearOperatorMatrix, rhs, kernel=None) -> RealField:
    """Unique ``w`` orthogonal to ``kernel`` (default ``phi'``) with ``L_+ w = rhs``."""
    grid = op.wave.grid
    rhs = np.asarray(rhs, dtype=float)
    if kernel is None:
        kernel = _diff_matrices(grid)[1] @ op.wave.phi
    kernel = np.asarray(kernel, dtype=float)
    knorm = np.linalg.norm(kernel)
    if knorm > 0:
        overlap = abs(rhs @ kernel)
        if overlap > ORTHO_TOL * np.linalg.norm(rhs) * knorm:
            raise FredholmViolation(
                f"right-hand side is not orthogonal to the kernel "
                f"(relative overlap {overlap / (np.linalg.norm(rhs) * knorm):.2e})"
            )
    evals, evecs = op.eigh()
    small = np.abs(evals) < KERNEL_TOL
    if small.sum() > 1:
        raise DegenerateKernel(f"L_+ has {int(small.sum())} near-zero eigenvalues")
    coeff = evecs.T @ rhs
    coeff[small] = 0.0
    w = evecs @ (coeff / np.where(small, 1.0, evals))
    if knorm > 0:
        khat = kernel / knorm
        w -= (w @ khat) * khat
    return RealField(w, grid)


def _inner(grid, f, g):
    return grid.spacing * float(np.dot(f, g))


def vk_beam(wave: TravelingWave, op: LinearOperatorMatrix = None) -> float:
    """``4 c^2 <L_+^{-1} phi'', phi''> + ||phi'||^2``; negative means stable."""
    op = op or assemble_operator(wave, L_PLUS)
    grid = wave.grid
    D = _diff_matrices(grid)
    d1 = D[1] @ wave.phi
    d2 = D[2] @ wave.phi
    w = solve_L_plus_constrained(op, d2, d1)
    c2 = wave.equation.mu
    return 4.0 * c2 * _inner(grid, w.values, d2) + _inner(grid, d1, d1)


def vk_nls(wave: TravelingWave, op: LinearOperatorMatrix = None) -> float:
    """``<L_+^{-1} phi, phi>``; negative means stable."""
    op = op or assemble_operator(wave, L_PLUS)
    grid = wave.grid
    d1 = _diff_matrices(grid)[1] @ wave.phi
    w = solve_L_plus_constrained(op, wave.phi, d1)
    return _inner(grid, w.values, wave.phi)


@dataclass
class SpectrumReport:
    eigenvalues: np.ndarray
    max_re: float
    morse_L_plus: int
    morse_L_minus: int
    vk_value: float
    counts: tuple
    index_identity_ok: bool
    negative_eigenfunction: RealField
    family: str = BEAM
    krein_signs: np.ndarray = field(default=None, repr=False)
    unstable_mode: tuple = field(default=None, repr=False)
    localization: np.ndarray = field(default=None, repr=False)

    @property
    def n_L(self) -> int:
        return self.morse_L_plus + (self.morse_L_minus if self.family == NLS else 0)

    @property
    def n_D(self) -> int:
        return 1 if self.vk_value < 0 else 0


@dataclass(frozen=True)
class IndexVerdict:
    k_r: int
    k_c: int
    k_i_minus: int
    n_L: int
    n_D: int
    stable: bool

    @property
    def lhs(self):
        return self.k_r + 2 * self.k_c + 2 * self.k_i_minus

    @property
    def rhs(self):
        return self.n_L - self.n_D


def linearization_matrix(wave: TravelingWave, family: str = None,
                         L_plus: LinearOperatorMatrix = None, L_minus: LinearOperatorMatrix = None):
    """The ``2n x 2n`` real matrix of the linearised flow and its energy operator."""
    family = family or wave.family
    n = wave.grid.n_points
    Lp = (L_plus or assemble_operator(wave, L_PLUS)).entries
    Z = np.zeros((n, n))
    if family == NLS:
        Lm = (L_minus or assemble_operator(wave, L_MINUS)).entries
        A = np.block([[Z, -Lm], [Lp, Z]])
        energy = (Lp, Lm)
    else:
        D1 = _diff_matrices(wave.grid)[1]
        A = np.block([[Z, np.eye(n)], [-Lp, 2.0 * wave.wavespeed * D1]])
        energy = (Lp, np.eye(n))
    return A, energy


def krein_signs(evecs: np.ndarray, energy) -> np.ndarray:
    """Sign of ``<L f, f>`` for each (complex) eigenvector column."""
    Lp, Lq = energy
    n = Lp.shape[0]
    top, bot = evecs[:n], evecs[n:]
    form = np.einsum("ij,ij->j", top.conj(), Lp @ top) + np.einsum("ij,ij->j", bot.conj(), Lq @ bot)
    return np.sign(form.real)


def classify(eigenvalues, signs, eigen_tol=EIGEN_TOL, zero_tol=ZERO_TOL):
    """Counts ``(k_r, k_c, k_i_minus)`` of a Hamiltonian spectrum."""
    lam = np.asarray(eigenvalues)
    re, im = lam.real, lam.imag
    away = np.abs(lam) >= zero_tol
    k_r = int(np.sum(away & (re > eigen_tol) & (np.abs(im) <= eigen_tol)))
    k_c = int(np.sum(away & (re > eigen_tol) & (im > eigen_tol)))
    imag = away & (np.abs(re) <= eigen_tol) & (im > eigen_tol)
    k_i = int(np.sum(imag & (signs < 0)))
    return k_r, k_c, k_i


def eigen_linearization(wave: TravelingWave, family: str = None,
                        eigen_tol: float = EIGEN_TOL) -> SpectrumReport:
    """Full spectrum of the linearisation about ``wave`` with index diagnostics."""
    family = family or wave.family
    Lp = assemble_operator(wave, L_PLUS)
    Lm = assemble_operator(wave, L_MINUS) if wave.equation.nonlinearity.is_polynomial else None
    A, energy = linearization_matrix(wave, family, Lp, Lm)
    try:
        evals, evecs = np.linalg.eig(A)
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(str(exc)) from exc
    if not np.all(np.isfinite(evals)):
        raise EigenFailure("eigensolver returned non-finite values")

    signs = krein_signs(evecs, energy)
    loc = localization(evecs, wave.grid)
    counts = classify(evals, signs, eigen_tol)
    morse_p = morse_index(Lp)
    morse_m = morse_index(Lm) if Lm is not None else 0
    vk = vk_nls(wave, Lp) if family == NLS else vk_beam(wave, Lp)

    ev, V = Lp.eigh()
    psi0 = RealField(V[:, 0], wave.grid)

    i_max = int(np.argmax(evals.real))
    vec = evecs[:, i_max]
    vec = vec * np.exp(-1j * np.angle(vec[np.argmax(np.abs(vec))]))
    mode = (evals[i_max], vec)

    report = SpectrumReport(
        eigenvalues=evals,
        max_re=float(evals.real.max()),
        morse_L_plus=morse_p,
        morse_L_minus=morse_m,
        vk_value=float(vk),
        counts=counts,
        index_identity_ok=False,
        negative_eigenfunction=psi0,
        family=family,
        krein_signs=signs,
        unstable_mode=mode,
        localization=loc,
    )
    k_r, k_c, k_i = counts
    report.index_identity_ok = (k_r + 2 * k_c + 2 * k_i) == report.n_L - report.n_D
    return report


def index_report(report: SpectrumReport) -> IndexVerdict:
    """Check the instability index count and return the stability verdict."""
    k_r, k_c, k_i = report.counts
    verdict = IndexVerdict(k_r, k_c, k_i, report.n_L, report.n_D, stable=(k_r == 0 and k_c == 0))
    if verdict.lhs != verdict.rhs:
        raise IndexMismatch(
            f"k_r + 2k_c + 2k_i^- = {verdict.lhs} but n(L) - n(D) = {verdict.rhs} "
            f"(k_r={k_r}, k_c={k_c}, k_i^-={k_i}, n(L)={verdict.n_L}, n(D)={verdict.n_D})"
        )
    return verdict


def localization(evecs: np.ndarray, grid: PeriodicGrid, width: float = 0.25) -> np.ndarray:
    """Fraction of each eigenvector's squared norm within ``|x| < width * L``."""
    n = grid.n_points
    inside = np.abs(grid.x) < width * grid.half_length
    w = np.abs(evecs[:n]) ** 2 + np.abs(evecs[n:]) ** 2
    return w[inside].sum(axis=0) / w.sum(axis=0)


def internal_modes(report: SpectrumReport, lo: float = ZERO_TOL, hi: float = None,
                   min_localization: float = 0.8):
    """Discrete eigenvalues in the upper half plane away from the origin.

    Real positive eigenvalues are always returned. Imaginary ones (``Im`` in
    ``(lo, hi)``) are kept only when their eigenvector is localized near the
    wave, which separates internal modes from the discretized continuum.
    """
    lam = report.eigenvalues
    keep = (np.abs(lam) > lo) & (lam.real > EIGEN_TOL) & (lam.imag >= -EIGEN_TOL)
    on_axis = (np.abs(lam.real) <= EIGEN_TOL) & (lam.imag > lo)
    if hi is not None:
        on_axis &= lam.imag < hi
    if report.localization is not None:
        on_axis &= report.localization > min_localization
    return np.sort_complex(lam[keep | on_axis])


def real_mode(report: SpectrumReport, grid: PeriodicGrid):
    """``(lambda, v, w)`` for the eigenvalue of largest real part.

    ``v`` is normalised to unit L2 norm and signed so that it raises the
    peak of the wave (``v(0) > 0``).
    """
    lam, vec = report.unstable_mode
    n = grid.n_points
    v, w = vec[:n].real, vec[n:].real
    scale = np.sqrt(grid.spacing * np.dot(v, v))
    v, w = v / scale, w / scale
    if v[n // 2] < 0:
        v, w = -v, -w
    return float(lam.real), RealField(v, grid), RealField(w, grid)


def ranked_mode(wave: TravelingWave, rank: int = 0):
    """``(lambda, v, w)`` for the eigenvalue of ``rank``-th largest real part.

    Normalised like :func:`real_mode`; for complex eigenvalues the real part
    of the eigenvector is returned.
    """
    A, _ = linearization_matrix(wave)
    lam, vecs = np.linalg.eig(A)
    order = np.lexsort((-lam.imag, -lam.real))
    if not 0 <= rank < len(order):
        raise InvalidArgument(f"mode rank must lie in [0, {len(order)})")
    i = order[rank]
    vec = vecs[:, i]
    vec = vec * np.exp(-1j * np.angle(vec[np.argmax(np.abs(vec))]))
    holder = SpectrumReport(lam, float(lam.real.max()), 0, 0, 0.0, (0, 0, 0), True, None,
                            unstable_mode=(lam[i], vec))
    return real_mode(holder, wave.grid)
