"""
Periodic Fourier collocation on [-L, L).

All transforms use the forward normalisation ``c_k = fft(f) / n`` so that
``f(x_m) = sum_k c_k exp(i k (x_m + L))``. Odd-order derivatives drop the
Nyquist mode (keeps them real and skew-symmetric); even orders keep it.

Quadrature is the periodic trapezoid rule ``h * sum(f)``.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.lib.mixins import NDArrayOperatorsMixin

from .errors import InvalidGrid, InvalidOrder, SymbolNotPositive

SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True)
class PeriodicGrid:
    """Uniform grid of ``n_points`` nodes ``x_m = -L + m h`` on a period ``2L``."""

    n_points: int
    half_length: float

    def __post_init__(self):
        if int(self.n_points) != self.n_points or self.n_points < 8 or self.n_points % 2:
            raise InvalidGrid(f"n_points must be an even integer >= 8, got {self.n_points}")
        if not np.isfinite(self.half_length) or self.half_length <= 0:
            raise InvalidGrid(f"half_length must be positive, got {self.half_length}")

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_length / self.n_points

    @cached_property
    def x(self) -> np.ndarray:
        return -self.half_length + self.spacing * np.arange(self.n_points)

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """Wavenumbers ``pi j / L`` in FFT order; index ``n/2`` is the Nyquist mode."""
        j = np.fft.fftfreq(self.n_points, d=1.0 / self.n_points)
        return np.pi * j / self.half_length

    @cached_property
    def reflection(self) -> np.ndarray:
        """Index map ``m -> n - m (mod n)`` realising ``x -> -x`` on the nodes."""
        return (-np.arange(self.n_points)) % self.n_points

    def multiplier(self, order: int) -> np.ndarray:
        """Fourier multiplier ``(i k)^order`` with the Nyquist rule applied."""
        k = self.wavenumbers
        m = (1j * k) ** order
        if order % 2:
            m[self.n_points // 2] = 0.0
        return m

    def refined(self, factor: int = 2) -> "PeriodicGrid":
        return PeriodicGrid(self.n_points * factor, self.half_length)


class RealField(NDArrayOperatorsMixin):
    """Real samples of a function on a :class:`PeriodicGrid`.

    Behaves like a read-only 1-D array under numpy ufuncs and arithmetic;
    results that keep the grid length are wrapped back into ``RealField``.
    """

    __slots__ = ("values", "grid")

    def __init__(self, values, grid: PeriodicGrid):
        values = np.array(values, dtype=float)
        if values.shape != (grid.n_points,):
            raise InvalidGrid(
                f"field of shape {values.shape} does not match grid of {grid.n_points} points"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("RealField values must be finite")
        values.flags.writeable = False
        self.values = values
        self.grid = grid

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.values
        return self.values.astype(dtype)

    def __array_ufunc__(self, ufunc, method, *inputs, **kwargs):
        args = [i.values if isinstance(i, RealField) else i for i in inputs]
        out = getattr(ufunc, method)(*args, **kwargs)
        if isinstance(out, np.ndarray) and out.shape == self.values.shape and out.dtype.kind == "f":
            return RealField(out, self.grid)
        return out

    def __len__(self):
        return self.grid.n_points

    def __getitem__(self, item):
        return self.values[item]

    def __repr__(self):
        return f"RealField(n={self.grid.n_points}, L={self.grid.half_length:.6g})"

    @classmethod
    def from_function(cls, func, grid: PeriodicGrid) -> "RealField":
        return cls(func(grid.x), grid)


def make_grid(n_points: int, half_length: float) -> PeriodicGrid:
    return PeriodicGrid(n_points, half_length)


def default_grid() -> PeriodicGrid:
    """The 1024-point grid on [-12 pi, 12 pi) used for the beam computations."""
    return PeriodicGrid(1024, 12.0 * np.pi)


def _values(f):
    return f.values if isinstance(f, RealField) else np.asarray(f, dtype=float)


def _apply_multiplier(f, grid, mult):
    fh = np.fft.fft(_values(f))
    return np.fft.ifft(mult * fh).real


def differentiate(f: RealField, order: int = 1) -> RealField:
    """Spectral derivative of ``f``; exact for every resolved Fourier mode."""
    if order not in (1, 2, 3, 4):
        raise InvalidOrder(f"order must be in 1..4, got {order}")
    g = f.grid
    return RealField(_apply_multiplier(f, g, g.multiplier(order)), g)


def beam_symbol(grid: PeriodicGrid, c: float, alpha: float = 1.0, mu=None, omega: float = 1.0):
    """Symbol of ``alpha d^4 + mu d^2 + omega``; defaults to ``k^4 - c^2 k^2 + 1``."""
    k2 = grid.wavenumbers ** 2
    if mu is None:
        mu = c * c
    return alpha * k2 * k2 - mu * k2 + omega


def symbol_min(c: float) -> float:
    """Minimum of ``xi^4 - c^2 xi^2 + 1`` over real ``xi``, i.e. ``1 - c^4/4``."""
    _check_wavespeed(c)
    return 1.0 - c ** 4 / 4.0


def _check_wavespeed(c):
    if not (0.0 <= abs(c) < SQRT2):
        raise SymbolNotPositive(f"wavespeed must satisfy 0 <= c < sqrt(2) ~ 1.41421, got {c}")


def apply_beam_symbol(f: RealField, c: float) -> RealField:
    """``f'''' + c^2 f'' + f`` computed in Fourier space."""
    g = f.grid
    return RealField(_apply_multiplier(f, g, beam_symbol(g, c)), g)


def invert_beam_symbol(f: RealField, c: float) -> RealField:
    _check_wavespeed(c)
    g = f.grid
    return RealField(_apply_multiplier(f, g, 1.0 / beam_symbol(g, c)), g)


def inner(f, g, grid: PeriodicGrid = None) -> float:
    """Trapezoid inner product ``h * sum(f g)``."""
    grid = grid or getattr(f, "grid", None) or g.grid
    return float(grid.spacing * np.dot(_values(f), _values(g)))


def norm_sq(f, grid: PeriodicGrid = None) -> float:
    return inner(f, f, grid)


def constraint_functional(f: RealField, c: float) -> float:
    """``int (f'')^2 - c^2 (f')^2 + f^2 dx`` with spectral derivatives."""
    d1 = differentiate(f, 1)
    d2 = differentiate(f, 2)
    return f.grid.spacing * float(np.sum(d2.values ** 2 - c * c * d1.values ** 2 + f.values ** 2))


def fourier_coefficients(f: RealField) -> np.ndarray:
    return np.fft.fft(f.values) / f.grid.n_points


def even_part(f):
    """Project onto fields with ``f(x) = f(-x)``."""
    if isinstance(f, RealField):
        return RealField(0.5 * (f.values + f.values[f.grid.reflection]), f.grid)
    raise TypeError("even_part expects a RealField")


def resample(f: RealField, grid: PeriodicGrid) -> RealField:
    """Trigonometric interpolation of ``f`` onto another grid of the same period."""
    if not np.isclose(grid.half_length, f.grid.half_length, rtol=1e-14, atol=0):
        raise InvalidGrid("resample requires grids with the same period")
    n, m = f.grid.n_points, grid.n_points
    fh = np.fft.fft(f.values) / n
    out = np.zeros(m, dtype=complex)
    half = min(n, m) // 2
    out[:half] = fh[:half]
    out[m - half + 1:] = fh[n - half + 1:]
    # split/merge the shared Nyquist coefficient so the interpolant stays real
    if m > n:
        out[half] = 0.5 * fh[half]
        out[m - half] = 0.5 * fh[half]
    elif m < n:
        out[half] = fh[half] + fh[n - half]
    else:
        out[half] = fh[half]
    return RealField(np.fft.ifft(out * m).real, grid)


def diff_matrix(grid: PeriodicGrid, order: int) -> np.ndarray:
    """Dense spectral differentiation matrix of the given order (1..4)."""
    if order not in (1, 2, 3, 4):
        raise InvalidOrder(f"order must be in 1..4, got {order}")
    eye = np.eye(grid.n_points)
    mult = grid.multiplier(order)
    return np.fft.ifft(mult[:, None] * np.fft.fft(eye, axis=0), axis=0).real
