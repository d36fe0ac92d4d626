import numpy as np
import pytest
from scipy.integrate import quad

from beamwave.analysis import (constraint_value, decay_rate, fit_decay_rate, green_kernel,
                               green_kernel_derivative, kernel_decay_fit, variational_maximize)
from beamwave.errors import (InsufficientTail, InvalidArgument, InvalidOrder, SymbolNotPositive,
                             UnsupportedForFamily, WindowBelowFloor)
from beamwave.grid import RealField, invert_beam_symbol, make_grid
from beamwave.nonlinearity import Nonlinearity


def kernel_quad(x, c):
    """``(1/pi) int_0^inf cos(xi x) / (xi^4 - c^2 xi^2 + 1) dxi`` by QUADPACK."""
    f = lambda xi: 1.0 / (xi ** 4 - c * c * xi ** 2 + 1.0)  # noqa: E731
    if x == 0:
        val = quad(f, 0, np.inf, epsabs=1e-13, epsrel=1e-13)[0]
    else:
        val = quad(f, 0, np.inf, weight="cos", wvar=abs(x), epsabs=1e-11, limlst=100)[0]
    return val / np.pi


@pytest.mark.parametrize("c", [0.0, 0.5, 1.0, 1.3])
def test_kernel_against_quadrature(c):
    for x in (0.0, 0.3, 1.0, 2.5, 7.0, -4.0):
        assert green_kernel(x, c) == pytest.approx(kernel_quad(x, c), abs=1e-9)


def test_kernel_at_origin_zero_speed():
    assert green_kernel(0.0, 0.0) == pytest.approx(1 / (2 * np.sqrt(2)), abs=1e-15)
    assert abs(green_kernel(0.0, 0.0) - kernel_quad(0.0, 0.0)) < 1e-8


def test_kernel_is_even_and_vectorised():
    x = np.linspace(-5, 5, 11)
    k = green_kernel(x, 0.7)
    np.testing.assert_allclose(k, k[::-1], atol=1e-15)
    assert isinstance(green_kernel(1.0, 0.7), float)


def test_kernel_derivatives_by_finite_differences():
    c, h = 0.9, 1e-5
    x = np.array([0.4, 1.3, 3.0, -2.2])
    for j in (1, 2, 3):
        lower = green_kernel if j == 1 else (lambda t, c: green_kernel_derivative(t, c, j - 1))
        fd = (lower(x + h, c) - lower(x - h, c)) / (2 * h)
        np.testing.assert_allclose(green_kernel_derivative(x, c, j), fd, rtol=1e-6, atol=1e-9)
    assert green_kernel_derivative(0.0, c, 1) == 0.0
    assert green_kernel_derivative(1e-12, c, 3) == pytest.approx(0.5, abs=1e-9)
    with pytest.raises(InvalidOrder):
        green_kernel_derivative(1.0, c, 4)


def test_kernel_inverts_operator():
    c = 1.1
    g = make_grid(1024, 40.0)
    f = np.exp(-g.x ** 2)
    u = invert_beam_symbol(RealField(f, g), c).values
    conv = g.spacing * green_kernel(g.x[:, None] - g.x[None, :], c) @ f
    inner = np.abs(g.x) < 10
    # the trapezoid sum crosses the K''' jump, so it is only O(h^4) accurate
    assert np.max(np.abs(u[inner] - conv[inner])) < 1e-6


def test_kernel_tail_rate():
    for c in (0.0, 0.5, 1.0, 1.3):
        fit = kernel_decay_fit(c)
        assert abs(fit.rate - decay_rate(c)) / decay_rate(c) < 1e-3


def test_decay_rate_domain():
    assert decay_rate(0.0) == pytest.approx(np.sqrt(2) / 2)
    with pytest.raises(SymbolNotPositive):
        decay_rate(1.5)


def test_fit_on_synthetic_profile():
    g = make_grid(1024, 12 * np.pi)
    f = RealField(np.cos(1.2 * g.x) / np.cosh(0.5 * g.x), g)
    fit = fit_decay_rate(f)
    assert fit.rate == pytest.approx(0.5, rel=1e-4)
    assert fit.residual_r2 > 0.999


def test_fit_failures():
    g = make_grid(1024, 12 * np.pi)
    f = RealField(np.cos(1.2 * g.x) / np.cosh(0.5 * g.x), g)
    with pytest.raises(InsufficientTail):
        fit_decay_rate(f, window=(10.0, 11.0))
    with pytest.raises(InvalidArgument):
        fit_decay_rate(f, window=(5.0, 100.0))
    slow = RealField(np.cos(1.2 * g.x) / np.cosh(0.05 * g.x), g)
    with pytest.raises(InsufficientTail):
        fit_decay_rate(slow)
    gauss = RealField(np.exp(-g.x ** 2) * np.cos(3 * g.x), g)
    with pytest.raises(WindowBelowFloor):
        fit_decay_rate(gauss, window=(4.0, 20.0))


def test_wave_tail_rate(wave_c1):
    fit = fit_decay_rate(wave_c1)
    assert abs(fit.rate - decay_rate(1.0)) / decay_rate(1.0) < 0.01


@pytest.fixture(scope="module")
def var_c1(grid256):
    return variational_maximize(1.0, 1.0, grid=grid256)


def test_variational_matches_newton(var_c1, wave_c1):
    r = var_c1
    assert r.el_residual < 1e-6
    assert abs(r.kappa - r.kappa_rayleigh) / r.kappa < 1e-6
    assert constraint_value(r, 1.0) == pytest.approx(1.0, rel=1e-12)
    u = r.scaled_profile.values
    shift = wave_c1.grid.n_points // 2 - int(np.argmax(np.abs(u)))
    u = np.roll(u, shift)
    u = u * np.sign(u[wave_c1.grid.n_points // 2])
    assert np.max(np.abs(u - wave_c1.phi)) < 1e-4


def test_multiplier_scaling_for_cubic(grid256, var_c1):
    # for F(x) = x the maximiser scales with sqrt(lambda), so M/lambda^2 is constant
    r2 = variational_maximize(2.0, 1.0, grid=grid256)
    assert r2.objective / 4 == pytest.approx(var_c1.objective, rel=1e-8)
    assert r2.kappa == pytest.approx(2 * var_c1.kappa, rel=1e-8)


def test_multiplier_ratio_grows_for_higher_powers(grid256):
    nl = Nonlinearity.polynomial(1.0, 1.0)
    m = [variational_maximize(lam, 1.0, nl, grid256, tol=1e-8).objective / lam ** 2 for lam in (0.5, 1.0, 2.0)]
    assert m[0] < m[1] < m[2]


def test_variational_rejects_bad_input(grid256):
    with pytest.raises(InvalidArgument):
        variational_maximize(0.0, 1.0, grid=grid256)
    with pytest.raises(UnsupportedForFamily):
        variational_maximize(1.0, 1.0, Nonlinearity.exponential(), grid256)
