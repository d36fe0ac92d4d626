import numpy as np
import pytest

from beamwave.errors import InvalidArgument, UnsupportedForFamily
from beamwave.nonlinearity import (Nonlinearity, eval_F, eval_Fprime, eval_G,
                                   linearization_potentials, profile_nonlinear_term)


def test_polynomial_evaluation_matches_direct_sum():
    nl = Nonlinearity.polynomial(1.0, 0.5, 2.0)
    r = np.linspace(0, 2, 11)
    np.testing.assert_allclose(eval_F(nl, r), r + 0.5 * r ** 2 + 2 * r ** 3)
    np.testing.assert_allclose(eval_Fprime(nl, r), 1 + r + 6 * r ** 2)
    np.testing.assert_allclose(eval_G(nl, r), r ** 2 / 2 + 0.5 * r ** 3 / 3 + 2 * r ** 4 / 4)


def test_G_is_antiderivative_of_F():
    nl = Nonlinearity.polynomial(0.3, 1.0)
    r = np.linspace(0.1, 2, 7)
    h = 1e-5
    fd = (eval_G(nl, r + h) - eval_G(nl, r - h)) / (2 * h)
    np.testing.assert_allclose(fd, eval_F(nl, r), rtol=1e-8)
    assert eval_G(nl, 0.0) == 0.0


def test_negative_argument_rejected():
    with pytest.raises(InvalidArgument):
        eval_F(Nonlinearity.cubic(), -1.0)


def test_bad_coefficients():
    with pytest.raises(InvalidArgument):
        Nonlinearity.polynomial(-1.0)
    with pytest.raises(InvalidArgument):
        Nonlinearity.polynomial(0.0, 0.0)
    with pytest.raises(InvalidArgument):
        Nonlinearity("quadratic")


def test_exponential_family_has_no_F():
    nl = Nonlinearity.exponential()
    with pytest.raises(UnsupportedForFamily):
        eval_F(nl, 1.0)
    np.testing.assert_allclose(profile_nonlinear_term(nl, 1.0, np.array([0.0, 1.0])), [0.0, np.e - 1])
    with pytest.warns(UserWarning):
        profile_nonlinear_term(nl, 2.0, np.array([0.0]))


def test_profile_term_cubic():
    phi = np.array([0.0, 0.5, 1.0, -2.0])
    np.testing.assert_allclose(profile_nonlinear_term(Nonlinearity.cubic(), 2.0, phi), phi - 2 * phi ** 3)


def test_potentials_are_derivatives():
    nl = Nonlinearity.polynomial(1.0, 0.7)
    phi = np.linspace(-1.5, 1.5, 9)
    v_minus, v_plus = linearization_potentials(nl, 1.3, phi)
    N = lambda p: 1.3 * eval_F(nl, p * p) * p  # noqa: E731
    h = 1e-6
    np.testing.assert_allclose(v_plus, (N(phi + h) - N(phi - h)) / (2 * h), rtol=1e-7, atol=1e-9)
    np.testing.assert_allclose(v_minus, 1.3 * eval_F(nl, phi * phi))
    vm, vp = linearization_potentials(Nonlinearity.exponential(), 1.0, phi)
    assert vm is None
    np.testing.assert_allclose(vp, -np.expm1(phi))
