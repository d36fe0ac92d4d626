"""
Nonlinearity families for the beam profile equation.

``polynomial``: F(r) = sum_k a_k r^k with a_k >= 0, entering as gamma F(phi^2) phi.
``exponential``: the Chen-McKenna term e^phi - 1 (no gamma, no phase symmetry).
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument, UnsupportedForFamily

POLYNOMIAL = "polynomial"
EXPONENTIAL = "exponential"


@dataclass(frozen=True)
class Nonlinearity:
    family: str
    coefficients: tuple = ()

    def __post_init__(self):
        if self.family == POLYNOMIAL:
            a = tuple(float(x) for x in self.coefficients)
            if not a or any(x < 0 or not np.isfinite(x) for x in a) or not any(x > 0 for x in a):
                raise InvalidArgument(
                    "polynomial coefficients a_1..a_N must be finite, >= 0, and not all zero"
                )
            object.__setattr__(self, "coefficients", a)
        elif self.family == EXPONENTIAL:
            if self.coefficients:
                raise InvalidArgument("exponential family takes no coefficients")
        else:
            raise InvalidArgument(f"unknown nonlinearity family {self.family!r}")

    @classmethod
    def cubic(cls):
        """F(r) = r, i.e. the cubic term phi^3."""
        return cls(POLYNOMIAL, (1.0,))

    @classmethod
    def polynomial(cls, *coefficients):
        return cls(POLYNOMIAL, tuple(coefficients))

    @classmethod
    def exponential(cls):
        return cls(EXPONENTIAL)

    @property
    def is_polynomial(self):
        return self.family == POLYNOMIAL


def _horner(coeffs, r):
    # evaluates sum_j coeffs[j] r^j
    out = np.zeros_like(r, dtype=float)
    for a in reversed(coeffs):
        out = out * r + a
    return out


def _check(nl, r):
    if not nl.is_polynomial:
        raise UnsupportedForFamily("F, F' and G are only defined for the polynomial family")
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise InvalidArgument("F, F' and G take r >= 0")
    return r


def eval_F(nl: Nonlinearity, r):
    r = _check(nl, r)
    return r * _horner(nl.coefficients, r)


def eval_Fprime(nl: Nonlinearity, r):
    r = _check(nl, r)
    a = nl.coefficients
    return _horner([(k + 1) * a[k] for k in range(len(a))], r)


def eval_G(nl: Nonlinearity, r):
    """Antiderivative G(r) = sum_k a_k r^(k+1) / (k+1), G(0) = 0."""
    r = _check(nl, r)
    a = nl.coefficients
    return r * r * _horner([a[k] / (k + 2) for k in range(len(a))], r)


def _warn_gamma(gamma):
    if gamma is not None and gamma != 1.0:
        warnings.warn("gamma is ignored for the exponential family", stacklevel=3)


def nonlinear_term(nl: Nonlinearity, gamma: float, phi):
    """Array version of :func:`profile_nonlinear_term` without the linear ``phi``.

    Returns ``gamma F(phi^2) phi`` (polynomial) or ``e^phi - 1 - phi`` (exponential),
    so that the zeroth-order part of the profile equation is ``phi - nonlinear_term``
    for polynomial families and ``phi + nonlinear_term`` for the exponential one.
    """
    phi = np.asarray(phi, dtype=float)
    if nl.is_polynomial:
        return gamma * eval_F(nl, phi * phi) * phi
    return np.expm1(phi) - phi


def zeroth_order(nl: Nonlinearity, gamma: float, phi, omega: float = 1.0):
    """``omega phi - gamma F(phi^2) phi`` or ``omega phi + (e^phi - 1 - phi)``."""
    phi = np.asarray(phi, dtype=float)
    if nl.is_polynomial:
        return omega * phi - gamma * eval_F(nl, phi * phi) * phi
    return omega * phi + np.expm1(phi) - phi


def zeroth_order_jacobian(nl: Nonlinearity, gamma: float, phi, omega: float = 1.0):
    """Pointwise derivative of :func:`zeroth_order` with respect to phi."""
    phi = np.asarray(phi, dtype=float)
    if nl.is_polynomial:
        r = phi * phi
        return omega - gamma * (eval_F(nl, r) + 2.0 * eval_Fprime(nl, r) * r)
    return omega + np.expm1(phi)


def profile_nonlinear_term(nl: Nonlinearity, gamma: float, phi):
    """Non-differential part of the profile equation, evaluated pointwise.

    ``phi - gamma F(phi^2) phi`` for polynomial families, ``e^phi - 1`` for the
    exponential family (gamma ignored there).
    """
    from .grid import RealField

    values = phi.values if isinstance(phi, RealField) else phi
    if not nl.is_polynomial:
        _warn_gamma(gamma)
        out = np.expm1(values)
    else:
        out = zeroth_order(nl, gamma, values)
    return RealField(out, phi.grid) if isinstance(phi, RealField) else out


def linearization_potentials(nl: Nonlinearity, gamma: float, phi):
    """Potentials with ``L_pm = (d^4 + c^2 d^2 + 1) - V_pm``.

    Returns ``(V_minus, V_plus)``; ``V_minus`` is ``None`` for the exponential
    family, whose ``V_plus = 1 - e^phi`` makes ``L_+ = d^4 + c^2 d^2 + e^phi``.
    """
    from .grid import RealField

    values = phi.values if isinstance(phi, RealField) else np.asarray(phi, dtype=float)
    wrap = (lambda v: RealField(v, phi.grid)) if isinstance(phi, RealField) else (lambda v: v)
    if not nl.is_polynomial:
        _warn_gamma(gamma)
        return None, wrap(-np.expm1(values))
    r = values * values
    v_minus = gamma * eval_F(nl, r)
    v_plus = v_minus + 2.0 * gamma * eval_Fprime(nl, r) * r
    return wrap(v_minus), wrap(v_plus)
