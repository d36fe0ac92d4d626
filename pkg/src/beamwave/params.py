"""Parameter sets and the generalised profile equation.

Every solver works with :class:`ProfileEquation`,

    alpha phi'''' + mu phi'' + omega phi - N_blend(phi) = 0,

where the nonlinear part ``N_blend`` interpolates between the homotopy start
(cubic for polynomial families, quadratic ``-phi^2/2`` for the exponential
family) at ``blend = 0`` and the target nonlinearity at ``blend = 1``.
The beam equation is ``alpha = 1, mu = c^2, omega = 1``; the fourth-order
NLS profile is ``alpha = 1`` with its own ``mu, omega`` and cubic F.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InvalidArgument, SymbolNotPositive
from .grid import SQRT2
from .nonlinearity import Nonlinearity, eval_F, eval_Fprime

BEAM = "beam"
NLS = "nls"


@dataclass(frozen=True)
class BeamParameters:
    wavespeed: float
    gamma: float = 1.0
    nonlinearity: Nonlinearity = field(default_factory=Nonlinearity.cubic)

    def __post_init__(self):
        if not (0.0 <= self.wavespeed < SQRT2):
            raise SymbolNotPositive(
                f"wavespeed must satisfy 0 <= c < sqrt(2) ~ 1.41421, got {self.wavespeed}"
            )
        if not self.gamma > 0:
            raise InvalidArgument(f"gamma must be positive, got {self.gamma}")

    def equation(self) -> "ProfileEquation":
        return ProfileEquation(self.nonlinearity, gamma=self.gamma, mu=self.wavespeed ** 2)


@dataclass(frozen=True)
class NlsParameters:
    mu: float
    omega: float

    def __post_init__(self):
        if not (self.omega > 0 and self.mu < 2.0 * np.sqrt(self.omega)):
            raise InvalidArgument(
                f"NLS parameters need omega > mu^2/4 (mu < 2 sqrt(omega)); got mu={self.mu}, omega={self.omega}"
            )

    def equation(self) -> "ProfileEquation":
        return ProfileEquation(Nonlinearity.cubic(), gamma=1.0, mu=self.mu, omega=self.omega)


@dataclass(frozen=True)
class ProfileEquation:
    nonlinearity: Nonlinearity
    gamma: float = 1.0
    alpha: float = 1.0
    mu: float = 1.0
    omega: float = 1.0
    blend: float = 1.0

    PARAMETERS = ("alpha", "mu", "omega", "gamma", "blend")

    def with_(self, **changes) -> "ProfileEquation":
        return replace(self, **changes)

    def get(self, name: str) -> float:
        if name not in self.PARAMETERS:
            raise InvalidArgument(f"unknown equation parameter {name!r}")
        return getattr(self, name)

    @property
    def wavespeed(self) -> float:
        return float(np.sqrt(max(self.mu, 0.0)))

    def symbol(self, k):
        k2 = k * k
        return self.alpha * k2 * k2 - self.mu * k2 + self.omega

    def symbol_min(self) -> float:
        """Minimum over real xi of ``alpha xi^4 - mu xi^2 + omega``."""
        if self.alpha > 0 and self.mu > 0:
            return self.omega - self.mu ** 2 / (4.0 * self.alpha)
        if self.alpha == 0 and self.mu > 0:
            return -np.inf
        return self.omega

    def nonlinear(self, phi):
        """The nonlinear part N(phi) subtracted from the linear operator."""
        s = self.blend
        if self.nonlinearity.is_polynomial:
            r = phi * phi
            out = s * self.gamma * eval_F(self.nonlinearity, r) * phi
            if s != 1.0:
                out = out + (1.0 - s) * self.gamma * r * phi
            return out
        # exponential target: omega phi + e^phi - 1 - phi; start: omega phi + phi^2/2
        out = -s * (np.expm1(phi) - phi)
        if s != 1.0:
            out = out - (1.0 - s) * 0.5 * phi * phi
        return out

    def nonlinear_derivative(self, phi):
        s = self.blend
        if self.nonlinearity.is_polynomial:
            r = phi * phi
            out = s * self.gamma * (eval_F(self.nonlinearity, r) + 2.0 * eval_Fprime(self.nonlinearity, r) * r)
            if s != 1.0:
                out = out + (1.0 - s) * 3.0 * self.gamma * r
            return out
        out = -s * np.expm1(phi)
        if s != 1.0:
            out = out - (1.0 - s) * phi
        return out
