"""Retarded (finite-difference-in-time) dynamics of a spin-1/2 in a field.

With a retardation time ``delta`` and the ground-state energy subtracted,
the trial solution ``exp(-alpha t)`` gives

    alpha = (1 / delta) ln(1 + i (H - H0) delta),   H - H0 = diag(2 omega, 0)

so the excited component decays while the ground component is frozen.
Expanding the logarithm to third order yields an effective precession
frequency and decay rate; the inverse map recovers (delta, gamma) from a
pair of pre/post-selected frequencies (omega, omega').
"""
import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

EXPANSION_LIMIT = 0.5


class ExpansionValidityWarning(UserWarning):
    """The third-order expansion in 2*omega*delta is no longer reliable."""


@dataclass(frozen=True)
class RetardedParams:
    omega: float
    delta: float

    def __post_init__(self):
        if not self.omega > 0:
            raise DomainError("omega must be positive")
        if not self.delta >= 0:
            raise DomainError("delta must be non-negative")

    @property
    def expansion_parameter(self):
        return (2.0 * self.omega * self.delta) ** 2

    @property
    def expansion_valid(self):
        return self.expansion_parameter < EXPANSION_LIMIT


@dataclass(frozen=True)
class EffectiveParams:
    omega_prime: float
    gamma: float


@dataclass(frozen=True, eq=False)
class RetardedState:
    """Unnormalized spinor after non-unitary evolution."""

    vector: np.ndarray

    @property
    def norm(self):
        return float(np.linalg.norm(self.vector))

    @property
    def survival_probability(self):
        return self.norm**2


def _alpha_excited(omega, delta):
    # ln(1 + i x) / delta with x = 2 omega delta, split to keep precision as delta -> 0
    x = 2.0 * omega * delta
    return complex(0.5 * math.log1p(x * x), math.atan(x)) / delta


def retarded_generator(omega, delta):
    """Decay generator ``alpha = diag(ln(1 + 2 i omega delta) / delta, 0)``.

    Principal branch; ``1 + 2 i omega delta`` is in the right half-plane so
    the branch cut is never approached.
    """
    if not delta > 0:
        raise DomainError("delta must be positive")
    return np.diag([_alpha_excited(omega, delta), 0.0j])


def retarded_evolve(state0, omega, delta, t):
    """Apply ``exp(-alpha t)`` to ``state0``.

    The excited (upper) component picks up ``(1 + 2 i omega delta)^(-t / delta)``,
    whose modulus is ``(1 + 4 omega^2 delta^2)^(-t / (2 delta))``; the ground
    component is unchanged.
    """
    if not delta > 0:
        raise DomainError("delta must be positive")
    if not t >= 0:
        raise DomainError("t must be non-negative")
    psi = np.array(state0, dtype=complex)
    psi[0] = psi[0] * cmath.exp(-_alpha_excited(omega, delta) * t)
    return RetardedState(psi)


def effective_params(omega, delta):
    """Third-order effective frequency and decay rate.

    omega' = 2 omega (1 - 4 omega^2 delta^2 / 3), gamma = 2 omega^2 delta.
    Warns with ``ExpansionValidityWarning`` once ``(2 omega delta)^2 >= 0.5``.
    """
    params = RetardedParams(omega, delta)
    if not params.expansion_valid:
        warnings.warn(
            f"(2 omega delta)^2 = {params.expansion_parameter:.3g} >= {EXPANSION_LIMIT}; "
            "third-order frequency and decay rate are unreliable",
            ExpansionValidityWarning,
            stacklevel=2,
        )
    omega_prime = 2.0 * omega * (1.0 - 4.0 * omega**2 * delta**2 / 3.0)
    return EffectiveParams(omega_prime, 2.0 * omega**2 * delta)


def delta_gamma_from_frequencies(omega, omega_prime):
    """Invert the third-order relations for ``(delta, gamma)``.

    delta = sqrt(3 (1 - omega'/2 omega)) / (2 omega) and
    gamma = omega sqrt(3 (1 - omega'/2 omega)) = 2 omega^2 delta.

    Raises
    ------
    DomainError
        If ``omega <= 0`` or ``omega' > 2 omega`` (imaginary retardation time).
    """
    if not omega > 0:
        raise DomainError("omega must be positive")
    if omega_prime > 2.0 * omega:
        raise DomainError(
            f"omega_prime = {omega_prime} exceeds 2*omega = {2.0 * omega}; "
            "no real retardation time"
        )
    root = math.sqrt(3.0 * (1.0 - omega_prime / (2.0 * omega)))
    return root / (2.0 * omega), omega * root
