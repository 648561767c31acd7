"""Weak survival probability of a decaying level and its time integral.

The level is pre-selected excited at ``t_i`` and post-selected at ``t_f`` on
the bath state with one quantum of energy ``k dE``. Integrating the
finite-time weak survival probability over the window gives the weak
dwell time.
"""
import math
from dataclasses import dataclass

from .bath import closed_form_propagator
from .errors import DegenerateDenominator, DomainError
from .quadrature import adaptive_simpson

ASYMPTOTIC = "asymptotic"
FINITE_TIME = "finite_time"
DENOMINATOR_FLOOR = 1e-12
QUAD_TOL = 1e-10
QUAD_MAX_DEPTH = 40


@dataclass(frozen=True)
class PostSelectionSpec:
    kind: str
    gamma: float
    t_i: float
    t_f: float
    k: int = 0
    delta_e: float = 0.0

    def __post_init__(self):
        if self.kind not in (ASYMPTOTIC, FINITE_TIME):
            raise DomainError(f"unknown post-selection kind {self.kind!r}")
        if not self.t_f > self.t_i:
            raise DomainError("t_f must exceed t_i")
        if not self.gamma > 0:
            raise DomainError("gamma must be positive")
        if int(self.k) != self.k:
            raise DomainError("k must be an integer")
        if self.kind == FINITE_TIME and self.k != 0:
            raise DomainError("finite-time post-selection is defined for k = 0 only")

    @property
    def window(self):
        return self.t_f - self.t_i


@dataclass(frozen=True)
class WeakSurvival:
    value: complex
    t: float


def _one_minus_exp(z):
    """``1 - exp(z)`` without cancellation for small ``|z|``."""
    if isinstance(z, complex) and z.imag != 0.0:
        x, y = z.real, z.imag
        real = -(math.expm1(x) * math.cos(y) - 2.0 * math.sin(0.5 * y) ** 2)
        imag = -math.exp(x) * math.sin(y)
        return complex(real, imag)
    return -math.expm1(z.real if isinstance(z, complex) else z)


def _check_time(spec, t):
    if not (spec.t_i <= t <= spec.t_f):
        raise DomainError(f"t = {t} lies outside [{spec.t_i}, {spec.t_f}]")


def _bracket_ratio(rate, spec, t):
    denominator = _one_minus_exp(rate * spec.window)
    if abs(denominator) <= DENOMINATOR_FLOOR:
        raise DegenerateDenominator(
            f"|1 - exp(rate * T)| = {abs(denominator):.3e} for rate {rate}"
        )
    return _one_minus_exp(rate * (spec.t_f - t)) / denominator


def survival_weak_value(spec, t):
    """Weak value of the excited-state projector for bath post-selection k.

        exp(-g (t - t_i)) [1 - e^{(-g + i k dE)(t_f - t)}] / [1 - e^{(-g + i k dE)(t_f - t_i)}]

    Real for k = 0. Equals 1 at t_i and 0 at t_f.
    """
    _check_time(spec, t)
    rate = complex(-spec.gamma, spec.k * spec.delta_e) if spec.k else -spec.gamma
    value = math.exp(-spec.gamma * (t - spec.t_i)) * _bracket_ratio(rate, spec, t)
    return WeakSurvival(complex(value), t)


def survival_weak_value_finite(spec, t):
    """Weak survival probability for post-selection at a finite time.

    Same shape as the k = 0 asymptotic form with the bracket decaying at
    ``2 gamma``.
    """
    if spec.kind != FINITE_TIME:
        raise DomainError("spec.kind must be 'finite_time'")
    _check_time(spec, t)
    value = math.exp(-spec.gamma * (t - spec.t_i)) * _bracket_ratio(-2.0 * spec.gamma, spec, t)
    return WeakSurvival(complex(value), t)


def survival_from_propagators(spec, t, coupling=1.0):
    """Compose U_k0(t_f - t) U_00(t - t_i) / U_k0(t_f - t_i) from bath propagators.

    The coupling cancels; it is exposed only to exercise that cancellation.
    For k = 0 the n != 0 formula is continued to n = 0 (the post-selected
    bath level is then resonant with the reference atom).
    """
    _check_time(spec, t)

    def u_k0(tau):
        rate = complex(-spec.gamma, spec.k * spec.delta_e)
        return 1j * coupling * _one_minus_exp(rate * tau) / rate

    u_00 = closed_form_propagator(0, coupling, spec.gamma, spec.delta_e, t - spec.t_i)
    denominator = u_k0(spec.window)
    if abs(denominator) <= DENOMINATOR_FLOOR * abs(coupling):
        raise DegenerateDenominator("U_k0 over the full window vanishes")
    return WeakSurvival(u_k0(spec.t_f - t) * u_00 / denominator, t)


def weak_dwell_quadrature(spec, tol=QUAD_TOL, max_depth=QUAD_MAX_DEPTH):
    """Integral of the finite-time weak survival probability over [t_i, t_f].

    Adaptive Simpson to absolute tolerance ``tol``. For reference the exact
    value is ``tanh(gamma T / 2) / gamma`` with ``T = t_f - t_i``.
    """
    if spec.kind != FINITE_TIME:
        raise DomainError("weak dwell time requires a finite_time post-selection")
    gamma, t_i, t_f = spec.gamma, spec.t_i, spec.t_f
    denominator = -math.expm1(-2.0 * gamma * spec.window)

    def integrand(t):
        return math.exp(-gamma * (t - t_i)) * -math.expm1(-2.0 * gamma * (t_f - t)) / denominator

    return adaptive_simpson(integrand, t_i, t_f, tol=tol, max_depth=max_depth)


def dissipationless_survival(t_i, t, t_f):
    """gamma -> 0 limit of the finite-time weak survival: (t_f - t) / (t_f - t_i)."""
    if not (t_i <= t <= t_f):
        raise DomainError(f"t = {t} lies outside [{t_i}, {t_f}]")
    return (t_f - t) / (t_f - t_i)

