"""Weak dwell time from a pair of pre/post-selected precession frequencies.

The decay rate comes from the retarded-dynamics inverse map, the dwell time
from quadrature of the finite-time weak survival probability. The report
carries the exact antiderivative ``tanh(gamma T/2)/gamma`` next to the
published ``coth(gamma T/2)/gamma`` expression so their disagreement is
visible rather than hidden.
"""
import math
from dataclasses import asdict, dataclass

from .errors import DissipationlessCase, DomainError
from .retarded import EXPANSION_LIMIT, delta_gamma_from_frequencies
from .weakvalue import FINITE_TIME, PostSelectionSpec, weak_dwell_quadrature


@dataclass(frozen=True)
class DwellRequest:
    omega: float
    omega_prime: float
    window: float

    def __post_init__(self):
        if not self.omega > 0:
            raise DomainError("omega must be positive")
        if not self.window > 0:
            raise DomainError("window T must be positive")
        if self.omega_prime > 2.0 * self.omega:
            raise DomainError(
                f"omega_prime = {self.omega_prime} exceeds 2*omega = {2.0 * self.omega}"
            )


@dataclass(frozen=True)
class DwellTimeReport:
    omega: float
    omega_prime: float
    window: float
    gamma: float
    delta: float
    tau_quadrature: float
    tau_tanh: float
    tau_coth_paper: float
    relative_discrepancy: float
    asymptotic_limit: float
    coth_exceeds_window: bool
    expansion_valid: bool

    def as_record(self):
        return asdict(self)


def tau_tanh(gamma, window):
    return math.tanh(0.5 * gamma * window) / gamma


def tau_coth(gamma, window):
    return 1.0 / (gamma * math.tanh(0.5 * gamma * window))


def dwell_time(request):
    """Build the dwell-time report for ``request``.

    Raises
    ------
    DomainError
        If omega' > 2 omega.
    DissipationlessCase
        If omega' == 2 omega, where gamma = 0; ``exc.limit`` is T / 2.
    """
    delta, gamma = delta_gamma_from_frequencies(request.omega, request.omega_prime)
    T = request.window
    if gamma == 0.0:
        raise DissipationlessCase(
            "omega_prime == 2*omega gives gamma = 0; the dwell time tends to T/2",
            limit=0.5 * T,
        )
    spec = PostSelectionSpec(FINITE_TIME, gamma, 0.0, T)
    tau_q = weak_dwell_quadrature(spec)
    tau_c = tau_coth(gamma, T)
    return DwellTimeReport(
        omega=request.omega,
        omega_prime=request.omega_prime,
        window=T,
        gamma=gamma,
        delta=delta,
        tau_quadrature=tau_q,
        tau_tanh=tau_tanh(gamma, T),
        tau_coth_paper=tau_c,
        relative_discrepancy=abs(tau_c - tau_q) / tau_q,
        asymptotic_limit=1.0 / gamma,
        coth_exceeds_window=tau_c >= T,
        expansion_valid=(2.0 * request.omega * delta) ** 2 < EXPANSION_LIMIT,
    )


def dwell_spin_flip(omega, window):
    """Dwell time for pre-selection at omega and post-selection at -omega."""
    return dwell_time(DwellRequest(omega, -omega, window))
