"""Reference two-level atom decaying into a finite bath of equispaced levels.

In the single-excitation subspace the interaction-picture amplitudes obey

    da0/dt  = -i H sum_n a_n exp(-i n dE t)
    da_n/dt = -i H a0 exp(+i n dE t),        -N <= n <= N

with a0(0) = 1. For dE -> 0 at fixed H^2/dE the reference amplitude decays
exponentially and the bath amplitudes follow closed-form propagators.
"""
from dataclasses import dataclass

import numpy as np

from .errors import (
    AmplitudeUnderflow,
    DomainError,
    NormDriftExceeded,
    StepTooLarge,
    WindowOutOfRange,
)

STABILITY_LIMIT = 0.1
NORM_TOLERANCE = 1e-6


@dataclass(frozen=True)
class BathModel:
    n_levels: int
    delta_e: float
    coupling: float

    def __post_init__(self):
        if int(self.n_levels) != self.n_levels or self.n_levels < 1:
            raise DomainError("n_levels must be a positive integer")
        if not self.delta_e > 0:
            raise DomainError("delta_e must be positive")
        if not self.coupling >= 0:
            raise DomainError("coupling must be non-negative")

    @property
    def indices(self):
        return np.arange(-self.n_levels, self.n_levels + 1)

    @property
    def level_energies(self):
        """Excitation energies E_n - E_0 of the bath levels."""
        return self.indices * self.delta_e

    def stability_number(self, dt):
        return dt * (self.n_levels * self.delta_e + self.coupling * np.sqrt(self.n_levels))


@dataclass(frozen=True, eq=False)
class AmplitudeTrajectory:
    model: BathModel
    times: np.ndarray
    a0: np.ndarray
    a_n: np.ndarray  # shape (len(times), 2N + 1), column j is level n = j - N

    @property
    def norm_total(self):
        return np.abs(self.a0) ** 2 + np.sum(np.abs(self.a_n) ** 2, axis=1)

    def level(self, n):
        """Time series of the bath amplitude with index ``n``."""
        return self.a_n[:, n + self.model.n_levels]


@dataclass(frozen=True)
class DecayFit:
    gamma: float
    fit_window: tuple
    residual: float


def golden_rule_rate(model):
    """Amplitude decay rate pi H^2 / dE of the infinitely wide band."""
    return np.pi * model.coupling**2 / model.delta_e


def integrate_bath(model, t_max, dt, stride=1, force=False):
    """Integrate the amplitude equations with fixed-step classical RK4.

    Phases ``exp(i n dE t)`` are evaluated exactly at each stage time, so
    the only discretization error is the Runge-Kutta truncation. Every
    ``stride``-th step is stored (t = 0 is always stored, and so is the
    final step).

    Raises
    ------
    StepTooLarge
        If ``dt * (N dE + H sqrt(N)) >= 0.1`` and ``force`` is false.
    NormDriftExceeded
        If total probability drifts by more than 1e-6 at a stored time.
    """
    if not t_max > 0:
        raise DomainError("t_max must be positive")
    if not dt > 0:
        raise DomainError("dt must be positive")
    if int(stride) != stride or stride < 1:
        raise DomainError("stride must be a positive integer")
    if not force and model.stability_number(dt) >= STABILITY_LIMIT:
        raise StepTooLarge(
            f"dt * (N dE + H sqrt(N)) = {model.stability_number(dt):.4g} "
            f">= {STABILITY_LIMIT}; reduce dt or pass force=True"
        )

    energies = model.level_energies
    h = model.coupling
    n_steps = int(np.ceil(t_max / dt - 1e-9))

    def rhs(t, a0, an):
        phase = np.exp(1j * energies * t)
        return -1j * h * np.sum(an * np.conj(phase)), -1j * h * a0 * phase

    a0 = 1.0 + 0.0j
    an = np.zeros(energies.size, dtype=complex)
    times, a0_store, an_store = [0.0], [a0], [an.copy()]
    for step in range(n_steps):
        t = step * dt
        k1_0, k1_n = rhs(t, a0, an)
        k2_0, k2_n = rhs(t + 0.5 * dt, a0 + 0.5 * dt * k1_0, an + 0.5 * dt * k1_n)
        k3_0, k3_n = rhs(t + 0.5 * dt, a0 + 0.5 * dt * k2_0, an + 0.5 * dt * k2_n)
        k4_0, k4_n = rhs(t + dt, a0 + dt * k3_0, an + dt * k3_n)
        a0 = a0 + dt / 6 * (k1_0 + 2 * k2_0 + 2 * k3_0 + k4_0)
        an = an + dt / 6 * (k1_n + 2 * k2_n + 2 * k3_n + k4_n)
        if (step + 1) % stride == 0 or step == n_steps - 1:
            norm = abs(a0) ** 2 + np.sum(np.abs(an) ** 2)
            if abs(norm - 1.0) > NORM_TOLERANCE:
                raise NormDriftExceeded(
                    f"total probability {norm:.9f} at t = {(step + 1) * dt:g}"
                )
            times.append((step + 1) * dt)
            a0_store.append(a0)
            an_store.append(an.copy())

    return AmplitudeTrajectory(
        model, np.array(times), np.array(a0_store), np.array(an_store)
    )


def fit_decay(traj, window):
    """Least-squares exponential rate of |a0(t)| over ``window``.

    Returns the negated slope of ln|a0| against t together with the RMS of
    the log-magnitude residuals.
    """
    t_start, t_end = window
    times = np.asarray(traj.times)
    if not (t_start < t_end and times[0] <= t_start and t_end <= times[-1]):
        raise WindowOutOfRange(
            f"window {window} is not inside [{times[0]}, {times[-1]}]"
        )
    mask = (times >= t_start) & (times <= t_end)
    if mask.sum() < 2:
        raise WindowOutOfRange("fit window contains fewer than two samples")
    magnitude = np.abs(np.asarray(traj.a0)[mask])
    if magnitude.min() <= 1e-12:
        raise AmplitudeUnderflow("|a0| falls below 1e-12 inside the fit window")
    t = times[mask]
    log_mag = np.log(magnitude)
    slope, intercept = np.polyfit(t, log_mag, 1)
    residual = np.sqrt(np.mean((log_mag - (slope * t + intercept)) ** 2))
    return DecayFit(float(-slope), (float(t_start), float(t_end)), float(residual))


def closed_form_propagator(n, coupling, gamma, delta_e, t):
    """Limiting propagator element U_n0(t) of the dE -> 0 bath.

    U_00 = exp(-gamma t); for n != 0
    U_n0 = i H (exp(-gamma t + i n dE t) - 1) / (gamma - i n dE).
    Vectorized over ``t``.
    """
    if not gamma > 0:
        raise DomainError("gamma must be positive")
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("t must be non-negative")
    if n == 0:
        value = np.exp(-gamma * t).astype(complex)
    else:
        rate = -gamma + 1j * n * delta_e
        value = -1j * coupling * np.expm1(rate * t) / rate
    return complex(value) if value.ndim == 0 else value


def trajectory_records(traj):
    """Rows of (t, re_a0, im_a0, norm_total, abs_a0) for CSV/JSON export."""
    norms = traj.norm_total
    return [
        {
            "t": float(t),
            "re_a0": float(a.real),
            "im_a0": float(a.imag),
            "norm_total": float(norm),
            "abs_a0": float(abs(a)),
        }
        for t, a, norm in zip(traj.times, traj.a0, norms)
    ]
