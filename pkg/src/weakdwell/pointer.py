"""Impulsive von Neumann measurement with a Gaussian pointer.

The pointer position Q is discretized on a uniform grid. After the
interaction ``g P A`` and post-selection on ``post`` the pointer is

    Phi_f(Q) = sum_k <a_k|pre> <post|a_k> phi(Q - g a_k)

which for small ``g / delta`` approaches ``<post|pre> phi(Q - g A_w)``.
"""
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateWavefunction,
    DomainError,
    GridTooNarrow,
    NearOrthogonalPostSelection,
    NonHermitianOperator,
)
from .qcore import is_hermitian

MIN_POINTS = 64
SPAN_WIDTHS = 8.0
DEGENERATE_NORM = 1e-14


@dataclass(frozen=True)
class PointerGrid:
    q_min: float
    q_max: float
    n_points: int

    def __post_init__(self):
        if self.n_points < MIN_POINTS:
            raise DomainError(f"n_points must be >= {MIN_POINTS}, got {self.n_points}")
        if not self.q_max > self.q_min:
            raise DomainError("q_max must exceed q_min")

    @property
    def dq(self):
        return (self.q_max - self.q_min) / (self.n_points - 1)

    @property
    def q(self):
        return np.linspace(self.q_min, self.q_max, self.n_points)

    def refined(self):
        """Same span with the spacing halved."""
        return PointerGrid(self.q_min, self.q_max, 2 * self.n_points - 1)


@dataclass(frozen=True, eq=False)
class PointerWavefunction:
    grid: PointerGrid
    amplitudes: np.ndarray
    delta: float

    def norm(self):
        """Trapezoidal estimate of the integral of |Phi|^2."""
        return float(np.trapezoid(np.abs(self.amplitudes) ** 2, dx=self.grid.dq))

    def normalized(self):
        norm = self.norm()
        if norm <= DEGENERATE_NORM:
            raise DegenerateWavefunction(f"pointer norm {norm:.3e} is too small")
        return PointerWavefunction(self.grid, self.amplitudes / np.sqrt(norm), self.delta)

    def probability(self):
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True, eq=False)
class MeasurementOutcome:
    final_pointer: PointerWavefunction
    mean_q: float
    mean_p: float
    post_selection_probability: float


def _gaussian(q, center, delta):
    return (delta**2 * np.pi) ** -0.25 * np.exp(-((q - center) ** 2) / (2 * delta**2))


def gaussian_pointer(grid, delta):
    """Centered Gaussian pointer of width ``delta`` sampled on ``grid``."""
    if not delta > 0:
        raise DomainError("delta must be positive")
    if grid.q_min > -SPAN_WIDTHS * delta or grid.q_max < SPAN_WIDTHS * delta:
        raise GridTooNarrow(
            f"grid [{grid.q_min}, {grid.q_max}] does not cover "
            f"[-{SPAN_WIDTHS:g} delta, {SPAN_WIDTHS:g} delta] for delta = {delta}"
        )
    wf = PointerWavefunction(grid, _gaussian(grid.q, 0.0, delta).astype(complex), delta)
    return wf.normalized()


def _spectral_derivative(values, dq):
    k = 2 * np.pi * np.fft.fftfreq(values.size, d=dq)
    return np.fft.ifft(1j * k * np.fft.fft(values))


def pointer_moments(wf):
    """Return ``(mean_q, mean_p)`` of the renormalized wavefunction.

    <Q> uses trapezoidal quadrature; <P> = Im int Phi* dPhi/dQ with an FFT
    derivative, which assumes the amplitude has decayed at the grid ends.
    """
    norm = wf.norm()
    if norm <= DEGENERATE_NORM:
        raise DegenerateWavefunction(f"pointer norm {norm:.3e} is too small")
    dq = wf.grid.dq
    phi = wf.amplitudes
    mean_q = np.trapezoid(wf.grid.q * np.abs(phi) ** 2, dx=dq) / norm
    mean_p = np.trapezoid(np.conj(phi) * _spectral_derivative(phi, dq), dx=dq).imag / norm
    return float(mean_q), float(mean_p)


def weak_measure(pre, post, op, coupling, pointer):
    """Couple ``op`` to the pointer with strength ``coupling``, then post-select.

    The pointer is assumed to start as a centered Gaussian (``pointer.delta``
    sets its width); each eigen-component of ``pre`` displaces it by
    ``coupling * eigenvalue``.
    """
    op = np.asarray(op, dtype=complex)
    if not is_hermitian(op):
        raise NonHermitianOperator("the measured observable must be Hermitian")
    pre = np.asarray(pre, dtype=complex)
    post = np.asarray(post, dtype=complex)

    eigenvalues, eigenvectors = np.linalg.eigh(op)
    q = pointer.grid.q
    phi = np.zeros_like(q, dtype=complex)
    for k, a_k in enumerate(eigenvalues):
        vec = eigenvectors[:, k]
        weight = np.vdot(vec, pre) * np.vdot(post, vec)
        phi += weight * _gaussian(q, coupling * a_k, pointer.delta)

    final = PointerWavefunction(pointer.grid, phi, pointer.delta)
    probability = final.norm()
    if probability < DEGENERATE_NORM:
        raise NearOrthogonalPostSelection(
            f"post-selected pointer norm {probability:.3e} is below {DEGENERATE_NORM:g}"
        )
    mean_q, mean_p = pointer_moments(final)
    return MeasurementOutcome(final, mean_q, mean_p, float(min(probability, 1.0)))
