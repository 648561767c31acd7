"""Two-level state and operator algebra plus weak-value kernels.

States are 1D complex numpy arrays ``[up, down]`` and operators are 2x2
complex arrays. ``hbar = 1`` throughout. The weak-value kernels accept
arrays of any matching dimension so that the finite-bath propagators can
be fed through the same code path.
"""
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NearOrthogonalPostSelection

OVERLAP_EPSILON = 1e-10

IDENTITY = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def spin_state(up, down):
    """Return the normalized spinor ``up|z+> + down|z->``."""
    psi = np.array([up, down], dtype=complex)
    norm = np.linalg.norm(psi)
    if not np.isfinite(norm) or norm == 0.0:
        raise DomainError("spinor components must be finite and not both zero")
    return psi / norm


def bloch_state(theta, phi=0.0):
    """Spinor pointing along polar angle ``theta`` and azimuth ``phi``."""
    return spin_state(np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2))


Z_PLUS = spin_state(1, 0)
Z_MINUS = spin_state(0, 1)
X_PLUS = spin_state(1, 1)
X_MINUS = spin_state(1, -1)
Y_PLUS = spin_state(1, 1j)
Y_MINUS = spin_state(1, -1j)

NAMED_STATES = {
    "z+": Z_PLUS, "z-": Z_MINUS,
    "x+": X_PLUS, "x-": X_MINUS,
    "y+": Y_PLUS, "y-": Y_MINUS,
}
NAMED_OPERATORS = {
    "identity": IDENTITY,
    "sigma_x": SIGMA_X,
    "sigma_y": SIGMA_Y,
    "sigma_z": SIGMA_Z,
}


@dataclass(frozen=True)
class PrecessionParams:
    """Larmor precession of a spin at rest in a field along z.

    omega is eB/2m in units with hbar = 1.
    """

    omega: float

    def __post_init__(self):
        if not np.isfinite(self.omega):
            raise DomainError("omega must be finite")


def dagger(op):
    return np.conj(np.transpose(op))


def is_hermitian(op, atol=1e-12):
    op = np.asarray(op)
    return np.allclose(op, dagger(op), rtol=0.0, atol=atol)


def projector(state):
    """Rank-one projector ``|state><state|``."""
    psi = np.asarray(state, dtype=complex)
    return np.outer(psi, np.conj(psi)) / np.vdot(psi, psi).real


def precession_unitary(params, t):
    """Evolution operator ``diag(exp(i omega t / 2), exp(-i omega t / 2))``.

    Note the half-angle phases: this is the generator ``(omega/2) sigma_z``
    up to an overall sign convention, which is what the retarded and dwell
    computations downstream assume.
    """
    omega = params.omega if isinstance(params, PrecessionParams) else float(params)
    if not np.isfinite(t):
        raise DomainError("t must be finite")
    phase = 0.5 * omega * t
    return np.diag([np.exp(1j * phase), np.exp(-1j * phase)])


def _checked_overlap(post, pre, amplitude):
    scale = np.linalg.norm(post) * np.linalg.norm(pre)
    if abs(amplitude) <= OVERLAP_EPSILON * scale:
        raise NearOrthogonalPostSelection(
            f"|<post|pre>| = {abs(amplitude):.3e} is below the "
            f"post-selection threshold {OVERLAP_EPSILON:g}"
        )
    return amplitude


def weak_value(pre, post, op):
    """Weak value ``<post|op|pre> / <post|pre>``.

    The result is complex in general and is not confined to the spectrum
    of ``op``.

    Raises
    ------
    NearOrthogonalPostSelection
        If ``|<post|pre>|`` is below ``OVERLAP_EPSILON`` times the state norms.
    """
    pre = np.asarray(pre, dtype=complex)
    post = np.asarray(post, dtype=complex)
    denominator = _checked_overlap(post, pre, np.vdot(post, pre))
    return complex(np.vdot(post, np.asarray(op) @ pre) / denominator)


def time_dependent_weak_value(pre, post, op, t_i, t, t_f, evolve):
    """Weak value of ``op`` at an intermediate time ``t_i <= t <= t_f``.

    ``evolve(tau)`` must return the propagator over a duration ``tau``
    (unitary or not) with ``evolve(0)`` equal to the identity. Evaluates

        <post| U(t_f - t) op U(t - t_i) |pre> / <post| U(t_f - t_i) |pre>
    """
    if not (t_i <= t <= t_f):
        raise DomainError(f"t = {t} lies outside [{t_i}, {t_f}]")
    pre = np.asarray(pre, dtype=complex)
    post = np.asarray(post, dtype=complex)
    forward = np.asarray(evolve(t - t_i)) @ pre
    numerator = np.vdot(post, np.asarray(evolve(t_f - t)) @ (np.asarray(op) @ forward))
    full = np.vdot(post, np.asarray(evolve(t_f - t_i)) @ pre)
    denominator = _checked_overlap(post, pre, full)
    return complex(numerator / denominator)
