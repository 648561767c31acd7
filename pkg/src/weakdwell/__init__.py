"""Weak values, finite-bath decay and weak-value dwell times for a spin-1/2."""

__version__ = "0.1.0"

from .bath import (  # noqa: E402
    AmplitudeTrajectory,
    BathModel,
    DecayFit,
    closed_form_propagator,
    fit_decay,
    golden_rule_rate,
    integrate_bath,
)
from .dwell import DwellRequest, DwellTimeReport, dwell_spin_flip, dwell_time  # noqa: E402
from .pointer import (  # noqa: E402
    MeasurementOutcome,
    PointerGrid,
    PointerWavefunction,
    gaussian_pointer,
    pointer_moments,
    weak_measure,
)
from .qcore import (  # noqa: E402
    PrecessionParams,
    precession_unitary,
    time_dependent_weak_value,
    weak_value,
)
from .retarded import (  # noqa: E402
    EffectiveParams,
    RetardedParams,
    delta_gamma_from_frequencies,
    effective_params,
    retarded_evolve,
    retarded_generator,
)
from .weakvalue import (  # noqa: E402
    PostSelectionSpec,
    WeakSurvival,
    survival_weak_value,
    survival_weak_value_finite,
    weak_dwell_quadrature,
)
