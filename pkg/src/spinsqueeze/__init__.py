"""Spin squeezing of driven atomic ensembles in an optical cavity.

Steady states, linearized quantum Langevin fluctuations (drift and
diffusion matrices), stationary covariances from the Lyapunov equation,
noise spectra with input-output normalization, and mean-spin-frame
minimal variances, for the reduced two-level model and the full
three-level model it derives from.
"""

from .params import (
    ConfigError,
    EffectiveParams,
    ParameterError,
    Reduction,
    ReductionInvalidError,
    SqueezedVacuum,
    ThreeLevelParams,
    TwoLevelUnits,
    VACUUM,
    internal_units,
    reduce,
)
from .noise import (
    CovarianceMatrix,
    FluctuationSystem,
    InstabilityError,
    NoiseBudget,
    OutgoingSpectrum,
    RegimeWarning,
    ResidualError,
    SpectrumMatrix,
    TurningPointError,
    decompose,
    integrate_spectrum,
    outgoing_spectrum,
    solve_lyapunov,
    spectrum,
    stability_margin,
)
from .spinframe import (
    SqueezingReport,
    ZeroMeanSpinError,
    mean_spin_angles,
    minimal_variance,
    squeezing_report,
    transverse_variances,
)
from .efftwo import (
    DegenerateSpinError,
    SteadyState2L,
    adiabatic_diffusion,
    adiabatic_drift,
    adiabatic_system,
    analytic_min_variance,
    corrected_steady_state,
    diffusion_atomic,
    diffusion_field,
    drift_matrix_5,
    fluctuation_system,
    input_intensity,
    steady_state,
    turning_points,
)
from .lambda3 import (
    SteadyState3L,
    UnphysicalBranchError,
    diffusion_10,
    drift_matrix_10,
    steady_state_at_intensity,
)
from . import studies

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
