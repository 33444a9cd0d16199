"""Feedback-cooled optomechanical detection of weak impulsive forces."""
from .errors import (ArrivalTimeWarning, ConfigurationError, CoolingTimeWarning,
                     DegenerateObjectiveError, DomainError, OptoSNRError, StabilityError)
from .model import (HBAR, K_B, FeedbackConfig, NoiseModel, PhysicalParams, RawCavityParams,
                    Scheme, derive_kappa, thermal_strength)
from .response import PulseForce, chi, force_spectrum, force_time, mean_response
from .spectra import (NoiseBudget, noise_budget, position_noise_spectrum, stationary_snr,
                      default_omega_grid)
from .dynamics import (CovarianceState, CovarianceTimeline, StateSpace, build_state_space,
                       covariance_timeline, lyapunov_steady, propagate_covariance, two_time_qq)
from .measurement import (CycleResult, Filter, MeasurementPlan, averaged_snr, run_cycle,
                          windowed_noise, windowed_signal)

__version__ = "0.1.0"

__all__ = [
    "ArrivalTimeWarning",
    "ConfigurationError",
    "CoolingTimeWarning",
    "DegenerateObjectiveError",
    "DomainError",
    "OptoSNRError",
    "StabilityError",
    "HBAR",
    "K_B",
    "FeedbackConfig",
    "NoiseModel",
    "PhysicalParams",
    "RawCavityParams",
    "Scheme",
    "derive_kappa",
    "thermal_strength",
    "PulseForce",
    "chi",
    "force_spectrum",
    "force_time",
    "mean_response",
    "NoiseBudget",
    "noise_budget",
    "position_noise_spectrum",
    "stationary_snr",
    "default_omega_grid",
    "CovarianceState",
    "CovarianceTimeline",
    "StateSpace",
    "build_state_space",
    "covariance_timeline",
    "lyapunov_steady",
    "propagate_covariance",
    "two_time_qq",
    "CycleResult",
    "Filter",
    "MeasurementPlan",
    "averaged_snr",
    "run_cycle",
    "windowed_noise",
    "windowed_signal",
]
