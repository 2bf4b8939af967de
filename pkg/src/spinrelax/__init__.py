"""Spin-1 relaxometry toolkit.

Level structure and transition frequencies of a spin-1 defect, multi-channel
relaxation rates across temperature and magnetic field, stretched-exponential
decay synthesis and fitting, and a Monte Carlo dilute-bath model for the
stretching exponent.
"""

__version__ = "0.1.0"

from .bath import (BathConfig, BetaEstimate, SurvivalCurve, estimate_beta,
                   mean_nn_spacing, sample_rates, sample_realization,
                   survival_curve)
from .constants import MU_B_GHZ_PER_T, spin_operators
from .decay import (DecayCurve, PhotonNoise, StretchedExpParams, contrast_model,
                    default_schedule, laplace_average, synthesize_curve)
from .errors import (ConfigurationError, DegeneracyError, DomainError,
                     IdentifiabilityError, InsufficientDataError,
                     MaskedFieldError, ParseError, SpinRelaxError)
from .fitting import (FitResult, RateSurface, RateSurfaceFitter,
                      StretchedExpFitter, SurfaceModelConfig, aicc,
                      compare_models, fit_rate_surface, fit_stretched_exp)
from .hamiltonian import (DEFAULT_LAC_WINDOW, LevelSet, SpinSystemParams,
                          TransitionFrequencies, build_hamiltonian, eigenlevels,
                          exclusion_windows, in_exclusion,
                          lower_transition_minimum, transition_frequencies)
from .rates import (CrossRelaxParams, RateBreakdown, RelaxationParams,
                    argmin_field, gamma_cross_relax, gamma_spin_phonon,
                    gamma_spin_spin, gamma_total, rate_components,
                    transition_channels)

__all__ = [
    "__version__",
    "MU_B_GHZ_PER_T", "spin_operators",
    "SpinRelaxError", "DomainError", "DegeneracyError", "MaskedFieldError",
    "ConfigurationError", "InsufficientDataError", "IdentifiabilityError",
    "ParseError",
    "SpinSystemParams", "LevelSet", "TransitionFrequencies", "DEFAULT_LAC_WINDOW",
    "build_hamiltonian", "eigenlevels", "transition_frequencies",
    "exclusion_windows", "in_exclusion", "lower_transition_minimum",
    "RelaxationParams", "CrossRelaxParams", "RateBreakdown",
    "gamma_spin_phonon", "gamma_spin_spin", "gamma_cross_relax", "gamma_total",
    "rate_components", "transition_channels", "argmin_field",
    "StretchedExpParams", "DecayCurve", "PhotonNoise", "contrast_model",
    "default_schedule", "synthesize_curve", "laplace_average",
    "BathConfig", "SurvivalCurve", "BetaEstimate", "mean_nn_spacing",
    "sample_realization", "sample_rates", "survival_curve", "estimate_beta",
    "FitResult", "RateSurface", "SurfaceModelConfig",
    "fit_stretched_exp", "fit_rate_surface", "aicc", "compare_models",
    "StretchedExpFitter", "RateSurfaceFitter",
]
