"""Weighted least-squares fitting: engine, models, and estimator front-ends."""

from .compare import aicc, compare_models
from .core import ParamSpec, check_identifiability, run_weighted_fit
from .curve import DEFAULT_BOUNDS, fit_stretched_exp, initial_guess
from .estimators import RateSurfaceFitter, StretchedExpFitter
from .levmar import LMResult, levenberg_marquardt
from .models import (StretchedExpModel, SurfacePoints, SurfaceRateModel, jacobian)
from .result import FitResult, data_checksum
from .surface import (DEFAULT_SURFACE_BOUNDS, RateSurface, SurfaceModelConfig,
                      fit_rate_surface, initial_guess_surface)

__all__ = [
    "aicc", "compare_models",
    "ParamSpec", "check_identifiability", "run_weighted_fit",
    "DEFAULT_BOUNDS", "fit_stretched_exp", "initial_guess",
    "RateSurfaceFitter", "StretchedExpFitter",
    "LMResult", "levenberg_marquardt",
    "StretchedExpModel", "SurfacePoints", "SurfaceRateModel", "jacobian",
    "FitResult", "data_checksum",
    "DEFAULT_SURFACE_BOUNDS", "RateSurface", "SurfaceModelConfig",
    "fit_rate_surface", "initial_guess_surface",
]
