"""Estimator front-ends for the fitting routines.

Both estimators follow the familiar fit/predict protocol: constructor
arguments are stored verbatim (so ``get_params``/``clone`` work), fitted
state lives in trailing-underscore attributes, and ``fit`` returns self.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted

from ..decay import DecayCurve, StretchedExpParams, contrast_model
from ..errors import DomainError
from ..hamiltonian import SpinSystemParams
from ..rates import CrossRelaxParams, RelaxationParams
from .curve import fit_stretched_exp
from .models import SurfaceRateModel
from .surface import RateSurface, SurfaceModelConfig, fit_rate_surface


def _as_delays(X) -> np.ndarray:
    arr = check_array(X, ensure_2d=False, dtype=float)
    if arr.ndim == 2:
        if arr.shape[1] != 1:
            raise DomainError("delay input must be 1-d or a single column")
        arr = arr[:, 0]
    return arr


class StretchedExpFitter(BaseEstimator, RegressorMixin):
    """Stretched-exponential decay estimator.

    fit(X, y, sigma) takes delays (us) in X, contrast in y, and optional
    per-point sigma. Points are sorted by delay internally; duplicate delays
    are rejected.
    """

    def __init__(self, init=None, bounds=None, fixed_beta=None, max_iter=500):
        self.init = init
        self.bounds = bounds
        self.fixed_beta = fixed_beta
        self.max_iter = max_iter

    def fit(self, X, y, sigma=None):
        delays = _as_delays(X)
        y = check_array(y, ensure_2d=False, dtype=float)
        if sigma is None:
            sigma = np.ones_like(delays)
        else:
            sigma = check_array(sigma, ensure_2d=False, dtype=float)
        order = np.argsort(delays, kind="stable")
        curve = DecayCurve(delays=delays[order], contrast=y[order], sigma=sigma[order])
        self.result_ = fit_stretched_exp(curve, init=self.init, bounds=self.bounds,
                                         fixed_beta=self.fixed_beta, max_iter=self.max_iter)
        self.c0_ = self.result_.params["c0"]
        self.t1_ = self.result_.params["t1"]
        self.beta_ = self.result_.params["beta"]
        self.covariance_ = self.result_.covariance
        self.converged_ = self.result_.converged
        self.n_iter_ = self.result_.n_iter
        return self

    def predict(self, X):
        check_is_fitted(self, "result_")
        delays = _as_delays(X)
        params = StretchedExpParams(c0=self.c0_, t1=self.t1_, beta=self.beta_)
        return np.atleast_1d(contrast_model(params, delays))


class RateSurfaceFitter(BaseEstimator, RegressorMixin):
    """Relaxation-rate surface estimator.

    fit(X, y, sigma) takes an (n, 2) array of [T, H] columns in X and total
    rates in y. With ``auto_mask`` (default) points inside the field exclusion
    windows are dropped from the objective.
    """

    def __init__(self, model_config=None, spin=None, init=None, bounds=None,
                 max_iter=500, auto_mask=True):
        self.model_config = model_config
        self.spin = spin
        self.init = init
        self.bounds = bounds
        self.max_iter = max_iter
        self.auto_mask = auto_mask

    def _grid(self, X) -> np.ndarray:
        arr = check_array(X, dtype=float)
        if arr.shape[1] != 2:
            raise DomainError("X must have two columns: temperature and field")
        return arr

    def fit(self, X, y, sigma=None):
        grid = self._grid(X)
        y = check_array(y, ensure_2d=False, dtype=float)
        if sigma is None:
            sigma = np.ones(len(grid))
        else:
            sigma = check_array(sigma, ensure_2d=False, dtype=float)
        surface = RateSurface(temperature=grid[:, 0], field=grid[:, 1], gamma=y, sigma=sigma)
        if self.auto_mask:
            surface = surface.masked_by_windows()
        self.result_ = fit_rate_surface(surface, model_config=self.model_config,
                                        spin=self.spin, init=self.init,
                                        bounds=self.bounds, max_iter=self.max_iter)
        p = self.result_.params
        cross = None
        config = self.model_config if self.model_config is not None else SurfaceModelConfig()
        if config.with_cross_relax:
            cross = CrossRelaxParams(amplitude=p["cross_amp"],
                                     half_width=p["cross_half_width"])
        self.params_ = RelaxationParams(a1=p["a1"], n1=p["n1"], a2=p["a2"], n2=p["n2"],
                                        eta=p["eta"], tau_c=p["tau_c"], cross_relax=cross)
        self.converged_ = self.result_.converged
        self.n_iter_ = self.result_.n_iter
        return self

    def _model(self) -> SurfaceRateModel:
        config = self.model_config if self.model_config is not None else SurfaceModelConfig()
        spin = self.spin if self.spin is not None else SpinSystemParams()
        return SurfaceRateModel(spin=spin, transition=config.transition,
                                with_cross_relax=config.with_cross_relax)

    def predict(self, X):
        check_is_fitted(self, "result_")
        return self._model().predict(self.result_.params, self._grid(X))

    def decompose(self, X):
        """Per-channel rate arrays at the given [T, H] points."""
        check_is_fitted(self, "result_")
        return self._model().components(self.result_.params, self._grid(X))
