"""Model objects binding rate and decay formulas to named parameter vectors.

A model exposes ``names`` (canonical parameter order), ``predict(params,
points)`` and ``jacobian(params, points)`` with params given as a mapping.
Analytic Jacobians are exact partials of the model output; the free function
``jacobian`` additionally zeroes the columns of fixed parameters.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..decay import StretchedExpParams, contrast_gradient, contrast_model
from ..errors import DomainError
from ..hamiltonian import SpinSystemParams
from ..rates import (CrossRelaxParams, RelaxationParams, cross_relax_gradients,
                     rate_components, spin_phonon_gradients, spin_spin_gradients,
                     transition_channels)

SURFACE_BASE_NAMES = ("a1", "n1", "a2", "n2", "eta", "tau_c")
SURFACE_CROSS_NAMES = ("cross_amp", "cross_half_width")


class StretchedExpModel:
    """Stretched-exponential contrast versus delay. Points are delays in us."""

    names = ("c0", "t1", "beta")

    @staticmethod
    def _params(params) -> StretchedExpParams:
        return StretchedExpParams(c0=params["c0"], t1=params["t1"], beta=params["beta"])

    def predict(self, params, points):
        return np.atleast_1d(contrast_model(self._params(params), points))

    def jacobian(self, params, points):
        return contrast_gradient(self._params(params), points)


class SurfacePoints:
    """A (T, H) evaluation grid with transition frequencies precomputed."""

    def __init__(self, spin: SpinSystemParams, temperature, field, transition="upper"):
        self.temperature = np.atleast_1d(np.asarray(temperature, dtype=float))
        self.field = np.atleast_1d(np.asarray(field, dtype=float))
        if self.temperature.shape != self.field.shape:
            raise DomainError("temperature and field must have equal length")
        self.transition = transition
        self.f0_channels = transition_channels(spin, self.field, transition)

    def __len__(self):
        return self.temperature.size


class SurfaceRateModel:
    """Total relaxation rate versus (T, H).

    Points may be a prepared SurfacePoints or an (n, 2) array of [T, H]
    columns. With ``with_cross_relax`` the parameter list extends to the
    cross-relaxation amplitude and half width.
    """

    def __init__(self, spin: SpinSystemParams = None, transition: str = "upper",
                 with_cross_relax: bool = False):
        self.spin = spin if spin is not None else SpinSystemParams()
        self.transition = transition
        self.with_cross_relax = bool(with_cross_relax)
        self.names = SURFACE_BASE_NAMES + (SURFACE_CROSS_NAMES if self.with_cross_relax else ())

    def _points(self, points) -> SurfacePoints:
        if isinstance(points, SurfacePoints):
            return points
        arr = np.asarray(points, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise DomainError("points must be an (n, 2) array of [T, H] columns")
        return SurfacePoints(self.spin, arr[:, 0], arr[:, 1], self.transition)

    def _rate_params(self, params) -> RelaxationParams:
        cross = None
        if self.with_cross_relax:
            cross = CrossRelaxParams(amplitude=params["cross_amp"],
                                     half_width=params["cross_half_width"])
        return RelaxationParams(a1=params["a1"], n1=params["n1"], a2=params["a2"],
                                n2=params["n2"], eta=params["eta"], tau_c=params["tau_c"],
                                cross_relax=cross)

    def components(self, params, points):
        pts = self._points(points)
        return rate_components(self._rate_params(params), pts.temperature, pts.field,
                               pts.f0_channels)

    def predict(self, params, points):
        return self.components(params, points)["total"]

    def jacobian(self, params, points):
        pts = self._points(points)
        p = self._rate_params(params)
        t = pts.temperature
        cols = {name: np.zeros(len(pts)) for name in self.names}
        for f0 in pts.f0_channels:
            ph = spin_phonon_gradients(p, t, f0)
            ss = spin_spin_gradients(p, f0)
            cols["a1"] += ph["a1"]
            cols["n1"] += ph["n1"]
            cols["eta"] += ss["eta"]
            cols["tau_c"] += ss["tau_c"]
        # Raman partials are channel independent; take them once.
        ph = spin_phonon_gradients(p, t, pts.f0_channels[0])
        cols["a2"] = ph["a2"]
        cols["n2"] = ph["n2"]
        if self.with_cross_relax:
            cr = cross_relax_gradients(p.cross_relax, pts.field)
            cols["cross_amp"] = cr["amplitude"] * np.ones(len(pts))
            cols["cross_half_width"] = cr["half_width"] * np.ones(len(pts))
        return np.column_stack([cols[name] for name in self.names])


def jacobian(model, params, points, fixed=()):
    """Analytic Jacobian of ``model`` with zeroed columns for fixed parameters.

    Columns follow ``model.names``; ``fixed`` names must be known to the model.
    """
    unknown = set(fixed) - set(model.names)
    if unknown:
        raise DomainError(f"unknown fixed parameters {sorted(unknown)}; "
                          f"model has {model.names}")
    full = np.asarray(model.jacobian(params, points), dtype=float)
    for name in fixed:
        full[:, model.names.index(name)] = 0.0
    return full
