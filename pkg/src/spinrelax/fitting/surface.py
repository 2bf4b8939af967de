"""Global fits of the relaxation-rate model over a (T, H) surface."""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field
from typing import Optional

import numpy as np

from ..errors import DomainError, InsufficientDataError
from ..hamiltonian import SpinSystemParams, exclusion_windows, in_exclusion
from ..rates import _OMEGA_SCALE, TRANSITION_MODES
from .core import ParamSpec, check_identifiability, run_weighted_fit
from .models import SURFACE_BASE_NAMES, SURFACE_CROSS_NAMES, SurfacePoints, SurfaceRateModel
from .result import FitResult

DEFAULT_SURFACE_BOUNDS = {
    "a1": (0.0, np.inf),
    "n1": (0.0, 5.0),
    "a2": (0.0, np.inf),
    "n2": (0.0, 7.0),
    "eta": (0.0, np.inf),
    "tau_c": (0.0, np.inf),
    "cross_amp": (0.0, np.inf),
    "cross_half_width": (0.0, np.inf),
}

_LOG_PARAMS = {"a1", "a2", "eta", "tau_c", "cross_amp", "cross_half_width"}


@dataclass(eq=False)
class RateSurface:
    """Measured total rates over a (T, H) grid with per-point uncertainties.

    ``mask`` marks points excluded from fitting (True = excluded), typically
    those inside a field exclusion window.
    """

    temperature: np.ndarray
    field: np.ndarray
    gamma: np.ndarray
    sigma: np.ndarray
    mask: Optional[np.ndarray] = None

    def __post_init__(self):
        self.temperature = np.asarray(self.temperature, dtype=float)
        self.field = np.asarray(self.field, dtype=float)
        self.gamma = np.asarray(self.gamma, dtype=float)
        self.sigma = np.asarray(self.sigma, dtype=float)
        n = self.temperature.size
        if self.temperature.ndim != 1 or n == 0:
            raise DomainError("temperature must be a nonempty 1-d array")
        for name in ("field", "gamma", "sigma"):
            if getattr(self, name).shape != (n,):
                raise DomainError("temperature, field, gamma, sigma must have equal length")
        if np.any(~np.isfinite(self.temperature)) or np.any(self.temperature <= 0):
            raise DomainError("temperature must be finite and positive")
        if np.any(~np.isfinite(self.field)):
            raise DomainError("field must be finite")
        if np.any(~np.isfinite(self.gamma)):
            raise DomainError("gamma must be finite")
        if np.any(~np.isfinite(self.sigma)) or np.any(self.sigma <= 0):
            raise DomainError("sigma must be finite and positive")
        if self.mask is None:
            self.mask = np.zeros(n, dtype=bool)
        else:
            self.mask = np.asarray(self.mask, dtype=bool)
            if self.mask.shape != (n,):
                raise DomainError("mask must match the grid length")

    def __len__(self):
        return self.temperature.size

    def masked_by_windows(self, windows=None) -> "RateSurface":
        """Copy with points inside the exclusion windows additionally masked."""
        if windows is None:
            windows = exclusion_windows()
        extra = np.array([in_exclusion(h, windows) for h in self.field])
        return RateSurface(self.temperature, self.field, self.gamma, self.sigma,
                          mask=self.mask | extra)


@dataclass(frozen=True)
class SurfaceModelConfig:
    """Free/fixed selection and evaluation options for a surface fit.

    ``free`` lists the fitted parameters; every remaining model parameter must
    appear in ``fixed`` with its clamped value. ``transition`` picks the
    frequency branch entering the field-dependent channels.
    """

    free: tuple = SURFACE_BASE_NAMES
    fixed: dict = dataclass_field(default_factory=dict)
    transition: str = "upper"
    with_cross_relax: bool = False

    def __post_init__(self):
        object.__setattr__(self, "free", tuple(self.free))
        object.__setattr__(self, "fixed", dict(self.fixed))
        names = self.param_names
        unknown = [n for n in list(self.free) + list(self.fixed) if n not in names]
        if unknown:
            raise DomainError(f"unknown parameters {unknown}; expected a subset of {names}")
        overlap = set(self.free) & set(self.fixed)
        if overlap:
            raise DomainError(f"parameters {sorted(overlap)} are both free and fixed")
        missing = [n for n in names if n not in self.free and n not in self.fixed]
        if missing:
            raise DomainError(f"parameters {missing} are neither free nor fixed")
        if self.transition not in TRANSITION_MODES:
            raise DomainError(
                f"transition must be one of {TRANSITION_MODES}, got {self.transition!r}")

    @property
    def param_names(self) -> tuple:
        return SURFACE_BASE_NAMES + (SURFACE_CROSS_NAMES if self.with_cross_relax else ())

    def to_dict(self) -> dict:
        return {
            "free": list(self.free),
            "fixed": {k: float(v) for k, v in self.fixed.items()},
            "transition": self.transition,
            "with_cross_relax": self.with_cross_relax,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "SurfaceModelConfig":
        known = {"free", "fixed", "transition", "with_cross_relax"}
        unknown = set(payload) - known
        if unknown:
            raise DomainError(f"unknown model-config keys {sorted(unknown)}")
        kwargs = {}
        if "free" in payload:
            kwargs["free"] = tuple(payload["free"])
        if "fixed" in payload:
            kwargs["fixed"] = dict(payload["fixed"])
        if "transition" in payload:
            kwargs["transition"] = payload["transition"]
        if "with_cross_relax" in payload:
            kwargs["with_cross_relax"] = bool(payload["with_cross_relax"])
        return cls(**kwargs)


def initial_guess_surface(surface: RateSurface, config: SurfaceModelConfig,
                          points: SurfacePoints) -> dict:
    """Deterministic start values from extreme grid corners.

    Exponents start at n1 = 1.5, n2 = 2, tau_c at 100 ps. The Raman amplitude
    comes from the hottest low-field point, the direct amplitude from the
    coldest high-field point after subtracting the Raman estimate, and eta
    from the coldest low-field point after subtracting both. Fixed parameters
    take their clamped values.
    """
    t, h, gamma = points.temperature, points.field, surface.gamma[~surface.mask]
    n1, n2, tau_c = 1.5, 2.0, 100.0
    guess = {"n1": n1, "n2": n2, "tau_c": tau_c}

    def corner(pick_t, pick_h):
        t_star = pick_t(t)
        at_t = np.flatnonzero(t == t_star)
        h_star = pick_h(h[at_t])
        return int(at_t[np.flatnonzero(h[at_t] == h_star)[0]])

    i_raman = corner(np.max, np.min)
    guess["a2"] = max(gamma[i_raman], 1e-12 * abs(gamma[i_raman]) + 1e-30) / t[i_raman] ** n2

    i_direct = corner(np.min, np.max)
    f_direct = sum(f0[i_direct] ** n1 for f0 in points.f0_channels)
    residual = gamma[i_direct] - guess["a2"] * t[i_direct] ** n2
    residual = max(residual, 0.05 * abs(gamma[i_direct]))
    guess["a1"] = residual / (t[i_direct] * max(f_direct, 1e-30))

    i_ss = corner(np.min, np.min)
    f_ss = points.f0_channels[0][i_ss]
    x = _OMEGA_SCALE * f_ss * tau_c
    direct_est = guess["a1"] * t[i_ss] * sum(f0[i_ss] ** n1 for f0 in points.f0_channels)
    residual = gamma[i_ss] - guess["a2"] * t[i_ss] ** n2 - direct_est
    residual = max(residual, 0.05 * abs(gamma[i_ss]))
    guess["eta"] = residual * (1.0 + x * x) / tau_c / len(points.f0_channels)

    if config.with_cross_relax:
        guess["cross_amp"] = max(0.05 * abs(gamma[i_ss]), 1e-30)
        guess["cross_half_width"] = 0.01
    for name, value in config.fixed.items():
        guess[name] = float(value)
    return guess


def fit_rate_surface(surface: RateSurface, model_config: Optional[SurfaceModelConfig] = None,
                     spin: Optional[SpinSystemParams] = None, init=None, bounds=None,
                     max_iter=500) -> FitResult:
    """Global weighted fit of the rate model to an unmasked surface.

    Masked points are excluded from every objective sum. Requires at least
    n_free + 3 unmasked points. A rank-deficient start Jacobian (condition
    number above 1e12) raises IdentifiabilityError naming the colinear
    parameters.
    """
    config = model_config if model_config is not None else SurfaceModelConfig()
    spin = spin if spin is not None else SpinSystemParams()
    keep = ~surface.mask
    n_free = len(config.free)
    if int(keep.sum()) < n_free + 3:
        raise InsufficientDataError(
            f"{int(keep.sum())} unmasked points cannot constrain {n_free} free "
            f"parameters; need at least {n_free + 3}")
    model = SurfaceRateModel(spin=spin, transition=config.transition,
                             with_cross_relax=config.with_cross_relax)
    points = SurfacePoints(spin, surface.temperature[keep], surface.field[keep],
                           config.transition)
    start = initial_guess_surface(surface, config, points)
    if init:
        for name, value in init.items():
            if name not in model.names:
                raise DomainError(f"unknown parameter {name!r} in init")
            if name in config.fixed:
                continue
            start[name] = float(value)
    limits = dict(DEFAULT_SURFACE_BOUNDS)
    if bounds:
        for name, pair in bounds.items():
            if name not in limits:
                raise DomainError(f"unknown parameter {name!r} in bounds")
            limits[name] = (float(pair[0]), float(pair[1]))
    for name in model.names:
        if name in config.fixed:
            continue
        lo, hi = limits[name]
        start[name] = float(np.clip(start[name], lo, hi))
        if name in _LOG_PARAMS and start[name] <= 0:
            start[name] = 1e-12

    specs = [ParamSpec(name,
                       "log" if name in _LOG_PARAMS else "identity",
                       *limits[name],
                       free=name in config.free)
             for name in model.names]
    y = surface.gamma[keep]
    sigma = surface.sigma[keep]
    check_identifiability(model, specs, start, sigma, points)
    return run_weighted_fit(
        model, specs, start, y, sigma, points, max_iter=max_iter,
        label="rate-surface", model_config=config.to_dict(),
        extra_hash_arrays=(surface.temperature[keep], surface.field[keep]))
