"""Multi-channel longitudinal relaxation rates versus field and temperature.

Rates are in ms^-1. The total rate is the sum of three channels plus an
optional cross-relaxation term:

    direct     a1 * T * f0^n1          (single-phonon, frequency dependent)
    raman      a2 * T^n2               (two-phonon, frequency independent)
    spin-spin  eta * tau_c / (1 + (2 pi f0 tau_c)^2)
    cross      amplitude / (1 + (H / half_width)^2)   (optional, off by default)

with T in Kelvin, f0 the relevant transition frequency in GHz, and tau_c in
picoseconds. The product 2 pi * f0[GHz] * tau_c[ps] carries a factor 1e-3 to
be dimensionless.

Unit conventions for the coefficients:

    a1      ms^-1 K^-1 GHz^-n1
    a2      ms^-1 K^-n2
    eta     ms^-1 ps^-1
    tau_c   ps
    cross amplitude   ms^-1
    cross half_width  T
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field
from typing import Optional

import numpy as np

from .errors import DomainError, MaskedFieldError
from .hamiltonian import SpinSystemParams, exclusion_windows, in_exclusion, transition_frequencies
from .search import refine_minimum

# 2 pi * 1e-3 converts f0[GHz] * tau_c[ps] to the dimensionless omega0 * tau_c.
_OMEGA_SCALE = 2.0e-3 * np.pi

TRANSITION_MODES = ("upper", "lower", "both")


@dataclass(frozen=True)
class CrossRelaxParams:
    """Zero-field cross-relaxation bump: amplitude / (1 + (H / half_width)^2)."""

    amplitude: float
    half_width: float

    def __post_init__(self):
        if not (np.isfinite(self.amplitude) and self.amplitude >= 0):
            raise DomainError(f"cross-relaxation amplitude must be >= 0, got {self.amplitude!r}")
        if not (np.isfinite(self.half_width) and self.half_width > 0):
            raise DomainError(f"cross-relaxation half_width must be > 0, got {self.half_width!r}")


@dataclass(frozen=True)
class RelaxationParams:
    """Channel coefficients for the relaxation model. See module docstring for units."""

    a1: float
    n1: float
    a2: float
    n2: float
    eta: float
    tau_c: float
    cross_relax: Optional[CrossRelaxParams] = None

    def __post_init__(self):
        for name in ("a1", "a2", "eta"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value >= 0):
                raise DomainError(f"{name} must be finite and >= 0, got {value!r}")
        for name in ("n1", "n2"):
            if not np.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")
        if not (np.isfinite(self.tau_c) and self.tau_c > 0):
            raise DomainError(f"tau_c must be positive, got {self.tau_c!r}")


@dataclass(frozen=True)
class RateBreakdown:
    """Per-channel rates at one (T, H) point, ms^-1. total is their exact sum."""

    direct: float
    raman: float
    spin_spin: float
    cross_relax: float
    total: float = dataclass_field(init=False)

    def __post_init__(self):
        for name in ("direct", "raman", "spin_spin", "cross_relax"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value >= 0):
                raise DomainError(f"{name} component must be finite and >= 0, got {value!r}")
        object.__setattr__(
            self, "total", self.direct + self.raman + self.spin_spin + self.cross_relax)


def _maybe_scalar(value, *inputs):
    if all(np.ndim(x) == 0 for x in inputs):
        return float(value)
    return value


def gamma_spin_phonon(params: RelaxationParams, temperature, f0):
    """Direct and Raman channel rates, returned as a (direct, raman) pair.

    ``temperature`` (K, positive) and ``f0`` (GHz, nonnegative) may be scalars
    or arrays. A zero f0 requires a positive direct exponent n1.
    """
    t = np.asarray(temperature, dtype=float)
    f = np.asarray(f0, dtype=float)
    if np.any(~np.isfinite(t)) or np.any(t <= 0):
        raise DomainError("temperature must be finite and positive")
    if np.any(~np.isfinite(f)) or np.any(f < 0):
        raise DomainError("f0 must be finite and nonnegative")
    if params.n1 <= 0 and np.any(f == 0):
        raise DomainError("f0 = 0 requires a positive direct exponent n1")
    direct = params.a1 * t * f ** params.n1
    raman = params.a2 * t ** params.n2
    return _maybe_scalar(direct, temperature, f0), _maybe_scalar(raman, temperature)


def gamma_spin_spin(params: RelaxationParams, f0):
    """Spin-spin channel rate: a Lorentzian in the transition frequency."""
    f = np.asarray(f0, dtype=float)
    if np.any(~np.isfinite(f)) or np.any(f < 0):
        raise DomainError("f0 must be finite and nonnegative")
    x = _OMEGA_SCALE * f * params.tau_c
    return _maybe_scalar(params.eta * params.tau_c / (1.0 + x * x), f0)


def gamma_cross_relax(params: RelaxationParams, field):
    """Cross-relaxation rate at ``field`` (zero when the term is disabled)."""
    h = np.asarray(field, dtype=float)
    if np.any(~np.isfinite(h)):
        raise DomainError("field must be finite")
    if params.cross_relax is None:
        return _maybe_scalar(np.zeros_like(h), field)
    u = h / params.cross_relax.half_width
    return _maybe_scalar(params.cross_relax.amplitude / (1.0 + u * u), field)


def spin_phonon_gradients(params: RelaxationParams, temperature, f0):
    """Exact partials of the spin-phonon channels w.r.t. (a1, n1, a2, n2).

    Array-valued, matching the broadcast shape of the inputs. The n1 partial
    is a1*T*f0^n1*ln(f0) with the f0 = 0 limit taken as 0.
    """
    t = np.asarray(temperature, dtype=float)
    f = np.asarray(f0, dtype=float)
    powf = f ** params.n1
    with np.errstate(divide="ignore", invalid="ignore"):
        d_n1 = np.where(f > 0, params.a1 * t * powf * np.log(np.where(f > 0, f, 1.0)), 0.0)
    powt = t ** params.n2
    return {
        "a1": t * powf,
        "n1": d_n1,
        "a2": powt,
        "n2": params.a2 * powt * np.log(t),
    }


def spin_spin_gradients(params: RelaxationParams, f0):
    """Exact partials of the spin-spin channel w.r.t. (eta, tau_c)."""
    f = np.asarray(f0, dtype=float)
    x = _OMEGA_SCALE * f * params.tau_c
    denom = 1.0 + x * x
    return {
        "eta": params.tau_c / denom,
        "tau_c": params.eta * (1.0 - x * x) / (denom * denom),
    }


def cross_relax_gradients(params: CrossRelaxParams, field):
    """Exact partials of the cross-relaxation term w.r.t. (amplitude, half_width)."""
    h = np.asarray(field, dtype=float)
    u = h / params.half_width
    denom = 1.0 + u * u
    return {
        "amplitude": 1.0 / denom,
        "half_width": params.amplitude * 2.0 * u * u / (params.half_width * denom * denom),
    }


def transition_channels(spin: SpinSystemParams, field, transition="upper"):
    """Transition frequencies (GHz) used by the rate model at each field.

    Returns a list with one array per channel: [upper], [lower], or
    [upper, lower] for the two-channel summed mode.
    """
    if transition not in TRANSITION_MODES:
        raise DomainError(f"transition must be one of {TRANSITION_MODES}, got {transition!r}")
    h = np.atleast_1d(np.asarray(field, dtype=float))
    uppers = np.empty_like(h)
    lowers = np.empty_like(h)
    for i, hi in enumerate(h):
        tf = transition_frequencies(spin, float(hi))
        uppers[i] = tf.f_upper
        lowers[i] = tf.f_lower
    if transition == "upper":
        return [uppers]
    if transition == "lower":
        return [lowers]
    return [uppers, lowers]


def rate_components(params: RelaxationParams, temperature, field, f0_channels):
    """Vectorized per-channel rates given precomputed transition frequencies.

    ``f0_channels`` is a list of frequency arrays as produced by
    ``transition_channels``; the direct and spin-spin terms are summed over
    channels, the Raman and cross terms are evaluated once. Returns a dict of
    arrays with keys direct, raman, spin_spin, cross_relax, total.
    """
    t = np.asarray(temperature, dtype=float)
    h = np.asarray(field, dtype=float)
    direct = 0.0
    spin_spin = 0.0
    raman = None
    for f0 in f0_channels:
        d, raman = gamma_spin_phonon(params, t, f0)
        direct = direct + d
        spin_spin = spin_spin + gamma_spin_spin(params, f0)
    cross = gamma_cross_relax(params, h) * np.ones_like(t)
    direct = direct * np.ones_like(t)
    spin_spin = spin_spin * np.ones_like(t)
    raman = raman * np.ones_like(t)
    return {
        "direct": direct,
        "raman": raman,
        "spin_spin": spin_spin,
        "cross_relax": cross,
        "total": direct + raman + spin_spin + cross,
    }


def gamma_total(params: RelaxationParams, spin: SpinSystemParams, temperature, field,
                transition="upper", windows=None, allow_excluded=False) -> RateBreakdown:
    """Total relaxation rate and its per-channel breakdown at one (T, H) point.

    Raises MaskedFieldError when ``field`` falls inside an exclusion window,
    unless ``allow_excluded`` is set. ``windows`` overrides the default
    exclusion windows; pass an empty tuple to disable masking entirely.
    """
    if windows is None:
        windows = exclusion_windows()
    if not allow_excluded and in_exclusion(field, windows):
        raise MaskedFieldError(
            f"field {field} T lies inside an exclusion window {windows}; "
            "pass allow_excluded=True to evaluate anyway")
    channels = transition_channels(spin, field, transition)
    parts = rate_components(params, float(temperature), float(field),
                            [c[0] for c in channels])
    return RateBreakdown(direct=float(parts["direct"]), raman=float(parts["raman"]),
                         spin_spin=float(parts["spin_spin"]),
                         cross_relax=float(parts["cross_relax"]))


@dataclass(frozen=True)
class FieldMinimum:
    """Result of a field scan for the rate minimum."""

    field: float
    rate: float
    at_boundary: bool


def argmin_field(params: RelaxationParams, spin: SpinSystemParams, temperature,
                 h_range, transition="upper", windows=None, tol=1e-3) -> FieldMinimum:
    """Field in ``h_range`` minimizing the total rate at fixed temperature.

    Coarse scan plus golden-section refinement to ``tol`` Tesla (default
    1 mT). The range must not intersect an exclusion window. A minimum found
    at a range endpoint is flagged via ``at_boundary`` rather than an error.
    """
    lo, hi = float(h_range[0]), float(h_range[1])
    if not (np.isfinite(lo) and np.isfinite(hi)) or lo >= hi:
        raise DomainError(f"invalid field range {h_range!r}")
    if windows is None:
        windows = exclusion_windows()
    for wlo, whi in windows:
        if lo <= whi and wlo <= hi:
            raise DomainError(
                f"field range [{lo}, {hi}] T intersects exclusion window ({wlo}, {whi}) T")

    def total(field):
        return gamma_total(params, spin, temperature, field,
                           transition=transition, windows=()).total

    x, fx, at_boundary = refine_minimum(total, lo, hi, n_coarse=257, tol=tol)
    return FieldMinimum(field=x, rate=fx, at_boundary=at_boundary)
