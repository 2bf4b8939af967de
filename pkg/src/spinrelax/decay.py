"""Stretched-exponential relaxation profiles: models, synthesis, averaging.

Delays are in microseconds. The observable is the normalized contrast
C(t) = C0 * (1 - exp(-(t / T1)^beta)), which starts at 0 and saturates at C0
(C0 may be negative). Synthetic curves follow the photon-counting definition
contrast = (N1 - N0) / N0 with Poisson shot noise.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field
from typing import Optional

import numpy as np

from .errors import DomainError

_trapz = np.trapezoid if hasattr(np, "trapezoid") else np.trapz


@dataclass(frozen=True)
class StretchedExpParams:
    """Stretched-exponential parameters: amplitude, time constant (us), exponent."""

    c0: float
    t1: float
    beta: float

    def __post_init__(self):
        if not np.isfinite(self.c0):
            raise DomainError(f"c0 must be finite, got {self.c0!r}")
        if not (np.isfinite(self.t1) and self.t1 > 0):
            raise DomainError(f"t1 must be positive, got {self.t1!r}")
        if not (np.isfinite(self.beta) and 0 < self.beta <= 2):
            raise DomainError(f"beta must lie in (0, 2], got {self.beta!r}")


def contrast_model(params: StretchedExpParams, delays):
    """Model contrast at the given delays (scalar or array, us, nonnegative)."""
    t = np.asarray(delays, dtype=float)
    if np.any(~np.isfinite(t)) or np.any(t < 0):
        raise DomainError("delays must be finite and nonnegative")
    s = (t / params.t1) ** params.beta
    value = params.c0 * -np.expm1(-s)
    if np.ndim(delays) == 0:
        return float(value)
    return value


def contrast_gradient(params: StretchedExpParams, delays) -> np.ndarray:
    """Exact partials of the contrast model, shape (n, 3), columns (c0, t1, beta).

    The t = 0 limits are 0 for all three partials.
    """
    t = np.atleast_1d(np.asarray(delays, dtype=float))
    if np.any(~np.isfinite(t)) or np.any(t < 0):
        raise DomainError("delays must be finite and nonnegative")
    positive = t > 0
    ratio = np.where(positive, t / params.t1, 1.0)
    s = ratio ** params.beta
    s = np.where(positive, s, 0.0)
    decay = np.exp(-s)
    d_c0 = -np.expm1(-s)
    d_t1 = -params.c0 * decay * params.beta * s / params.t1
    d_beta = np.where(positive, params.c0 * decay * s * np.log(ratio), 0.0)
    return np.column_stack([d_c0, d_t1, d_beta])


@dataclass(eq=False)
class DecayCurve:
    """One measured or synthesized decay curve.

    delays (us, strictly increasing, nonnegative), contrast, and per-point
    sigma (positive) are equal-length 1-d arrays. ``meta`` holds measurement
    context under the canonical keys T_K, H_T, shots, seed.
    """

    delays: np.ndarray
    contrast: np.ndarray
    sigma: np.ndarray
    meta: dict = dataclass_field(default_factory=dict)

    def __post_init__(self):
        self.delays = np.asarray(self.delays, dtype=float)
        self.contrast = np.asarray(self.contrast, dtype=float)
        self.sigma = np.asarray(self.sigma, dtype=float)
        n = self.delays.size
        if self.delays.ndim != 1 or n == 0:
            raise DomainError("delays must be a nonempty 1-d array")
        if self.contrast.shape != (n,) or self.sigma.shape != (n,):
            raise DomainError("delays, contrast, and sigma must have equal length")
        if np.any(~np.isfinite(self.delays)) or np.any(self.delays < 0):
            raise DomainError("delays must be finite and nonnegative")
        if np.any(np.diff(self.delays) <= 0):
            raise DomainError("delays must be strictly increasing")
        if np.any(~np.isfinite(self.contrast)):
            raise DomainError("contrast must be finite")
        if np.any(~np.isfinite(self.sigma)) or np.any(self.sigma <= 0):
            raise DomainError("sigma must be finite and positive")

    def __len__(self):
        return self.delays.size


def default_schedule(t1_guess: float, n: int = 30, span=(0.01, 10.0)) -> np.ndarray:
    """Log-spaced delay schedule covering span[0]*t1 to span[1]*t1 (us)."""
    if not (np.isfinite(t1_guess) and t1_guess > 0):
        raise DomainError(f"t1_guess must be positive, got {t1_guess!r}")
    if n < 2:
        raise DomainError("schedule needs at least 2 points")
    return np.geomspace(span[0] * t1_guess, span[1] * t1_guess, int(n))


@dataclass(frozen=True)
class PhotonNoise:
    """Photon budget for shot-noise synthesis: mean photons per shot and shot count."""

    photons_per_shot: float
    shots: int

    def __post_init__(self):
        if self.photons_per_shot <= 0 or self.shots <= 0:
            raise DomainError("photon budget must be positive")


def synthesize_curve(params: StretchedExpParams, schedule, noise: Optional[PhotonNoise] = None,
                     seed=None, meta: Optional[dict] = None) -> DecayCurve:
    """Synthesize a decay curve, optionally with Poisson shot noise.

    With ``noise`` given (finite photon budget), reference and signal counts
    are drawn as N0 ~ Poisson(M) and N1 ~ Poisson(M * (1 + C(t))) with
    M = photons_per_shot * shots, the contrast is (N1 - N0) / N0, and sigma is
    the delta-method propagation sqrt((1 + C) * (2 + C) / M) evaluated at the
    model contrast. Fully deterministic for a fixed seed.

    With ``noise`` None or an infinite budget the exact model contrast is
    returned with unit sigma (there is no shot-noise scale to propagate).
    """
    t = np.asarray(schedule, dtype=float)
    model = np.atleast_1d(contrast_model(params, t))
    base_meta = dict(meta or {})
    if noise is None or not np.isfinite(noise.photons_per_shot * noise.shots):
        return DecayCurve(delays=t, contrast=model.copy(), sigma=np.ones_like(model),
                          meta=base_meta)
    mean0 = float(noise.photons_per_shot) * float(noise.shots)
    if np.any(1.0 + model <= 0):
        raise DomainError("model contrast at or below -1 gives a nonpositive photon rate")
    rng = np.random.default_rng(seed)
    n0 = rng.poisson(mean0, size=model.shape)
    n1 = rng.poisson(mean0 * (1.0 + model))
    if np.any(n0 == 0):
        raise DomainError(
            "photon budget too low: a reference count of zero was drawn; "
            "increase photons_per_shot * shots")
    contrast = (n1 - n0) / n0
    sigma = np.sqrt((1.0 + model) * (2.0 + model) / mean0)
    base_meta.setdefault("shots", int(noise.shots))
    if seed is not None:
        base_meta.setdefault("seed", seed)
    return DecayCurve(delays=t, contrast=contrast, sigma=sigma, meta=base_meta)


def laplace_average(rate_grid, density, delays, norm_tol=1e-6):
    """Survival signal of a rate distribution: integral of rho(G) exp(-G t) dG.

    ``rate_grid`` (ms^-1 or any consistent inverse-time unit) and ``density``
    tabulate a normalized distribution; the integral uses the trapezoid rule
    on the given grid and is divided by the quadrature mass so that the t = 0
    value is exactly 1. A mass further than ``norm_tol`` from 1 raises a
    DomainError. A single-point grid is treated as a point mass, returning
    exp(-G0 t) exactly.
    """
    rates = np.asarray(rate_grid, dtype=float)
    rho = np.asarray(density, dtype=float)
    t = np.asarray(delays, dtype=float)
    if rates.ndim != 1 or rates.shape != rho.shape:
        raise DomainError("rate_grid and density must be equal-length 1-d arrays")
    if np.any(~np.isfinite(rates)) or np.any(rates < 0):
        raise DomainError("rates must be finite and nonnegative")
    if np.any(~np.isfinite(rho)) or np.any(rho < 0):
        raise DomainError("density must be finite and nonnegative")
    if np.any(~np.isfinite(t)) or np.any(t < 0):
        raise DomainError("delays must be finite and nonnegative")
    if rates.size == 1:
        mass = rho[0]
        if abs(mass - 1.0) > norm_tol:
            raise DomainError(f"point-mass weight {mass!r} is not normalized within {norm_tol}")
        value = np.exp(-rates[0] * t)
        return float(value) if np.ndim(delays) == 0 else value
    if np.any(np.diff(rates) <= 0):
        raise DomainError("rate_grid must be strictly increasing")
    mass = float(_trapz(rho, rates))
    if abs(mass - 1.0) > norm_tol:
        raise DomainError(
            f"density integrates to {mass!r}, outside the normalization tolerance {norm_tol}")
    kernel = np.exp(-np.multiply.outer(np.atleast_1d(t), rates))
    value = _trapz(kernel * rho, rates, axis=1) / mass
    if np.ndim(delays) == 0:
        return float(value[0])
    return value
