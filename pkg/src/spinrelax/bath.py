"""Monte Carlo over disordered spin baths: rate distributions and survival decays.

Each realization places ``n_bath`` points uniformly in a d-ball around a
central spin and assigns the static rate

    Gamma = coupling_prefactor * sum_j r_j^(-2 alpha)

so the ensemble survival is the average of exp(-Gamma t) over realizations
(no dynamics within a realization). For positional disorder in d dimensions
with coupling exponent alpha, the ensemble decay is a stretched exponential
with exponent beta = d / (2 alpha) in the dilute limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dataclass_field
from typing import Optional

import numpy as np
from joblib import Parallel, delayed

from .errors import ConfigurationError, DomainError, InsufficientDataError

_BALL_VOLUME = {2: math.pi, 3: 4.0 * math.pi / 3.0}

# Fraction of the mean nearest-neighbor spacing used for the default hard-core
# cutoff below which bath points are resampled.
_DEFAULT_R_MIN_FRACTION = 0.1

# The ball radius follows from the density: n_bath = density * V_d(R). The
# neglected mean-rate contribution from bath spins beyond R, relative to the
# r_min-truncated mean, is (r_min / R)^(2 alpha - d); the configuration is
# rejected when that exceeds _BOUNDARY_TOL.
_BOUNDARY_TOL = 0.01


def mean_nn_spacing(density: float, dimension: int) -> float:
    """Mean nearest-neighbor distance of a Poisson process of the given density."""
    if dimension not in _BALL_VOLUME:
        raise DomainError(f"dimension must be 2 or 3, got {dimension!r}")
    if density <= 0:
        raise DomainError(f"density must be positive, got {density!r}")
    return math.gamma(1.0 + 1.0 / dimension) * (_BALL_VOLUME[dimension] * density) ** (-1.0 / dimension)


@dataclass(frozen=True)
class BathConfig:
    """Configuration of the disorder ensemble.

    density is in spins per unit volume (or area), coupling_prefactor sets the
    rate unit, r_min is the hard-core cutoff (defaults to 0.1 times the mean
    nearest-neighbor spacing), and seed is the root seed from which one child
    seed per realization is derived via numpy SeedSequence spawning.
    """

    dimension: int = 3
    alpha: float = 3.0
    density: float = 1.0
    n_bath: int = 1000
    n_realizations: int = 1000
    coupling_prefactor: float = 1.0
    r_min: Optional[float] = None
    seed: int = 0

    def __post_init__(self):
        if self.dimension not in _BALL_VOLUME:
            raise ConfigurationError(f"dimension must be 2 or 3, got {self.dimension!r}")
        if not (np.isfinite(self.alpha) and self.alpha > self.dimension / 2.0):
            raise ConfigurationError(
                f"alpha must exceed dimension / 2 = {self.dimension / 2.0} for an "
                f"integrable rate distribution, got {self.alpha!r}")
        if not (np.isfinite(self.density) and self.density > 0):
            raise ConfigurationError(f"density must be positive, got {self.density!r}")
        if self.n_bath < 1:
            raise ConfigurationError(f"n_bath must be >= 1, got {self.n_bath!r}")
        if self.n_realizations < 1:
            raise ConfigurationError(f"n_realizations must be >= 1, got {self.n_realizations!r}")
        if not (np.isfinite(self.coupling_prefactor) and self.coupling_prefactor > 0):
            raise ConfigurationError(
                f"coupling_prefactor must be positive, got {self.coupling_prefactor!r}")
        if self.r_min is not None and not (np.isfinite(self.r_min) and self.r_min > 0):
            raise ConfigurationError(f"r_min must be positive, got {self.r_min!r}")
        rmin, radius = self.resolved_r_min, self.radius
        if (rmin / radius) ** self.dimension > 0.5:
            raise ConfigurationError(
                f"r_min {rmin:.4g} excludes more than half the ball volume "
                f"(radius {radius:.4g}); density, n_bath, and r_min are inconsistent")
        if (rmin / radius) ** (2.0 * self.alpha - self.dimension) > _BOUNDARY_TOL:
            raise ConfigurationError(
                f"ball radius {radius:.4g} is too small relative to r_min {rmin:.4g}: "
                f"the neglected boundary contribution exceeds {_BOUNDARY_TOL:.0%}; "
                "increase n_bath")

    @property
    def resolved_r_min(self) -> float:
        if self.r_min is not None:
            return float(self.r_min)
        return _DEFAULT_R_MIN_FRACTION * mean_nn_spacing(self.density, self.dimension)

    @property
    def radius(self) -> float:
        """Ball radius holding n_bath spins at the configured density."""
        return (self.n_bath / (self.density * _BALL_VOLUME[self.dimension])) ** (1.0 / self.dimension)


def realization_seeds(config: BathConfig, n: Optional[int] = None):
    """Child seeds for each realization: SeedSequence(config.seed).spawn(n)."""
    count = config.n_realizations if n is None else int(n)
    return np.random.SeedSequence(config.seed).spawn(count)


def sample_radii(config: BathConfig, rng: np.random.Generator) -> np.ndarray:
    """Distances of one realization's bath spins from the center.

    Uniform in the d-ball via r = R * u^(1/d); draws below r_min are
    resampled, which leaves the distribution uniform outside the cutoff.
    """
    radius, rmin, d = config.radius, config.resolved_r_min, config.dimension
    r = radius * rng.random(config.n_bath) ** (1.0 / d)
    bad = r < rmin
    while np.any(bad):
        r[bad] = radius * rng.random(int(bad.sum())) ** (1.0 / d)
        bad = r < rmin
    return r


def rate_from_radii(config: BathConfig, radii) -> float:
    """Rate of one realization given its bath distances: prefactor * sum r^(-2 alpha)."""
    r = np.asarray(radii, dtype=float)
    if np.any(r <= 0):
        raise DomainError("bath distances must be positive")
    return float(config.coupling_prefactor * np.sum(r ** (-2.0 * config.alpha)))


def sample_realization(config: BathConfig, realization_seed) -> float:
    """Rate of a single realization drawn from the given per-realization seed."""
    rng = np.random.default_rng(realization_seed)
    return rate_from_radii(config, sample_radii(config, rng))


def _rates_chunk(config: BathConfig, seeds) -> np.ndarray:
    return np.array([sample_realization(config, s) for s in seeds])


def sample_rates(config: BathConfig, threads: int = 1) -> np.ndarray:
    """Rates of all configured realizations, in realization order.

    ``threads`` bounds the worker count; chunks are contiguous realization
    ranges and results are concatenated in submission order, so the output is
    identical for any thread count.
    """
    seeds = realization_seeds(config)
    threads = max(1, int(threads))
    if threads == 1:
        return _rates_chunk(config, seeds)
    chunks = np.array_split(np.arange(len(seeds)), threads * 4)
    chunks = [c for c in chunks if len(c)]
    parts = Parallel(n_jobs=threads, prefer="threads")(
        delayed(_rates_chunk)(config, [seeds[i] for i in chunk]) for chunk in chunks)
    return np.concatenate(parts)


@dataclass(eq=False)
class SurvivalCurve:
    """Ensemble survival signal: times, mean survival, and standard error."""

    times: np.ndarray
    survival: np.ndarray
    stderr: np.ndarray

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.survival = np.asarray(self.survival, dtype=float)
        self.stderr = np.asarray(self.stderr, dtype=float)
        n = self.times.size
        if self.times.ndim != 1 or n == 0:
            raise DomainError("times must be a nonempty 1-d array")
        if self.survival.shape != (n,) or self.stderr.shape != (n,):
            raise DomainError("times, survival, and stderr must have equal length")
        if np.any(np.diff(self.times) <= 0) or np.any(self.times < 0):
            raise DomainError("times must be nonnegative and strictly increasing")
        if np.any(self.survival <= 0) or np.any(self.survival > 1):
            raise DomainError("survival must lie in (0, 1]")
        if np.any(np.diff(self.survival) > 0):
            raise DomainError("survival must be nonincreasing")
        if np.any(self.stderr < 0):
            raise DomainError("stderr must be nonnegative")

    def __len__(self):
        return self.times.size


def default_times(rates, n: int = 48) -> np.ndarray:
    """Log-spaced time grid spanning the onset and bulk of the ensemble decay.

    Anchored to rate quantiles: from 0.01 / q90 (survival near 1) to
    3 / q10 (survival well below the fit window).
    """
    r = np.asarray(rates, dtype=float)
    q10, q90 = np.quantile(r, [0.1, 0.9])
    if q10 <= 0 or q90 <= 0:
        raise DomainError("rates must be positive to derive a time grid")
    return np.geomspace(0.01 / q90, 3.0 / q10, int(n))


def survival_curve(config: BathConfig, times=None, threads: int = 1,
                   rates=None) -> SurvivalCurve:
    """Ensemble survival over the configured realizations.

    ``rates`` may carry precomputed realization rates; otherwise they are
    sampled. With ``times`` None a default quantile-anchored grid is used.
    """
    if rates is None:
        rates = sample_rates(config, threads=threads)
    rates = np.asarray(rates, dtype=float)
    if times is None:
        times = default_times(rates)
    t = np.asarray(times, dtype=float)
    decays = np.exp(-np.multiply.outer(t, rates))
    survival = decays.mean(axis=1)
    stderr = decays.std(axis=1, ddof=1) / np.sqrt(rates.size) if rates.size > 1 \
        else np.zeros_like(survival)
    return SurvivalCurve(times=t, survival=survival, stderr=stderr)


@dataclass(frozen=True)
class BetaEstimate:
    """Stretching exponent from a log-log regression of the survival decay."""

    beta: float
    stderr: float
    char_time: float
    n_points: int


def estimate_beta(curve: SurvivalCurve, fit_window=(0.05, 0.8)) -> BetaEstimate:
    """Stretching exponent of a survival curve.

    Points with survival inside ``fit_window`` (and strictly inside (0, 1))
    enter an ordinary least-squares regression of log(-log P) on log t; the
    slope is beta and ``char_time`` is the time where -log P = 1. Fewer than
    5 usable points raises InsufficientDataError.
    """
    lo, hi = fit_window
    if not (0 < lo < hi < 1):
        raise DomainError(f"fit window must satisfy 0 < lo < hi < 1, got {fit_window!r}")
    p = curve.survival
    keep = (p >= lo) & (p <= hi) & (p < 1.0) & (curve.times > 0)
    if int(keep.sum()) < 5:
        raise InsufficientDataError(
            f"only {int(keep.sum())} points fall inside the fit window {fit_window}; "
            "at least 5 are required")
    x = np.log(curve.times[keep])
    y = np.log(-np.log(p[keep]))
    n = x.size
    xc = x - x.mean()
    sxx = float(xc @ xc)
    slope = float(xc @ (y - y.mean())) / sxx
    intercept = float(y.mean() - slope * x.mean())
    resid = y - (intercept + slope * x)
    variance = float(resid @ resid) / (n - 2)
    stderr = math.sqrt(variance / sxx)
    char_time = math.exp(-intercept / slope)
    return BetaEstimate(beta=slope, stderr=stderr, char_time=char_time, n_points=n)
