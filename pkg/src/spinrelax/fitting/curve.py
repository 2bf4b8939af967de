"""Stretched-exponential fits to decay curves."""

from __future__ import annotations

import numpy as np

from ..decay import DecayCurve
from ..errors import DomainError, InsufficientDataError
from .core import ParamSpec, run_weighted_fit
from .models import StretchedExpModel
from .result import FitResult

# Default free-parameter bounds. beta spans the physically sensible window for
# disorder-averaged decays; t1 is capped at 1e6 us.
DEFAULT_BOUNDS = {
    "c0": (-np.inf, np.inf),
    "t1": (0.0, 1.0e6),
    "beta": (0.1, 1.5),
}


def initial_guess(curve: DecayCurve) -> dict:
    """Deterministic start values from the data.

    The plateau estimate is the mean contrast over the last decade of delays;
    c0 starts there, t1 at the first delay where the contrast reaches
    (1 - 1/e) of the plateau, and beta at 0.8.
    """
    delays, contrast = curve.delays, curve.contrast
    tail = delays >= delays[-1] / 10.0
    plateau = float(np.mean(contrast[tail]))
    if not np.isfinite(plateau) or plateau == 0.0:
        plateau = float(contrast[-1]) if contrast[-1] != 0 else 1e-3
    target = (1.0 - np.exp(-1.0)) * plateau
    if plateau > 0:
        reached = np.flatnonzero((contrast >= target) & (delays > 0))
    else:
        reached = np.flatnonzero((contrast <= target) & (delays > 0))
    if reached.size:
        t1 = float(delays[reached[0]])
    else:
        positive = delays[delays > 0]
        t1 = float(np.median(positive)) if positive.size else 1.0
    return {"c0": plateau, "t1": t1, "beta": 0.8}


def fit_stretched_exp(curve: DecayCurve, init=None, bounds=None, fixed_beta=None,
                      max_iter=500) -> FitResult:
    """Weighted fit of the stretched-exponential model to a decay curve.

    ``init`` may override any start values from :func:`initial_guess`;
    ``bounds`` maps parameter names to (lower, upper) pairs overriding the
    defaults. With ``fixed_beta`` the exponent is clamped to that value and
    excluded from the fit. t1 is fitted in log space. Non-convergence is
    reported through the result diagnostics, never silently.
    """
    if len(curve) < 5:
        raise InsufficientDataError(
            f"need at least 5 points to fit a stretched exponential, got {len(curve)}")
    start = initial_guess(curve)
    if init:
        start.update({k: float(v) for k, v in init.items()})
    limits = dict(DEFAULT_BOUNDS)
    if bounds:
        for name, pair in bounds.items():
            if name not in limits:
                raise DomainError(f"unknown parameter {name!r} in bounds")
            limits[name] = (float(pair[0]), float(pair[1]))

    label = "stretched-exp"
    if fixed_beta is not None:
        if not (np.isfinite(fixed_beta) and 0 < fixed_beta <= 2):
            raise DomainError(f"fixed_beta must lie in (0, 2], got {fixed_beta!r}")
        start["beta"] = float(fixed_beta)
        label = f"stretched-exp beta={float(fixed_beta):g}"

    # Keep free start values inside their boxes.
    for name, (lo, hi) in limits.items():
        if name == "beta" and fixed_beta is not None:
            continue
        start[name] = float(np.clip(start[name], lo if np.isfinite(lo) else -np.inf,
                                    hi if np.isfinite(hi) else np.inf))
    if start["t1"] <= 0:
        start["t1"] = 1.0

    specs = [
        ParamSpec("c0", "identity", *limits["c0"]),
        ParamSpec("t1", "log", *limits["t1"]),
        ParamSpec("beta", "identity", *limits["beta"], free=fixed_beta is None),
    ]
    return run_weighted_fit(
        StretchedExpModel(), specs, start, curve.contrast, curve.sigma, curve.delays,
        max_iter=max_iter, label=label, extra_hash_arrays=(curve.delays,))
