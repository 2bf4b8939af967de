"""Ranking of competing fits by the corrected Akaike information criterion."""

from __future__ import annotations

import numpy as np

from ..errors import DomainError
from .result import FitResult


def aicc(chi2: float, n_points: int, n_free: int) -> float:
    """Corrected AIC for a weighted least-squares fit with known sigmas.

    chi2 + 2k plus the small-sample correction 2k(k+1)/(n-k-1); requires
    n > k + 1.
    """
    if n_points <= n_free + 1:
        raise DomainError(
            f"AICc needs more than n_free + 1 = {n_free + 1} points, got {n_points}")
    k = n_free
    return float(chi2 + 2.0 * k + 2.0 * k * (k + 1.0) / (n_points - k - 1.0))


def compare_models(results) -> list:
    """Rank fits of the same dataset by AICc.

    All results must share the dataset (same data hash and point count);
    otherwise a DomainError is raised. Returns one dict per fit, sorted best
    first, with the AICc difference ``delta`` relative to the best model.
    """
    results = list(results)
    if not results:
        raise DomainError("no fit results to compare")
    for r in results:
        if not isinstance(r, FitResult):
            raise DomainError(f"expected FitResult, got {type(r).__name__}")
    reference = results[0]
    for r in results[1:]:
        if r.data_hash != reference.data_hash or r.n_points != reference.n_points:
            raise DomainError(
                f"fit {r.label!r} was made against a different dataset than "
                f"{reference.label!r}; model comparison requires identical data")
    scores = [aicc(r.chi2, r.n_points, r.n_free) for r in results]
    best = min(scores)
    order = np.argsort(scores, kind="stable")
    table = []
    for rank, i in enumerate(order, start=1):
        r = results[i]
        table.append({
            "label": r.label,
            "rank": rank,
            "n_free": r.n_free,
            "chi2": float(r.chi2),
            "chi2_reduced": float(r.chi2_reduced),
            "aicc": float(scores[i]),
            "delta": float(scores[i] - best),
        })
    return table
