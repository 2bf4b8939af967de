"""Fit result container with covariance, diagnostics, and serialization."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field as dataclass_field
from typing import Optional

import numpy as np

from ..errors import DomainError


def data_checksum(*arrays) -> str:
    """Order-sensitive checksum identifying the exact data a fit consumed."""
    digest = hashlib.sha256()
    for arr in arrays:
        digest.update(np.ascontiguousarray(arr, dtype=float).tobytes())
        digest.update(b"|")
    return digest.hexdigest()[:16]


@dataclass(eq=False)
class FitResult:
    """Outcome of a weighted least-squares fit.

    ``params`` maps every model parameter (free and fixed) to its value;
    ``free_names`` orders the free subset, and ``covariance``/``stderr``
    cover the free subset only (stderr of a fixed parameter is reported as 0).
    ``residuals`` are the weighted residuals (model - data) / sigma at the
    solution. ``data_hash`` identifies the fitted dataset for model
    comparison.
    """

    params: dict
    stderr: dict
    free_names: tuple
    covariance: np.ndarray
    chi2: float
    chi2_reduced: float
    n_points: int
    n_free: int
    n_iter: int
    converged: bool
    grad_inf: float
    message: str
    residuals: np.ndarray
    data_hash: str
    label: str = "fit"
    model_config: Optional[dict] = None

    def __post_init__(self):
        self.covariance = np.asarray(self.covariance, dtype=float)
        if self.covariance.shape != (self.n_free, self.n_free):
            raise DomainError("covariance must be square over the free parameters")
        if self.chi2 < 0:
            raise DomainError("chi2 must be nonnegative")

    def to_dict(self) -> dict:
        """JSON-ready representation."""
        payload = {
            "label": self.label,
            "params": {k: float(v) for k, v in self.params.items()},
            "stderr": {k: float(v) for k, v in self.stderr.items()},
            "free_names": list(self.free_names),
            "covariance": [[float(v) for v in row] for row in self.covariance],
            "chi2": float(self.chi2),
            "chi2_reduced": float(self.chi2_reduced),
            "n_points": int(self.n_points),
            "n_free": int(self.n_free),
            "n_iter": int(self.n_iter),
            "converged": bool(self.converged),
            "grad_inf": float(self.grad_inf),
            "message": self.message,
            "data_hash": self.data_hash,
        }
        if self.model_config is not None:
            payload["model_config"] = self.model_config
        return payload
