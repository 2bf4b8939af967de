"""Shared machinery for weighted model fits.

Strictly positive parameters are fitted in log space, which enforces
positivity without active-set logic; other parameters use box bounds applied
by step projection. Covariances are reported in external parameter space.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DomainError, IdentifiabilityError
from .levmar import levenberg_marquardt
from .result import FitResult, data_checksum

_LOG_FLOOR = 1e-290


@dataclass(frozen=True)
class ParamSpec:
    """Fit-time declaration of one model parameter.

    transform is "identity" or "log"; lower/upper are external-space bounds.
    """

    name: str
    transform: str = "identity"
    lower: float = -np.inf
    upper: float = np.inf
    free: bool = True

    def to_internal(self, value: float) -> float:
        if self.transform == "log":
            if value <= 0:
                raise DomainError(
                    f"parameter {self.name} is fitted in log space and needs a "
                    f"positive value, got {value!r}")
            return float(np.log(value))
        return float(value)

    def from_internal(self, value: float) -> float:
        if self.transform == "log":
            return float(np.exp(value))
        return float(value)

    def chain(self, external_value: float) -> float:
        """d(external) / d(internal) at the given external value."""
        return external_value if self.transform == "log" else 1.0

    def internal_bounds(self):
        if self.transform == "log":
            lo = np.log(max(self.lower, _LOG_FLOOR))
            hi = np.log(self.upper) if np.isfinite(self.upper) else np.inf
            return lo, hi
        return self.lower, self.upper


def run_weighted_fit(model, specs, init, y, sigma, points, *, max_iter=500,
                     label="fit", model_config=None, extra_hash_arrays=()) -> FitResult:
    """Weighted least-squares fit of ``model`` to (y, sigma) at ``points``.

    ``specs`` covers every model parameter in model order with free/fixed
    flags; ``init`` maps parameter names to start (and fixed) values.
    """
    y = np.asarray(y, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    if np.any(sigma <= 0) or np.any(~np.isfinite(sigma)):
        raise DomainError("sigma must be finite and positive")
    by_name = {s.name: s for s in specs}
    if set(by_name) != set(model.names):
        raise DomainError("parameter specs must cover exactly the model parameters")
    free = [by_name[name] for name in model.names if by_name[name].free]
    if not free:
        raise DomainError("at least one parameter must be free")
    for spec in specs:
        if spec.name not in init:
            raise DomainError(f"missing initial value for parameter {spec.name}")
    free_idx = [model.names.index(s.name) for s in free]

    def assemble(theta):
        params = {name: float(init[name]) for name in model.names}
        for spec, value in zip(free, theta):
            params[spec.name] = spec.from_internal(value)
        return params

    def residuals(theta):
        return (model.predict(assemble(theta), points) - y) / sigma

    def jac(theta):
        params = assemble(theta)
        full = np.asarray(model.jacobian(params, points), dtype=float)
        chain = np.array([spec.chain(params[spec.name]) for spec in free])
        return full[:, free_idx] * chain[None, :] / sigma[:, None]

    theta0 = np.array([spec.to_internal(float(init[spec.name])) for spec in free])
    lower = np.array([spec.internal_bounds()[0] for spec in free])
    upper = np.array([spec.internal_bounds()[1] for spec in free])

    # Engine objective is the mean squared weighted residual so its
    # convergence thresholds do not depend on the number of points.
    solution = levenberg_marquardt(residuals, jac, theta0, lower, upper,
                                   max_iter=max_iter, cost_scale=y.size)
    chi2 = solution.cost * y.size

    params = assemble(solution.x)
    jac_ext = np.asarray(model.jacobian(params, points), dtype=float)[:, free_idx] / sigma[:, None]
    normal = jac_ext.T @ jac_ext
    try:
        covariance = np.linalg.inv(normal)
    except np.linalg.LinAlgError:
        covariance = np.linalg.pinv(normal)
    covariance = 0.5 * (covariance + covariance.T)

    stderr = {name: 0.0 for name in model.names}
    diag = np.sqrt(np.clip(np.diag(covariance), 0.0, None))
    for spec, err in zip(free, diag):
        stderr[spec.name] = float(err)

    n_points = y.size
    n_free = len(free)
    dof = n_points - n_free
    residual_final = residuals(solution.x)
    return FitResult(
        params=params,
        stderr=stderr,
        free_names=tuple(s.name for s in free),
        covariance=covariance,
        chi2=chi2,
        chi2_reduced=chi2 / dof if dof > 0 else float("nan"),
        n_points=int(n_points),
        n_free=int(n_free),
        n_iter=solution.n_iter,
        converged=solution.converged,
        grad_inf=solution.grad_inf,
        message=solution.message,
        residuals=residual_final,
        data_hash=data_checksum(y, sigma, *extra_hash_arrays),
        label=label,
        model_config=model_config,
    )


def check_identifiability(model, specs, init, sigma, points, threshold=1e12):
    """Raise IdentifiabilityError when the weighted Jacobian at the start point
    is numerically rank deficient (condition number above ``threshold``).

    The parameters loading on the smallest singular vector are named in the
    error.
    """
    sigma = np.asarray(sigma, dtype=float)
    by_name = {s.name: s for s in specs}
    free = [by_name[name] for name in model.names if by_name[name].free]
    free_idx = [model.names.index(s.name) for s in free]
    params = {name: float(init[name]) for name in model.names}
    full = np.asarray(model.jacobian(params, points), dtype=float)
    chain = np.array([spec.chain(params[spec.name]) for spec in free])
    jac_int = full[:, free_idx] * chain[None, :] / sigma[:, None]
    singular = np.linalg.svd(jac_int, compute_uv=False)
    smallest = singular[-1]
    condition = np.inf if smallest == 0 else singular[0] / smallest
    if condition > threshold:
        _, _, vt = np.linalg.svd(jac_int)
        weights = np.abs(vt[-1])
        involved = [free[i].name for i in np.flatnonzero(weights > 0.3 * weights.max())]
        raise IdentifiabilityError(
            f"free parameters are not identifiable from the data "
            f"(condition number {condition:.3g}); colinear parameters: {involved}",
            parameters=involved)
