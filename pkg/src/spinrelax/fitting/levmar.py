"""Damped least-squares minimizer for weighted residual problems.

The caller supplies residual and Jacobian callables over an internal
(already transformed) parameter vector. The damping factor starts at 1e-3,
is divided by 10 on every accepted step and multiplied by 10 on every
rejection, with Marquardt diagonal scaling of the normal matrix. A step is
accepted only when it does not increase the objective, so the sequence of
accepted objective values is nonincreasing by construction.

Convergence is declared after two consecutive accepted steps each showing a
relative objective decrease below ``ftol`` and a gradient infinity norm below
``gtol`` at the new point. Running out of iterations returns a diagnostic
result with ``converged`` False rather than raising.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_TINY = 1e-300
_LAM_FLOOR = 1e-14
_LAM_CAP = 1e15


@dataclass(eq=False)
class LMResult:
    """Outcome of a minimization run.

    ``accepted_costs`` holds the objective after the start point and each
    accepted step, in order; it is nonincreasing.
    """

    x: np.ndarray
    cost: float
    grad_inf: float
    n_iter: int
    n_accepted: int
    converged: bool
    message: str
    accepted_costs: np.ndarray


def levenberg_marquardt(fun, jac, x0, lower=None, upper=None, *, max_iter=500,
                        lam0=1e-3, lam_step=10.0, ftol=1e-10, gtol=1e-8,
                        n_small_steps=2, cost_scale=1.0) -> LMResult:
    """Minimize the (scaled) sum of squared residuals of ``fun``.

    Parameters
    ----------
    fun, jac : callables
        Residual vector r(x) and its Jacobian dr/dx (shape (n, k)).
    x0 : array
        Start point; clipped into [lower, upper].
    lower, upper : arrays or None
        Elementwise box bounds. Proposed steps are projected onto the box
        before evaluation.
    cost_scale : float
        The objective is sum(r**2) / cost_scale. Passing the number of
        residuals makes the convergence thresholds independent of data size;
        the step sequence itself is unaffected because the Marquardt-scaled
        normal equations are homogeneous in the scale.
    """
    x = np.asarray(x0, dtype=float).copy()
    k = x.size
    lower = np.full(k, -np.inf) if lower is None else np.asarray(lower, dtype=float)
    upper = np.full(k, np.inf) if upper is None else np.asarray(upper, dtype=float)
    x = np.clip(x, lower, upper)
    scale = float(cost_scale)
    if not scale > 0:
        raise ValueError("cost_scale must be positive")

    r = np.asarray(fun(x), dtype=float)
    cost = float(r @ r) / scale
    jacobian = np.asarray(jac(x), dtype=float)
    grad = jacobian.T @ r / scale
    grad_inf = float(np.max(np.abs(grad))) if k else 0.0

    lam = float(lam0)
    consecutive = 0
    n_accepted = 0
    accepted_costs = [cost]
    converged = False
    message = "maximum iterations reached"
    n_iter = 0

    for n_iter in range(1, max_iter + 1):
        if grad_inf == 0.0:
            converged = True
            message = "gradient is exactly zero"
            break
        normal = jacobian.T @ jacobian / scale
        diag = np.diag(normal).copy()
        floor = max(diag.max(), _TINY) * 1e-14
        diag[diag < floor] = floor
        try:
            step = np.linalg.solve(normal + lam * np.diag(diag), -grad)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(normal + lam * np.diag(diag), -grad, rcond=None)[0]
        x_new = np.clip(x + step, lower, upper)
        r_new = np.asarray(fun(x_new), dtype=float)
        cost_new = float(r_new @ r_new) / scale

        if cost_new <= cost:
            rel_decrease = (cost - cost_new) / max(cost, _TINY)
            x, r, cost = x_new, r_new, cost_new
            n_accepted += 1
            accepted_costs.append(cost)
            lam = max(lam / lam_step, _LAM_FLOOR)
            jacobian = np.asarray(jac(x), dtype=float)
            grad = jacobian.T @ r / scale
            grad_inf = float(np.max(np.abs(grad)))
            if rel_decrease < ftol and grad_inf < gtol:
                consecutive += 1
                if consecutive >= n_small_steps:
                    converged = True
                    message = "converged"
                    break
            else:
                consecutive = 0
        else:
            lam = min(lam * lam_step, _LAM_CAP)
            if lam >= _LAM_CAP and not np.any(np.abs(step) > 0):
                message = "no acceptable step at maximum damping"
                break

    return LMResult(x=x, cost=cost, grad_inf=grad_inf, n_iter=n_iter,
                    n_accepted=n_accepted, converged=converged, message=message,
                    accepted_costs=np.asarray(accepted_costs))
