"""Damped Gauss-Newton (Levenberg-Marquardt) least squares.

Small self-contained solver used by every fit in the package: residual
callback, forward-difference Jacobians with relative steps, Marquardt
damping scaled by diag(J^T J).  Convergence when the relative step drops
below step_tol, the scale-weighted gradient falls below grad_tol relative
to the cost, or a step no longer reduces the cost by more than one part
in 1e12; hard cap max_iter iterations.  Parameter uncertainties come from
the Jacobian covariance scaled by the residual variance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_SQRT_EPS = math.sqrt(np.finfo(float).eps)


@dataclass(frozen=True)
class LMResult:
    params: np.ndarray
    sigmas: np.ndarray
    covariance: np.ndarray
    residual_norm: float
    converged: bool
    n_iter: int


def _jacobian(fun, p, r0, x_scale):
    jac = np.empty((r0.size, p.size))
    for j in range(p.size):
        h = _SQRT_EPS * max(abs(p[j]), x_scale[j])
        pj = p.copy()
        pj[j] += h
        jac[:, j] = (fun(pj) - r0) / h
    return jac


def least_squares(
    fun,
    p0,
    x_scale=None,
    max_iter: int = 500,
    step_tol: float = 1e-10,
    grad_tol: float = 1e-12,
) -> LMResult:
    """Minimize sum(fun(p)^2) from p0.

    Parameters
    ----------
    fun : callable
        Residual vector for a parameter vector.
    p0 : array_like
        Starting point.
    x_scale : array_like, optional
        Typical magnitude per parameter; sets finite-difference steps for
        parameters passing through zero.  Defaults to |p0| (floored).
    """
    p = np.asarray(p0, dtype=np.float64).copy()
    if x_scale is None:
        x_scale = np.maximum(np.abs(p), 1e-12 * max(1.0, np.abs(p).max(initial=0.0)))
    x_scale = np.maximum(np.asarray(x_scale, dtype=np.float64), 1e-300)

    r = np.asarray(fun(p), dtype=np.float64)
    cost = float(r @ r)
    lam = 1e-3
    converged = False
    n_iter = 0
    jac = _jacobian(fun, p, r, x_scale)

    def grad_small(grad, tol):
        # scale-weighted gradient, dimensionless against the cost
        return float(np.max(np.abs(grad) * x_scale)) <= tol * max(cost, 1e-300)

    while n_iter < max_iter:
        n_iter += 1
        jtj = jac.T @ jac
        grad = jac.T @ r
        if grad_small(grad, grad_tol):
            converged = True
            break
        stepped = False
        for _ in range(60):  # inner damping search
            damped = jtj + lam * np.diag(np.maximum(np.diag(jtj), 1e-300))
            try:
                delta = np.linalg.solve(damped, -grad)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            if np.max(np.abs(delta) / np.maximum(np.abs(p), x_scale)) < step_tol:
                converged = True  # damping shrank the trial step to nothing
                break
            r_new = np.asarray(fun(p + delta), dtype=np.float64)
            cost_new = float(r_new @ r_new)
            if np.isfinite(cost_new) and cost_new < cost:
                p = p + delta
                r = r_new
                cost_prev = cost
                cost = cost_new
                lam = max(lam / 3.0, 1e-12)
                stepped = True
                break
            lam *= 10.0
            if lam > 1e14:
                break
        if not stepped:
            if not converged:
                # cost floor; accept if the scaled gradient is small too
                converged = grad_small(grad, 1e-6)
            break
        rel_step = np.max(np.abs(delta) / np.maximum(np.abs(p), x_scale))
        jac = _jacobian(fun, p, r, x_scale)
        if rel_step < step_tol or cost_prev - cost <= 1e-12 * cost_prev:
            converged = True
            break
        if grad_small(jac.T @ r, grad_tol):
            converged = True
            break

    dof = r.size - p.size
    jtj = jac.T @ jac
    try:
        cov = np.linalg.inv(jtj)
    except np.linalg.LinAlgError:
        cov = np.linalg.pinv(jtj)
    if dof > 0:
        cov = cov * (cost / dof)
    sigmas = np.sqrt(np.maximum(np.diag(cov), 0.0))
    return LMResult(
        params=p,
        sigmas=sigmas,
        covariance=cov,
        residual_norm=math.sqrt(cost),
        converged=converged,
        n_iter=n_iter,
    )
