"""Quasi-Newton minimization with a strong-Wolfe line search.

Kept deliberately small: BFGS with inverse-Hessian updates plus a plain
gradient-descent baseline for tests.  The trace records every iterate so runs
can be replayed and exported.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import warnings

import numpy as np
from scipy.optimize import line_search
from scipy.optimize._linesearch import LineSearchWarning


@dataclass
class IterationRecord:
    iteration: int
    params: np.ndarray
    cost: float
    grad_norm: float
    eval_count: int


@dataclass
class OptimizerTrace:
    iterations: list[IterationRecord] = field(default_factory=list)
    status: str = "max_iter"
    x_final: Optional[np.ndarray] = None
    f_final: float = np.inf
    cost_evals: int = 0
    grad_evals: int = 0


def bfgs_minimize(
    cost: Callable[[np.ndarray], float],
    grad: Callable[[np.ndarray], np.ndarray],
    x0,
    max_iter: int = 200,
    grad_tol: float = 1e-6,
    c1: float = 1e-4,
    c2: float = 0.9,
) -> OptimizerTrace:
    """BFGS with strong-Wolfe line search; returns the best iterate found.

    Status is ``converged`` when the gradient norm drops below ``grad_tol``,
    ``line_search_failure`` when no acceptable step exists (the best iterate
    so far is still returned, which keeps noisy cost functions usable), and
    ``max_iter`` otherwise.
    """
    trace = OptimizerTrace()

    def f(x):
        trace.cost_evals += 1
        return float(cost(np.asarray(x, dtype=float)))

    def df(x):
        trace.grad_evals += 1
        return np.asarray(grad(np.asarray(x, dtype=float)), dtype=float)

    x = np.asarray(x0, dtype=float).copy()
    n = x.size
    H = np.eye(n)
    fx = f(x)
    gx = df(x)

    best_x, best_f = x.copy(), fx

    def record(i):
        trace.iterations.append(
            IterationRecord(i, x.copy(), fx, float(np.linalg.norm(gx)),
                            trace.cost_evals + trace.grad_evals)
        )

    record(0)
    status = "max_iter"
    for it in range(1, max_iter + 1):
        if np.linalg.norm(gx) <= grad_tol:
            status = "converged"
            break
        direction = -H @ gx
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", LineSearchWarning)
            alpha, _, _, f_new, _, g_new = line_search(
                f, df, x, direction, gfk=gx, old_fval=fx, c1=c1, c2=c2, maxiter=40
            )
        if alpha is None:
            # Wolfe bracketing failed; fall back to plain Armijo backtracking
            # along the steepest descent direction before giving up.
            direction = -gx
            alpha, f_new = _backtrack(f, x, fx, gx, direction, c1)
            if alpha is None:
                status = "line_search_failure"
                break
            g_new = None

        x_prev, g_prev = x, gx
        x = x + alpha * direction
        fx = f_new if f_new is not None else f(x)
        gx = g_new if g_new is not None else df(x)
        if fx < best_f:
            best_f, best_x = fx, x.copy()

        # inverse-Hessian update, skipped on non-positive curvature
        s = x - x_prev
        y = gx - g_prev
        sy = float(s @ y)
        if sy > 1e-12:
            rho = 1.0 / sy
            I = np.eye(n)
            H = (I - rho * np.outer(s, y)) @ H @ (I - rho * np.outer(y, s)) \
                + rho * np.outer(s, s)
        record(it)

    if np.linalg.norm(gx) <= grad_tol:
        status = "converged"
    if fx < best_f:
        best_f, best_x = fx, x.copy()
    trace.status = status
    trace.x_final = best_x
    trace.f_final = best_f
    return trace


def _backtrack(f, x, fx, gx, direction, c1, alpha0: float = 1.0, shrink: float = 0.5,
               max_steps: int = 25):
    slope = float(gx @ direction)
    alpha = alpha0
    for _ in range(max_steps):
        f_new = f(x + alpha * direction)
        if f_new <= fx + c1 * alpha * slope:
            return alpha, f_new
        alpha *= shrink
    return None, None


def gradient_descent(
    cost: Callable[[np.ndarray], float],
    grad: Callable[[np.ndarray], np.ndarray],
    x0,
    step: float = 0.1,
    max_iter: int = 500,
    grad_tol: float = 1e-6,
) -> OptimizerTrace:
    """Fixed-step gradient descent baseline used in tests."""
    trace = OptimizerTrace()
    x = np.asarray(x0, dtype=float).copy()
    status = "max_iter"
    for it in range(max_iter + 1):
        fx = float(cost(x))
        gx = np.asarray(grad(x), dtype=float)
        trace.cost_evals += 1
        trace.grad_evals += 1
        trace.iterations.append(
            IterationRecord(it, x.copy(), fx, float(np.linalg.norm(gx)),
                            trace.cost_evals + trace.grad_evals)
        )
        if np.linalg.norm(gx) <= grad_tol:
            status = "converged"
            break
        x = x - step * gx
    trace.status = status
    trace.x_final = trace.iterations[-1].params
    trace.f_final = trace.iterations[-1].cost
    return trace
