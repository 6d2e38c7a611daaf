"""Quasi-Newton minimization with an energy-change stopping rule."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import minimize


class NonFiniteCost(FloatingPointError):
    pass


@dataclass
class Minimization:
    x: np.ndarray
    fun: float
    n_iter: int
    status: str
    history: list[float] = field(default_factory=list)


def bfgs(
    fun: Callable[[np.ndarray], tuple[float, np.ndarray]],
    x0,
    max_iterations: int = 3000,
    convergence_tol: float = 1e-12,
    grad_tol: float = 1e-11,
    patience: int = 20,
) -> Minimization:
    """Minimize ``fun`` (returning value and gradient) with BFGS.

    scipy's BFGS supplies the inverse-Hessian updates and the Wolfe line
    search.  On top of its gradient test, the run stops once the value has
    moved by less than ``convergence_tol`` on ``patience`` successive
    iterations.  ``history`` holds the value after every iteration, starting
    with ``fun(x0)``.
    """

    def checked(x):
        f, g = fun(x)
        if not np.isfinite(f) or not np.all(np.isfinite(g)):
            raise NonFiniteCost(f"cost evaluated to {f!r}")
        return f, g

    x0 = np.array(x0, dtype=float)
    history = [float(checked(x0)[0])]
    quiet = 0

    def callback(intermediate_result):
        nonlocal quiet
        f = float(intermediate_result.fun)
        quiet = quiet + 1 if abs(history[-1] - f) < convergence_tol else 0
        history.append(f)
        if quiet >= patience:
            raise StopIteration

    res = minimize(
        checked, x0, jac=True, method="BFGS", callback=callback,
        options={"gtol": grad_tol, "maxiter": max_iterations},
    )
    if quiet >= patience:
        status = "converged"
    elif res.status == 0:
        status = "gradient_tol"
    elif res.status == 1:
        status = "max_iterations"
    else:
        status = "line_search_stalled"
    return Minimization(x=np.asarray(res.x), fun=float(res.fun), n_iter=int(res.nit), status=status, history=history)
