"""Accelerated projected gradient descent with backtracking.

Minimises a differentiable ``f`` over the box ``x >= lower`` (or the whole
space).  Used for the grid torsion problems and the radial oracles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = ["OptimizeResult", "projected_gradient"]


@dataclass
class OptimizeResult:
    x: np.ndarray
    value: float
    iterations: int
    converged: bool
    diverged: bool = False


def projected_gradient(
    fun: Callable[[np.ndarray], tuple[float, np.ndarray]],
    x0: np.ndarray,
    lower: float | None = 0.0,
    max_iter: int = 5000,
    tol: float = 1e-10,
    step0: float = 1.0,
) -> OptimizeResult:
    """FISTA with backtracking line search and function-value restart.

    Parameters
    ----------
    fun : callable
        Returns ``(f(x), grad f(x))``.
    x0 : ndarray
        Starting point (projected before use).
    lower : float or None
        Box constraint ``x >= lower``; ``None`` for no constraint.
    tol : float
        Stop when the projected step changes ``x`` by less than
        ``tol * max(1, |x|)`` in max norm.
    """

    def proj(z: np.ndarray) -> np.ndarray:
        return z if lower is None else np.maximum(z, lower)

    x = proj(np.asarray(x0, dtype=float).copy())
    fx, _ = fun(x)
    y, t, L = x.copy(), 1.0, 1.0 / step0
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        fy, gy = fun(y)
        if not (math.isfinite(fy) and np.all(np.isfinite(gy))):
            return OptimizeResult(x, fx, it, False, diverged=True)
        while True:
            x_new = proj(y - gy / L)
            d = x_new - y
            f_new, _ = fun(x_new)
            if f_new <= fy + float(np.dot(gy, d)) + 0.5 * L * float(np.dot(d, d)) + 1e-15 * abs(fy):
                break
            L *= 2.0
            if L > 1e30:
                return OptimizeResult(x, fx, it, False, diverged=True)
        if f_new > fx:
            if t == 1.0:
                # a plain projected step no longer decreases f
                converged = True
                break
            # restart momentum from the last accepted iterate
            y, t = x.copy(), 1.0
            continue
        step = float(np.max(np.abs(x_new - x), initial=0.0))
        t_new = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t * t))
        y = x_new + ((t - 1.0) / t_new) * (x_new - x)
        x, fx, t = x_new, f_new, t_new
        L *= 0.9
        if step <= tol * max(1.0, float(np.max(np.abs(x), initial=0.0))):
            converged = True
            break
    return OptimizeResult(x, fx, it, converged)
