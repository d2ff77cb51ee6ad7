"""
Limited-memory BFGS with a strong-Wolfe line search, run in restarted stages.

Each stage is an independent L-BFGS run warm-started from the previous
stage's iterate with an empty curvature memory and its own iteration budget.
"""
import enum
import logging
import warnings
from collections import deque
from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np
from scipy.optimize import line_search

from core import config
from core.errors import DomainError, NumericalError

logger = logging.getLogger(__name__)


class Termination(str, enum.Enum):
    CONVERGED = 'converged'
    STAGE_BUDGET_EXHAUSTED = 'stage-budget-exhausted'
    LINE_SEARCH_FAILURE = 'line-search-failure'


@dataclass(frozen=True)
class LbfgsConfig:
    memory: int = config.LBFGS_MEMORY
    stages: int = config.LBFGS_STAGES
    max_iterations: int = config.LBFGS_MAX_ITERATIONS
    gradient_tolerance: float = config.LBFGS_GRADIENT_TOLERANCE
    sufficient_decrease: float = config.WOLFE_C1
    curvature: float = config.WOLFE_C2

    def __post_init__(self):
        for name in ('memory', 'stages', 'max_iterations'):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise DomainError(f"{name} must be a positive integer, got {value!r}")
        if not self.gradient_tolerance >= 0:
            raise DomainError(f"gradient_tolerance must be >= 0, got {self.gradient_tolerance}")
        if not 0.0 < self.sufficient_decrease < self.curvature < 1.0:
            raise DomainError(
                "line search parameters must satisfy 0 < sufficient_decrease < curvature < 1, "
                f"got {self.sufficient_decrease} and {self.curvature}"
            )


@dataclass(frozen=True, eq=False)
class OptimReport:
    x: np.ndarray
    fun: float
    stage_trace: Tuple[float, ...]
    iterations: int
    termination: Termination

    @property
    def converged(self) -> bool:
        return self.termination is Termination.CONVERGED


def _checked(objective: Callable, gradient: Callable):
    def f(x):
        value = float(objective(x))
        if not np.isfinite(value):
            raise NumericalError(f"objective is not finite ({value})", x)
        return value

    def g(x):
        value = np.asarray(gradient(x), dtype=float)
        if not np.all(np.isfinite(value)):
            raise NumericalError("gradient has non-finite entries", x)
        return value

    return f, g


def _two_loop(grad: np.ndarray, s_hist: deque, y_hist: deque) -> np.ndarray:
    """Apply the L-BFGS inverse-Hessian approximation to grad."""
    q = grad.copy()
    alphas = []
    for s, y in zip(reversed(s_hist), reversed(y_hist)):
        rho = 1.0 / (y @ s)
        a = rho * (s @ q)
        q -= a * y
        alphas.append((rho, a))
    if s_hist:
        s, y = s_hist[-1], y_hist[-1]
        q *= (s @ y) / (y @ y)
    for (s, y), (rho, a) in zip(zip(s_hist, y_hist), reversed(alphas)):
        b = rho * (y @ q)
        q += (a - b) * s
    return q


def _run_stage(f, g, x, fx, gx, cfg: LbfgsConfig):
    s_hist = deque(maxlen=cfg.memory)
    y_hist = deque(maxlen=cfg.memory)
    # Initial step guess as in scipy's BFGS: roughly a unit step along -g.
    old_fx = fx + np.linalg.norm(gx) / 2.0

    for iteration in range(cfg.max_iterations):
        if np.max(np.abs(gx)) <= cfg.gradient_tolerance:
            return x, fx, gx, iteration, Termination.CONVERGED

        direction = -_two_loop(gx, s_hist, y_hist)
        if gx @ direction >= 0.0:
            s_hist.clear()
            y_hist.clear()
            direction = -gx

        with warnings.catch_warnings():
            warnings.simplefilter('ignore', RuntimeWarning)
            step, _, _, f_new, _, _ = line_search(
                f, g, x, direction, gfk=gx, old_fval=fx, old_old_fval=old_fx,
                c1=cfg.sufficient_decrease, c2=cfg.curvature,
            )
        if step is None or f_new is None or f_new > fx:
            logger.debug("line search failed after %d iterations at f=%.6e", iteration, fx)
            return x, fx, gx, iteration, Termination.LINE_SEARCH_FAILURE

        x_new = x + step * direction
        g_new = g(x_new)
        s = x_new - x
        y = g_new - gx
        if s @ y > np.finfo(float).eps * (y @ y):
            s_hist.append(s)
            y_hist.append(y)

        old_fx = fx
        x, fx, gx = x_new, float(f_new), g_new
        logger.debug("iteration %d: f=%.6e |g|=%.3e", iteration + 1, fx, np.max(np.abs(gx)))

    if np.max(np.abs(gx)) <= cfg.gradient_tolerance:
        return x, fx, gx, cfg.max_iterations, Termination.CONVERGED
    return x, fx, gx, cfg.max_iterations, Termination.STAGE_BUDGET_EXHAUSTED


def minimize(objective: Callable, gradient: Callable, start, cfg: LbfgsConfig = None) -> OptimReport:
    """
    Minimise `objective` from `start` using its exact `gradient`.

    Raises NumericalError if a non-finite value is met; a line-search failure
    only ends the current stage.
    """
    cfg = cfg or LbfgsConfig()
    f, g = _checked(objective, gradient)

    x = np.array(start, dtype=float)
    fx = f(x)
    gx = g(x)
    best_x, best_f = x.copy(), fx

    trace = []
    total = 0
    termination = Termination.STAGE_BUDGET_EXHAUSTED
    for stage in range(cfg.stages):
        x, fx, gx, iterations, termination = _run_stage(f, g, x, fx, gx, cfg)
        total += iterations
        if fx <= best_f:
            best_x, best_f = x.copy(), fx
        trace.append(best_f)
        logger.info("stage %d/%d: %d iterations, objective %.6e (%s)",
                    stage + 1, cfg.stages, iterations, fx, termination.value)
        if termination is Termination.CONVERGED:
            break
        if termination is Termination.LINE_SEARCH_FAILURE and iterations == 0:
            # A fresh stage from the same point would fail the same way.
            break

    return OptimReport(x=best_x, fun=best_f, stage_trace=tuple(trace),
                       iterations=total, termination=termination)
