"""
Static bending of a simply supported perforated nanobeam under a sinusoidal
load, solved with a Chebyshev functional link inside a constrained expression.

Nondimensional problem:
    W''''(X) = (1 + a² pi²) sin(pi X) / P1,   W(0) = W(1) = W''(0) = W''(1) = 0
where a is the nonlocal parameter. The residual of the constrained expression
is linear in the weights, so the collocation loss is a linear least-squares
objective with an exact gradient.
"""
import enum
import logging
import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import linalg as sla

from constrained.expression import ConstrainedExpression, PointConstraint, simply_supported
from core import config
from core.errors import DomainError
from numerics.linalg import least_squares, qr_factor
from optimization.lbfgs import LbfgsConfig, OptimReport, minimize
from perforation.model import BeamCase, effective_coefficients
from polynomials.chebyshev import MappedChebyshevBasis, check_unit_interval

logger = logging.getLogger(__name__)

RESIDUAL_ORDER = 4


class ProfileKind(str, enum.Enum):
    STATIC = 'static'
    DYNAMIC = 'dynamic'


@dataclass(frozen=True, eq=False)
class DeflectionProfile:
    """Deflection samples already multiplied by the presentation scale (x100)."""
    samples: np.ndarray
    values: np.ndarray
    kind: ProfileKind

    def __post_init__(self):
        samples = np.array(self.samples, dtype=float).reshape(-1)
        values = np.array(self.values, dtype=float).reshape(-1)
        if samples.shape != values.shape:
            raise DomainError(f"{samples.size} samples but {values.size} values")
        samples.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, 'samples', samples)
        object.__setattr__(self, 'values', values)
        object.__setattr__(self, 'kind', ProfileKind(self.kind))

    def at(self, x: float) -> float:
        """Value at a sample location that is on the grid."""
        hits = np.flatnonzero(np.isclose(self.samples, x, rtol=0.0, atol=1e-12))
        if hits.size == 0:
            raise DomainError(f"X={x} is not one of the profile samples")
        return float(self.values[hits[0]])


def sample_grid(count: int = config.SAMPLE_COUNT) -> np.ndarray:
    if count < 2:
        raise DomainError(f"need at least 2 samples, got {count}")
    return np.linspace(0.0, 1.0, int(count))


def collocation_points(count: int, grid: str = config.COLLOCATION_GRID) -> np.ndarray:
    """Equispaced points including both ends, or Chebyshev-Gauss-Lobatto points on [0, 1]."""
    if grid == 'uniform':
        return np.linspace(0.0, 1.0, count)
    if grid == 'chebyshev':
        return 0.5 * (1.0 - np.cos(np.pi * np.arange(count) / (count - 1)))
    raise DomainError(f"unknown collocation grid {grid!r} (expected 'uniform' or 'chebyshev')")


@dataclass(frozen=True, eq=False)
class StaticProblem:
    case: BeamCase
    basis: MappedChebyshevBasis = field(default_factory=MappedChebyshevBasis)
    collocation_count: int = config.COLLOCATION_POINTS
    grid: str = config.COLLOCATION_GRID
    constraints: Tuple[PointConstraint, ...] = field(default_factory=simply_supported)

    def __post_init__(self):
        if int(self.collocation_count) != self.collocation_count or self.collocation_count < 2:
            raise DomainError(f"collocation_count must be an integer >= 2, got {self.collocation_count!r}")
        if self.collocation_count < self.basis.size:
            raise DomainError(
                f"collocation_count ({self.collocation_count}) must be at least the basis size ({self.basis.size})"
            )
        collocation_points(2, self.grid)
        object.__setattr__(self, 'constraints', tuple(self.constraints))

    @cached_property
    def expression(self) -> ConstrainedExpression:
        return ConstrainedExpression.build(self.constraints, self.basis)

    @cached_property
    def points(self) -> np.ndarray:
        return collocation_points(int(self.collocation_count), self.grid)

    @cached_property
    def system(self) -> Tuple[np.ndarray, np.ndarray]:
        """(A, b) such that the residual on the collocation grid is A @ w - b."""
        design, offset = self.expression.linear_map(self.points, RESIDUAL_ORDER)
        rhs = forcing(self.case, self.points) - offset
        design.setflags(write=False)
        rhs.setflags(write=False)
        return design, rhs

    @cached_property
    def active_columns(self) -> np.ndarray:
        """Weights the residual depends on; the rest are annihilated by d^4/dX^4."""
        return np.flatnonzero(np.linalg.norm(self.system[0], axis=0) > 0.0)


@dataclass(frozen=True, eq=False)
class TrainReport:
    method: str
    mean_square_residual: float
    optim: Optional[OptimReport] = None


def forcing(case: BeamCase, x):
    """Right-hand side (1 + a² pi²) sin(pi x) / P1."""
    x_arr = check_unit_interval(x)
    p1 = effective_coefficients(case).p1
    amplitude = (1.0 + case.nonlocal_param ** 2 * math.pi ** 2) / p1
    return amplitude * np.sin(math.pi * x_arr)


def residual(problem: StaticProblem, weights, x):
    """Fourth derivative of the constrained expression minus the load term."""
    expression = problem.expression.with_weights(weights)
    return expression.evaluate(x, RESIDUAL_ORDER) - forcing(problem.case, x)


def loss(problem: StaticProblem, weights) -> float:
    """Mean square residual over the collocation grid."""
    design, rhs = problem.system
    r = design @ np.asarray(weights, dtype=float) - rhs
    return float(np.mean(r * r))


def loss_gradient(problem: StaticProblem, weights) -> np.ndarray:
    design, rhs = problem.system
    r = design @ np.asarray(weights, dtype=float) - rhs
    return (2.0 / r.size) * (design.T @ r)


def initial_weights(size: int, seed: int = config.SEED,
                    scale: float = config.INIT_WEIGHT_SCALE) -> np.ndarray:
    return np.random.default_rng(seed).uniform(-scale, scale, size)


def _solve_direct(problem: StaticProblem) -> np.ndarray:
    design, rhs = problem.system
    active = problem.active_columns
    weights = np.zeros(problem.basis.size)
    weights[active] = least_squares(design[:, active], rhs)
    return weights


def whitening(problem: StaticProblem) -> np.ndarray:
    """
    Upper-triangular F with u = F @ w[active] turning the loss Hessian into
    the identity: F is the QR factor R of the active design columns divided
    by sqrt(n / 2) for n collocation points.
    """
    design, _ = problem.system
    _, r = qr_factor(design[:, problem.active_columns])
    return r / math.sqrt(0.5 * design.shape[0])


def _solve_lbfgs(problem: StaticProblem, lbfgs: LbfgsConfig, seed: int):
    active = problem.active_columns
    factor = whitening(problem)
    start = initial_weights(problem.basis.size, seed)

    def weights_of(u):
        # Inert weights keep their seeded values; the residual ignores them.
        weights = start.copy()
        weights[active] = sla.solve_triangular(factor, u, lower=False, check_finite=False)
        return weights

    def gradient(u):
        full = loss_gradient(problem, weights_of(u))
        return sla.solve_triangular(factor, full[active], lower=False, trans='T', check_finite=False)

    report = minimize(lambda u: loss(problem, weights_of(u)), gradient, factor @ start[active], lbfgs)
    weights = weights_of(report.x)
    return weights, replace(report, x=weights)


def solve(problem: StaticProblem, method: str = 'direct', lbfgs: LbfgsConfig = None,
          seed: int = config.SEED):
    """
    Train the free-function weights.

    'lbfgs' minimises the mean square residual with staged L-BFGS;
    'direct' solves the same linear least-squares problem by QR.
    """
    if method == 'direct':
        weights, optim = _solve_direct(problem), None
    elif method == 'lbfgs':
        weights, optim = _solve_lbfgs(problem, lbfgs or LbfgsConfig(), seed)
    else:
        raise DomainError(f"unknown method {method!r} (expected 'lbfgs' or 'direct')")

    msr = loss(problem, weights)
    logger.info("static %s solve for %s: mean square residual %.3e", method, problem.case.label(), msr)
    return weights, TrainReport(method=method, mean_square_residual=msr, optim=optim)


def static_deflection(problem: StaticProblem, weights, samples: Sequence[float]) -> DeflectionProfile:
    samples = check_unit_interval(samples).reshape(-1)
    values = problem.expression.with_weights(weights).evaluate(samples)
    return DeflectionProfile(samples, config.DEFLECTION_SCALE * values, ProfileKind.STATIC)


def closed_form_static(case: BeamCase, samples: Sequence[float]) -> DeflectionProfile:
    """Exact solution (1 + a² pi²) sin(pi X) / (P1 pi^4), scaled by 100."""
    samples = check_unit_interval(samples).reshape(-1)
    p1 = effective_coefficients(case).p1
    amplitude = (1.0 + case.nonlocal_param ** 2 * math.pi ** 2) / (p1 * math.pi ** 4)
    values = config.DEFLECTION_SCALE * amplitude * np.sin(math.pi * samples)
    return DeflectionProfile(samples, values, ProfileKind.STATIC)


def solve_static(case: BeamCase, samples: Sequence[float] = None, method: str = 'direct',
                 lbfgs: LbfgsConfig = None, seed: int = config.SEED, **problem_args):
    """Build, train and sample in one call."""
    problem = StaticProblem(case, **problem_args)
    weights, report = solve(problem, method, lbfgs=lbfgs, seed=seed)
    grid = sample_grid() if samples is None else samples
    return static_deflection(problem, weights, grid), report
