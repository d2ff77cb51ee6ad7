"""
Constrained expressions for univariate point / derivative constraints.

    f(x) = h(x) + sum_j psi_j(x) * (k_j - C_j[h])

The switching functions psi_j are combinations of monomial supports
s_i(x) = x^(i-1) chosen so that C_i[psi_j] = delta_ij; any free function h
therefore yields an f that meets every constraint exactly.
"""
import logging
import math
from dataclasses import dataclass, field, replace
from functools import cached_property, lru_cache
from typing import Sequence, Tuple

import numpy as np
import sympy as sp

from core import config
from core.errors import ConstructionError, DomainError
from polynomials.chebyshev import MappedChebyshevBasis, check_unit_interval

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PointConstraint:
    """f^(derivative_order)(location) = value."""
    location: float
    derivative_order: int = 0
    value: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.location) or not 0.0 <= self.location <= 1.0:
            raise DomainError(f"constraint location must lie in [0, 1], got {self.location}")
        order = self.derivative_order
        if isinstance(order, bool) or int(order) != order or not 0 <= order <= config.MAX_DERIVATIVE_ORDER:
            raise DomainError(
                f"derivative_order must be an integer in 0..{config.MAX_DERIVATIVE_ORDER}, got {order!r}"
            )
        object.__setattr__(self, 'derivative_order', int(order))
        if not math.isfinite(self.value):
            raise DomainError(f"constraint value must be finite, got {self.value}")

    @property
    def key(self) -> Tuple[float, int]:
        return (float(self.location), self.derivative_order)

    def __str__(self) -> str:
        primes = "'" * self.derivative_order if self.derivative_order < 3 else f"^({self.derivative_order})"
        return f"f{primes}({self.location:g}) = {self.value:g}"


def simply_supported() -> Tuple[PointConstraint, ...]:
    """Zero deflection and zero bending moment at both supports."""
    return (
        PointConstraint(0.0, 0),
        PointConstraint(1.0, 0),
        PointConstraint(0.0, 2),
        PointConstraint(1.0, 2),
    )


def _monomial_derivative(power: int, order: int, location: sp.Rational):
    """d^order/dx^order of x^power at location, exactly."""
    if power < order:
        return sp.Integer(0)
    return sp.ff(power, order) * location ** (power - order)


@lru_cache(maxsize=8192)
def _exact_row(exact: sp.ImmutableMatrix, point: float, deriv_order: int) -> Tuple[float, ...]:
    """psi_j^(k)(point) for every j, evaluated in rational arithmetic and rounded once."""
    location = sp.Rational(point)
    supports = sp.Matrix(1, exact.rows, lambda _, i: _monomial_derivative(int(i), deriv_order, location))
    return tuple(float(value) for value in supports * exact)


@dataclass(frozen=True, eq=False)
class SwitchingFunctionSet:
    """
    psi_j(x) = sum_i alpha_ij x^i with alpha held as exact rationals.

    Values are computed in rational arithmetic and rounded once, so
    C_i[psi_j] is exactly 0 or 1 in floating point.
    """
    constraints: Tuple[PointConstraint, ...]
    exact: sp.ImmutableMatrix

    @property
    def count(self) -> int:
        return len(self.constraints)

    @cached_property
    def coefficients(self) -> np.ndarray:
        """Column j holds the monomial coefficients of psi_j, rounded to float."""
        coefficients = np.array(self.exact.tolist(), dtype=float)
        coefficients.setflags(write=False)
        return coefficients

    def evaluate(self, x, deriv_order: int = 0) -> np.ndarray:
        """psi_j^(k)(x) for every j; one row per point for array input."""
        x_arr = check_unit_interval(x)
        rows = [_exact_row(self.exact, point, int(deriv_order)) for point in x_arr.reshape(-1).tolist()]
        return np.array(rows, dtype=float).reshape(x_arr.shape + (self.count,))

    def kronecker_matrix(self) -> np.ndarray:
        """[C_i[psi_j]], the identity."""
        return np.array([self.evaluate(c.location, c.derivative_order) for c in self.constraints])


def _support_matrix(constraints: Tuple[PointConstraint, ...]) -> sp.Matrix:
    """[C_i[s_j]] in exact rational arithmetic; float locations convert without rounding."""
    locations = [sp.Rational(c.location) for c in constraints]
    return sp.Matrix(len(constraints), len(constraints), lambda row, power: _monomial_derivative(
        int(power), constraints[row].derivative_order, locations[row]))


def build_switching_functions(constraints: Sequence[PointConstraint]) -> SwitchingFunctionSet:
    constraints = tuple(constraints)
    if not constraints:
        raise DomainError("at least one constraint is required")

    seen = {}
    for constraint in constraints:
        if constraint.key in seen:
            raise ConstructionError(
                f"duplicated constraint: {seen[constraint.key]} and {constraint} act at the same "
                f"location with the same derivative order",
                constraint=constraint,
            )
        seen[constraint.key] = constraint

    count = len(constraints)
    support = _support_matrix(constraints)
    if support.rank() < count:
        row = next(i for i in range(count) if support[:i + 1, :].rank() <= i)
        offending = constraints[row]
        earlier = ", ".join(str(c) for c in constraints[:row]) or "nothing"
        raise ConstructionError(
            f"constraint operators are linearly dependent on the monomial supports: "
            f"{offending} adds no rank to {earlier}",
            constraint=offending,
        )

    logger.debug("built %d switching functions", count)
    return SwitchingFunctionSet(constraints=constraints, exact=sp.ImmutableMatrix(support.inv()))


@dataclass(frozen=True, eq=False)
class ConstrainedExpression:
    """A Chebyshev functional link h, constrained through a switching set."""
    switching: SwitchingFunctionSet
    basis: MappedChebyshevBasis
    weights: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.weights is None:
            weights = np.zeros(self.basis.size)
        else:
            weights = np.array(self.weights, dtype=float)
        if weights.shape != (self.basis.size,):
            raise DomainError(f"expected {self.basis.size} weights, got shape {weights.shape}")
        if not np.all(np.isfinite(weights)):
            raise DomainError("weights must be finite")
        weights.setflags(write=False)
        object.__setattr__(self, 'weights', weights)

    @classmethod
    def build(cls, constraints: Sequence[PointConstraint], basis: MappedChebyshevBasis = None,
              weights=None) -> 'ConstrainedExpression':
        return cls(build_switching_functions(constraints), basis or MappedChebyshevBasis(), weights)

    def with_weights(self, weights) -> 'ConstrainedExpression':
        return replace(self, weights=weights)

    @property
    def constraints(self) -> Tuple[PointConstraint, ...]:
        return self.switching.constraints

    @property
    def prescribed(self) -> np.ndarray:
        return np.array([c.value for c in self.constraints])

    def constraint_rows(self) -> np.ndarray:
        """Row j applies constraint operator C_j to every basis function."""
        return np.array([self.basis.eval_basis(c.location, c.derivative_order) for c in self.constraints])

    def projections(self) -> np.ndarray:
        """rho_j = k_j - C_j[h] for the current weights."""
        # Row-wise dots round exactly like evaluate() at a single point.
        applied = np.array([row @ self.weights for row in self.constraint_rows()])
        return self.prescribed - applied

    def evaluate(self, x, deriv_order: int = 0):
        free = self.basis.eval_basis(x, deriv_order) @ self.weights
        return free + self.switching.evaluate(x, deriv_order) @ self.projections()

    def linear_map(self, x, deriv_order: int = 0):
        """
        (B, c) with f^(k)(x) = B @ w + c for every weight vector w.
        """
        psi = self.switching.evaluate(x, deriv_order)
        design = self.basis.eval_basis(x, deriv_order) - psi @ self.constraint_rows()
        return design, psi @ self.prescribed
