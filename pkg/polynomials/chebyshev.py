"""
Chebyshev polynomials of the first kind on the beam axis X in [0, 1].

The axis is mapped affinely onto the natural Chebyshev interval by z = 2X - 1,
so every X-derivative picks up a factor 2 per order.
"""
from functools import lru_cache

import numpy as np
from numpy.polynomial import chebyshev as cheb

from core import config
from core.errors import DomainError

MAP_SCALE = 2.0


@lru_cache(maxsize=None)
def _derivative_matrix(order: int, deriv_order: int) -> np.ndarray:
    """Column j holds the Chebyshev coefficients of d^k T_j / dz^k."""
    matrix = cheb.chebder(np.eye(order + 1), m=deriv_order, axis=0)
    matrix.setflags(write=False)
    return matrix


def check_unit_interval(x) -> np.ndarray:
    x_arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x_arr)) or np.any(x_arr < 0.0) or np.any(x_arr > 1.0):
        raise DomainError(f"sample locations must lie in [0, 1], got {x}")
    return x_arr


class MappedChebyshevBasis:
    def __init__(self, order: int = config.BASIS_ORDER):
        if isinstance(order, bool) or int(order) != order or order < 0:
            raise DomainError(f"basis order must be a nonnegative integer, got {order!r}")
        self.order = int(order)

    @property
    def size(self) -> int:
        return self.order + 1

    def __repr__(self) -> str:
        return f"MappedChebyshevBasis(order={self.order})"

    def __eq__(self, other) -> bool:
        return isinstance(other, MappedChebyshevBasis) and other.order == self.order

    def __hash__(self) -> int:
        return hash(('MappedChebyshevBasis', self.order))

    def eval_basis(self, x, deriv_order: int = 0) -> np.ndarray:
        """
        d^k/dX^k T_j(2x - 1) for j = 0..order.

        Scalar x gives a vector of length order + 1; an array of points gives
        one row per point. Values come from the three-term recurrence
        (chebvander) and derivatives from the coefficient recurrence (chebder),
        so entries with j < k are exactly zero.
        """
        if isinstance(deriv_order, bool) or deriv_order not in range(config.MAX_DERIVATIVE_ORDER + 1):
            raise DomainError(
                f"deriv_order must be an integer in 0..{config.MAX_DERIVATIVE_ORDER}, got {deriv_order!r}"
            )
        deriv_order = int(deriv_order)
        z = MAP_SCALE * check_unit_interval(x) - 1.0
        shape = z.shape + (self.size,)

        if deriv_order == 0:
            return cheb.chebvander(z, self.order).reshape(shape)
        if deriv_order > self.order:
            return np.zeros(shape)

        vander = cheb.chebvander(z, self.order - deriv_order)
        rows = (vander @ _derivative_matrix(self.order, deriv_order)) * MAP_SCALE ** deriv_order
        return rows.reshape(shape)

    def evaluate(self, weights, x, deriv_order: int = 0):
        """The functional link h(X) = sum_j w_j T_j(2X - 1), or its derivative."""
        weights = np.asarray(weights, dtype=float)
        if weights.shape != (self.size,):
            raise DomainError(f"expected {self.size} weights, got shape {weights.shape}")
        return self.eval_basis(x, deriv_order) @ weights
