"""
Exception types shared by the solver packages.
"""
import numpy as np


class DomainError(ValueError):
    """An input lies outside the range a routine is defined on."""


class ConstructionError(ValueError):
    """A constraint set cannot be turned into switching functions."""

    def __init__(self, message: str, constraint=None):
        super().__init__(message)
        self.constraint = constraint


class UsageError(ValueError):
    """Inputs are individually valid but cannot be combined."""


class SingularMatrixError(np.linalg.LinAlgError):
    def __init__(self, message: str, pivot: int):
        super().__init__(message)
        self.pivot = pivot


class RankDeficiencyError(np.linalg.LinAlgError):
    def __init__(self, message: str, column: int):
        super().__init__(message)
        self.column = column


class DefinitenessError(np.linalg.LinAlgError):
    def __init__(self, message: str, minor: int):
        super().__init__(message)
        self.minor = minor


class NumericalError(ArithmeticError):
    """A non-finite objective or gradient turned up during optimisation."""

    def __init__(self, message: str, point):
        super().__init__(message)
        self.point = np.array(point, dtype=float, copy=True)
