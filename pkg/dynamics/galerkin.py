"""
Fundamental vibration mode of the perforated nanobeam by the Galerkin
(Rayleigh-Ritz) method.

Governing equation as published, with r² = h_p² / (12 l_p²):

    (P1 W'')'' = lambda² (1 - a²) (P2 W - P3 r² W'')

Two integrations by parts give K c = lambda² M c with

    K_ij = P1 int phi_i'' phi_j''
    M_ij = (1 - a²) [P2 int phi_i phi_j + P3 r² int phi_i' phi_j']

Trial functions phi_k = X^k (1 - X) carry W = 0 at both ends; W'' = 0 is
natural in the weak form. Their Gram matrices are Hilbert-like, so they are
integrated in exact rational arithmetic and reduced exactly to a
stiffness-orthonormal basis before anything is rounded to floating point.
"""
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np
import pandas as pd
import sympy as sp
from numpy.polynomial import polynomial as poly
from scipy.optimize import minimize_scalar

from core import config
from core.errors import DomainError, NumericalError
from numerics.linalg import generalized_sym_eig
from perforation.model import BeamCase, effective_coefficients
from polynomials.chebyshev import check_unit_interval
from statics.solver import DeflectionProfile, ProfileKind, sample_grid

logger = logging.getLogger(__name__)

BASIS_KINDS = ('polynomial', 'sine')
INERTIA_MODELS = ('printed', 'eringen')
UNIT_MAX = 'unit-max'
PEAK_GRID = 401


class GalerkinBasis:
    """
    Trial functions for the simply supported beam.

    kind='polynomial': phi_k = X^k (1 - X), k = 1..size, stored as integer
    monomial coefficients. kind='sine': phi_k = sin(k pi X), the exact modes,
    kept as a cross-check that converges at size 1.
    """

    def __init__(self, size: int = config.GALERKIN_SIZE, kind: str = config.GALERKIN_KIND):
        if isinstance(size, bool) or int(size) != size or not 1 <= size <= config.GALERKIN_MAX_SIZE:
            raise DomainError(f"Galerkin size must be an integer in 1..{config.GALERKIN_MAX_SIZE}, got {size!r}")
        if kind not in BASIS_KINDS:
            raise DomainError(f"unknown Galerkin basis kind {kind!r} (expected one of {BASIS_KINDS})")
        self.size = int(size)
        self.kind = kind

    def __repr__(self) -> str:
        return f"GalerkinBasis(size={self.size}, kind={self.kind!r})"

    def __eq__(self, other) -> bool:
        return isinstance(other, GalerkinBasis) and (other.size, other.kind) == (self.size, self.kind)

    def __hash__(self) -> int:
        return hash(('GalerkinBasis', self.size, self.kind))

    @property
    def coefficient_matrix(self) -> np.ndarray:
        """Row k-1 holds the monomial coefficients of X^k - X^(k+1)."""
        if self.kind != 'polynomial':
            raise DomainError("only the polynomial basis has monomial coefficients")
        coefficients = np.zeros((self.size, self.size + 2), dtype=np.int64)
        for k in range(1, self.size + 1):
            coefficients[k - 1, k] = 1
            coefficients[k - 1, k + 1] = -1
        return coefficients

    def eval_functions(self, x, deriv_order: int = 0) -> np.ndarray:
        """phi_k^(d)(x) for every trial function; one row per point for array input."""
        if deriv_order not in (0, 1, 2):
            raise DomainError(f"trial functions are evaluated up to the second derivative, got {deriv_order!r}")
        x_arr = check_unit_interval(x)

        if self.kind == 'sine':
            wave = math.pi * np.arange(1, self.size + 1)
            phase = np.multiply.outer(x_arr, wave)
            if deriv_order == 0:
                return np.sin(phase)
            if deriv_order == 1:
                return wave * np.cos(phase)
            return -wave ** 2 * np.sin(phase)

        columns = poly.polyder(self.coefficient_matrix.T.astype(float), m=deriv_order, axis=0)
        rows = poly.polyvander(x_arr, columns.shape[0] - 1) @ columns
        return rows.reshape(x_arr.shape + (self.size,))

    def evaluate(self, coefficients, x, deriv_order: int = 0):
        return self.eval_functions(x, deriv_order) @ np.asarray(coefficients, dtype=float)


def _definite_integral(p: sp.Poly):
    antiderivative = p.integrate()
    return antiderivative.eval(1) - antiderivative.eval(0)


def _gram(functions) -> sp.Matrix:
    n = len(functions)
    return sp.Matrix(n, n, lambda i, j: _definite_integral(functions[i] * functions[j]))


def _to_float(matrix: sp.Matrix) -> np.ndarray:
    return np.array(matrix.tolist(), dtype=float)


def _symmetric(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.T)


@dataclass(frozen=True, eq=False)
class _Grams:
    """
    Reference integrals of a trial basis.

    `stiffness`, `mass`, `rotary` are int phi'' phi'', int phi phi and
    int phi' phi' in trial coordinates. The reduced_* versions are the same
    integrals for psi = phi @ transform, whose stiffness Gram is the identity.
    """
    stiffness: np.ndarray
    mass: np.ndarray
    rotary: np.ndarray
    transform: np.ndarray
    reduced_mass: np.ndarray
    reduced_rotary: np.ndarray

    def __post_init__(self):
        # Instances are shared through the per-size cache.
        for name in ('stiffness', 'mass', 'rotary', 'transform', 'reduced_mass', 'reduced_rotary'):
            getattr(self, name).setflags(write=False)


@lru_cache(maxsize=None)
def _polynomial_grams(size: int) -> _Grams:
    x = sp.Symbol('x')
    trial = [sp.Poly(x ** k - x ** (k + 1), x) for k in range(1, size + 1)]
    slope = [p.diff(x) for p in trial]
    curvature = [p.diff(x) for p in slope]
    stiffness, mass, rotary = _gram(curvature), _gram(trial), _gram(slope)

    # stiffness = L D L^T exactly; psi = phi L^-T D^-1/2 is stiffness-orthonormal.
    lower, diag = stiffness.LDLdecomposition()
    lower_inv = lower.lower_triangular_solve(sp.eye(size))
    scale = np.array([1.0 / math.sqrt(float(diag[i, i])) for i in range(size)])

    def reduce(gram: sp.Matrix) -> np.ndarray:
        exact = lower_inv * gram * lower_inv.T
        return _symmetric(scale[:, None] * _to_float(exact) * scale[None, :])

    logger.debug("exact Gram matrices assembled for polynomial basis of size %d", size)
    return _Grams(
        stiffness=_to_float(stiffness),
        mass=_to_float(mass),
        rotary=_to_float(rotary),
        transform=_to_float(lower_inv.T) * scale[None, :],
        reduced_mass=reduce(mass),
        reduced_rotary=reduce(rotary),
    )


@lru_cache(maxsize=None)
def _sine_grams(size: int) -> _Grams:
    wave = math.pi * np.arange(1, size + 1)
    stiffness = np.diag(wave ** 4 / 2.0)
    return _Grams(
        stiffness=stiffness,
        mass=np.diag(np.full(size, 0.5)),
        rotary=np.diag(wave ** 2 / 2.0),
        transform=np.diag(math.sqrt(2.0) / wave ** 2),
        reduced_mass=np.diag(1.0 / wave ** 4),
        reduced_rotary=np.diag(1.0 / wave ** 2),
    )


def _grams(basis: GalerkinBasis) -> _Grams:
    if basis.kind == 'sine':
        return _sine_grams(basis.size)
    return _polynomial_grams(basis.size)


@dataclass(frozen=True, eq=False)
class GalerkinSystem:
    """
    K c = lambda² M c in trial coordinates (`stiffness`, `mass`), together with
    the equivalent pencil in stiffness-orthonormal coordinates that the solver
    actually factors; c = transform @ v maps back.
    """
    case: BeamCase
    basis: GalerkinBasis
    inertia: str
    stiffness: np.ndarray
    mass: np.ndarray
    transform: np.ndarray
    reduced_stiffness: np.ndarray
    reduced_mass: np.ndarray


@dataclass(frozen=True, eq=False)
class ModeResult:
    frequency: float
    coefficients: np.ndarray
    basis: GalerkinBasis
    normalization: str = UNIT_MAX

    @property
    def eigenvalue(self) -> float:
        """lambda²."""
        return self.frequency ** 2


def _inertia(mass, rotary, stiffness, p2, p3, r2, a2, inertia):
    if inertia == 'printed':
        return (1.0 - a2) * (p2 * mass + p3 * r2 * rotary)
    # Conventional nonlocal form: (1 - a² d²/dX²) acting on the inertia terms.
    return p2 * (mass + a2 * rotary) + p3 * r2 * (rotary + a2 * stiffness)


def assemble(case: BeamCase, basis: GalerkinBasis = None, inertia: str = config.INERTIA_MODEL) -> GalerkinSystem:
    basis = basis or GalerkinBasis()
    if inertia not in INERTIA_MODELS:
        raise DomainError(f"unknown inertia model {inertia!r} (expected one of {INERTIA_MODELS})")
    a2 = case.nonlocal_param ** 2
    if inertia == 'printed' and a2 >= 1.0:
        raise DomainError(
            f"nonlocal parameter {case.nonlocal_param} >= 1 makes the mass matrix of the printed "
            "equation lose positive definiteness"
        )

    coeffs = effective_coefficients(case)
    r2 = case.rotary_group
    grams = _grams(basis)
    identity = np.eye(basis.size)

    stiffness = coeffs.p1 * grams.stiffness
    mass = _inertia(grams.mass, grams.rotary, grams.stiffness, coeffs.p2, coeffs.p3, r2, a2, inertia)
    reduced_mass = _inertia(grams.reduced_mass, grams.reduced_rotary, identity,
                            coeffs.p2, coeffs.p3, r2, a2, inertia)

    return GalerkinSystem(
        case=case,
        basis=basis,
        inertia=inertia,
        stiffness=stiffness,
        mass=mass,
        transform=grams.transform,
        reduced_stiffness=coeffs.p1 * identity,
        reduced_mass=_symmetric(reduced_mass),
    )


def _signed_peak(basis: GalerkinBasis, coefficients: np.ndarray) -> float:
    """Value of largest magnitude of the reconstructed mode on [0, 1]."""
    grid = np.linspace(0.0, 1.0, PEAK_GRID)
    values = basis.evaluate(coefficients, grid)
    i = int(np.argmax(np.abs(values)))
    sign = 1.0 if values[i] >= 0 else -1.0
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    refined = minimize_scalar(lambda x: -sign * basis.evaluate(coefficients, x),
                              bounds=(lo, hi), method='bounded', options={'xatol': 1e-12})
    return sign * max(abs(values[i]), -float(refined.fun))


def solve_fundamental(system: GalerkinSystem) -> ModeResult:
    """
    Smallest eigenpair of K c = lambda² M c.

    Solved as the dominant pair of the flexibility pencil M v = nu K v in
    stiffness-orthonormal coordinates (lambda² = 1 / nu), which keeps the
    fundamental pair accurate relative to itself.
    """
    values, vectors = generalized_sym_eig(system.reduced_mass, system.reduced_stiffness)
    nu = float(values[-1])
    if not nu > 0.0:
        raise NumericalError(f"flexibility pencil has no positive eigenvalue ({nu})", values)

    coefficients = system.transform @ vectors[:, -1]
    coefficients = coefficients / _signed_peak(system.basis, coefficients)
    frequency = math.sqrt(1.0 / nu)
    logger.info("fundamental mode for %s (n=%d, %s): lambda=%.10g",
                system.case.label(), system.basis.size, system.basis.kind, frequency)
    return ModeResult(frequency=frequency, coefficients=coefficients, basis=system.basis)


def lambda_oracle(case: BeamCase, inertia: str = config.INERTIA_MODEL) -> float:
    """Frequency parameter obtained by substituting W = sin(pi X)."""
    coeffs = effective_coefficients(case)
    a2 = case.nonlocal_param ** 2
    modal_inertia = coeffs.p2 + coeffs.p3 * case.rotary_group * math.pi ** 2
    if inertia == 'printed':
        if a2 >= 1.0:
            raise DomainError(f"nonlocal parameter must be < 1, got {case.nonlocal_param}")
        factor = 1.0 - a2
    elif inertia == 'eringen':
        factor = 1.0 + a2 * math.pi ** 2
    else:
        raise DomainError(f"unknown inertia model {inertia!r} (expected one of {INERTIA_MODELS})")
    return math.sqrt(coeffs.p1 * math.pi ** 4 / (factor * modal_inertia))


def dynamic_deflection(mode: ModeResult, basis: GalerkinBasis = None,
                       samples: Sequence[float] = None) -> DeflectionProfile:
    """Unit-max mode shape scaled by 100."""
    basis = basis or mode.basis
    samples = sample_grid() if samples is None else check_unit_interval(samples).reshape(-1)
    values = config.DEFLECTION_SCALE * basis.evaluate(mode.coefficients, samples)
    return DeflectionProfile(samples, values, ProfileKind.DYNAMIC)


def solve_dynamic(case: BeamCase, samples: Sequence[float] = None, size: int = config.GALERKIN_SIZE,
                  kind: str = config.GALERKIN_KIND, inertia: str = config.INERTIA_MODEL):
    basis = GalerkinBasis(size, kind)
    mode = solve_fundamental(assemble(case, basis, inertia))
    return dynamic_deflection(mode, basis, samples), mode


def convergence_table(case: BeamCase, sizes: Sequence[int] = range(8, 16),
                      stations: Sequence[float] = (0.3, 0.5, 0.9),
                      inertia: str = config.INERTIA_MODEL) -> pd.DataFrame:
    """Unit-max x100 mode values at the stations for each basis size."""
    rows = {}
    for n in sizes:
        profile, mode = solve_dynamic(case, stations, size=n, inertia=inertia)
        rows[n] = dict(zip((f"W_dynamic({p:g})" for p in stations), profile.values), **{'lambda': mode.frequency})
    table = pd.DataFrame.from_dict(rows, orient='index')
    table.index.name = 'n'
    return table
