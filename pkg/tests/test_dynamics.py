import math

import pytest
import numpy as np
import sys
import os

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from analysis.tables import table_cases
from core.errors import DomainError
from dynamics.galerkin import (GalerkinBasis, assemble, convergence_table, dynamic_deflection, lambda_oracle,
                               solve_dynamic, solve_fundamental)
from numerics.linalg import generalized_sym_eig
from perforation.model import BeamCase, effective_coefficients
from statics.solver import ProfileKind, sample_grid


@pytest.fixture
def reference_case():
    return BeamCase(0.5, 2, 0.2, 0.1)


def test_trial_functions_vanish_at_supports():
    values = GalerkinBasis(14).eval_functions(np.array([0.0, 1.0]))
    assert np.all(values == 0.0)


@pytest.mark.parametrize("kind", ['polynomial', 'sine'])
def test_scalar_point_gives_flat_row(kind):
    basis = GalerkinBasis(6, kind)
    for order in range(3):
        assert basis.eval_functions(0.4, order).shape == (6,)
    assert np.ndim(basis.evaluate(np.ones(6), 0.4)) == 0


def test_trial_function_coefficients():
    coefficients = GalerkinBasis(2).coefficient_matrix
    np.testing.assert_array_equal(coefficients, [[0, 1, -1, 0], [0, 0, 1, -1]])


def test_single_function_matrices(reference_case):
    coeffs = effective_coefficients(reference_case)
    r2 = reference_case.rotary_group
    system = assemble(reference_case, GalerkinBasis(1))
    assert system.stiffness[0, 0] == pytest.approx(4 * coeffs.p1, rel=1e-14)
    assert system.mass[0, 0] == pytest.approx(0.96 * (coeffs.p2 / 30 + coeffs.p3 * r2 / 3), rel=1e-14)


def test_single_function_frequency(reference_case):
    coeffs = effective_coefficients(reference_case)
    r2 = reference_case.rotary_group
    mode = solve_fundamental(assemble(reference_case, GalerkinBasis(1)))
    expected = 4 * coeffs.p1 / (0.96 * (coeffs.p2 / 30 + coeffs.p3 * r2 / 3))
    assert mode.eigenvalue == pytest.approx(expected, rel=1e-12)


def test_matrices_are_symmetric(reference_case):
    system = assemble(reference_case)
    assert np.array_equal(system.stiffness, system.stiffness.T)
    assert np.array_equal(system.mass, system.mass.T)


def test_reduced_pencil_is_equivalent(reference_case):
    system = assemble(reference_case, GalerkinBasis(4))
    t = system.transform
    np.testing.assert_allclose(t.T @ system.stiffness @ t, system.reduced_stiffness, atol=1e-9)
    np.testing.assert_allclose(t.T @ system.mass @ t, system.reduced_mass, atol=1e-11)


def test_eigenvectors_are_mass_orthonormal(reference_case):
    system = assemble(reference_case)
    _, vectors = generalized_sym_eig(system.reduced_mass, system.reduced_stiffness)
    gram = vectors.T @ system.reduced_stiffness @ vectors
    np.testing.assert_allclose(gram, np.eye(gram.shape[0]), atol=1e-8)


@pytest.mark.parametrize("case", table_cases(), ids=lambda c: c.label())
def test_frequency_matches_sine_substitution(case):
    mode = solve_fundamental(assemble(case, GalerkinBasis(14)))
    assert mode.frequency > 0
    assert mode.frequency == pytest.approx(lambda_oracle(case), rel=1e-8)


def test_frequency_decreases_with_basis_size(reference_case):
    eigenvalues = [solve_fundamental(assemble(reference_case, GalerkinBasis(n))).eigenvalue
                   for n in range(1, 16)]
    for coarse, fine in zip(eigenvalues, eigenvalues[1:]):
        assert fine <= coarse * (1 + 1e-12)
    assert eigenvalues[-1] >= lambda_oracle(reference_case) ** 2 * (1 - 1e-8)


def test_oracle_classical_beam():
    case = BeamCase(1.0, 1, 0.0, slenderness=1e-6)
    assert lambda_oracle(case) ** 2 == pytest.approx(math.pi ** 4, rel=1e-9)


def test_oracle_without_rotary_inertia():
    case = BeamCase(0.5, 2, 0.2, slenderness=1e-6)
    assert lambda_oracle(case) ** 2 == pytest.approx(12.375 / 14.8125 * math.pi ** 4 / 0.768, rel=1e-9)
    assert lambda_oracle(case) ** 2 == pytest.approx(105.96, abs=0.01)


def test_oracle_increases_with_nonlocal_parameter():
    values = [lambda_oracle(BeamCase(0.5, 2, nl)) for nl in (0.0, 0.1, 0.2, 0.3, 0.4)]
    assert all(b > a for a, b in zip(values, values[1:]))


def test_printed_form_rejects_large_nonlocal_parameter():
    case = BeamCase(0.5, 2, 1.0)
    with pytest.raises(DomainError):
        assemble(case)
    with pytest.raises(DomainError):
        lambda_oracle(case)


def test_eringen_form(reference_case):
    mode = solve_fundamental(assemble(reference_case, inertia='eringen'))
    assert mode.frequency == pytest.approx(lambda_oracle(reference_case, 'eringen'), rel=1e-8)
    large = BeamCase(0.5, 2, 1.2)
    assert solve_fundamental(assemble(large, inertia='eringen')).frequency > 0


@pytest.mark.parametrize("inertia", ['printed', 'eringen'])
def test_sine_basis_is_exact_at_one_term(reference_case, inertia):
    mode = solve_fundamental(assemble(reference_case, GalerkinBasis(1, 'sine'), inertia))
    assert mode.frequency == pytest.approx(lambda_oracle(reference_case, inertia), rel=1e-12)


def test_unknown_inertia_model(reference_case):
    with pytest.raises(DomainError):
        assemble(reference_case, inertia='timoshenko')


@pytest.mark.parametrize("size,kind", [(0, 'polynomial'), (21, 'polynomial'), (4, 'legendre')])
def test_invalid_basis(size, kind):
    with pytest.raises(DomainError):
        GalerkinBasis(size, kind)


def test_unit_max_mode(reference_case):
    profile, mode = solve_dynamic(reference_case)
    assert profile.kind is ProfileKind.DYNAMIC
    assert mode.normalization == 'unit-max'
    assert profile.at(0.0) == 0.0
    assert abs(profile.at(1.0)) < 1e-10
    assert profile.at(0.5) == pytest.approx(100.0, abs=1e-6)
    assert np.max(np.abs(profile.values)) == pytest.approx(100.0, abs=1e-6)


def test_shape_ratio_filling_case():
    profile, _ = solve_dynamic(BeamCase(0.3, 1, 0.2), samples=[0.3, 0.5])
    assert profile.values[0] / profile.values[1] == pytest.approx(0.8090, abs=1e-4)


def test_shape_ratio_two_rows(reference_case):
    profile, _ = solve_dynamic(reference_case, samples=[0.5, 0.9])
    assert profile.values[1] / profile.values[0] == pytest.approx(0.3090, abs=1e-4)


@pytest.mark.parametrize("case", table_cases()[:6], ids=lambda c: c.label())
def test_mode_is_a_half_sine(case):
    samples = sample_grid()
    profile, _ = solve_dynamic(case, samples)
    assert np.max(np.abs(profile.values / 100.0 - np.sin(np.pi * samples))) <= 1e-6


def test_dynamic_deflection_uses_mode_basis(reference_case):
    basis = GalerkinBasis(10)
    mode = solve_fundamental(assemble(reference_case, basis))
    explicit = dynamic_deflection(mode, basis, [0.25])
    implicit = dynamic_deflection(mode, samples=[0.25])
    assert explicit.values[0] == implicit.values[0]


def test_convergence_table_is_stable(reference_case):
    table = convergence_table(reference_case, range(10, 16))
    assert table.index.name == 'n'
    assert list(table.index) == list(range(10, 16))
    stations = table.drop(columns='lambda')
    assert stations.shape == (6, 3)
    assert float((stations.max() - stations.min()).max()) <= 1e-4
