import math

import pytest
import numpy as np
import sys
import os

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from analysis.tables import FILLING_TABLE, NONLOCAL_TABLE, table_cases
from core import config
from core.errors import DomainError
from perforation.model import BeamCase, effective_coefficients
from polynomials.chebyshev import MappedChebyshevBasis
from statics.solver import (ProfileKind, StaticProblem, closed_form_static, forcing, initial_weights, loss,
                            loss_gradient, residual, sample_grid, solve, solve_static, static_deflection,
                            whitening)

TABLE_ROWS = [tuple(row) for row in FILLING_TABLE.itertuples(index=False)] + \
             [tuple(row) for row in NONLOCAL_TABLE.itertuples(index=False)]


@pytest.fixture
def reference_case():
    return BeamCase(0.5, 2, 0.2)


@pytest.fixture
def reference_problem(reference_case):
    return StaticProblem(reference_case)


def test_forcing_amplitude(reference_case):
    p1 = effective_coefficients(reference_case).p1
    assert forcing(reference_case, 0.5) == pytest.approx((1 + 0.04 * math.pi ** 2) / p1)
    assert forcing(reference_case, 0.0) == pytest.approx(0.0, abs=1e-15)


def test_default_problem_settings(reference_problem):
    assert reference_problem.basis == MappedChebyshevBasis(14)
    assert reference_problem.points.shape == (100,)
    assert reference_problem.system[0].shape == (100, 15)


def test_inert_weights_are_the_cubic_block(reference_problem):
    np.testing.assert_array_equal(reference_problem.active_columns, np.arange(4, 15))


@pytest.mark.parametrize("case", table_cases()[:6], ids=lambda c: c.label())
def test_direct_residual_target(case):
    problem = StaticProblem(case)
    weights, report = solve(problem, 'direct')
    assert report.mean_square_residual <= config.RESIDUAL_TARGET
    assert loss(problem, weights) == pytest.approx(report.mean_square_residual)
    assert np.max(np.abs(residual(problem, weights, np.linspace(0, 1, 37)))) < 1e-4


@pytest.mark.parametrize("alpha,n_holes,nonlocal_param,x,expected,dynamic,ratio", TABLE_ROWS)
def test_published_static_cells(alpha, n_holes, nonlocal_param, x, expected, dynamic, ratio):
    profile, _ = solve_static(BeamCase(alpha, int(n_holes), nonlocal_param), samples=[x])
    assert profile.kind is ProfileKind.STATIC
    assert abs(profile.values[0] - expected) <= 1e-4


@pytest.mark.parametrize("case", table_cases(), ids=lambda c: c.label())
def test_matches_closed_form(case):
    samples = sample_grid()
    profile, _ = solve_static(case, samples)
    exact = closed_form_static(case, samples)
    assert np.max(np.abs(profile.values - exact.values)) <= 1e-5


def test_boundary_conditions_hold(reference_problem):
    weights, _ = solve(reference_problem)
    expression = reference_problem.expression.with_weights(weights)
    for x in (0.0, 1.0):
        assert abs(expression.evaluate(x)) < 1e-12
        assert abs(expression.evaluate(x, 2)) < 1e-10


def test_lbfgs_matches_direct(reference_problem):
    samples = sample_grid()
    direct_weights, _ = solve(reference_problem, 'direct')
    lbfgs_weights, report = solve(reference_problem, 'lbfgs', seed=0)
    direct = static_deflection(reference_problem, direct_weights, samples)
    trained = static_deflection(reference_problem, lbfgs_weights, samples)
    assert np.max(np.abs(direct.values - trained.values)) <= 1e-6
    assert report.optim is not None
    assert report.optim.iterations <= 5 * 50


def test_lbfgs_residual_target(reference_problem):
    weights, report = solve(reference_problem, 'lbfgs', seed=0)
    assert report.mean_square_residual <= config.RESIDUAL_TARGET
    np.testing.assert_array_equal(report.optim.x, weights)
    assert report.optim.fun == pytest.approx(report.mean_square_residual, abs=1e-15)


def test_whitened_loss_has_unit_hessian(reference_problem):
    design, _ = reference_problem.system
    active = design[:, reference_problem.active_columns]
    whitened = np.linalg.solve(whitening(reference_problem).T, active.T).T
    hessian = (2.0 / design.shape[0]) * whitened.T @ whitened
    np.testing.assert_allclose(hessian, np.eye(active.shape[1]), atol=1e-6)


def test_loss_gradient_matches_finite_difference(reference_problem):
    rng = np.random.default_rng(5)
    h = 1e-6
    for seed in rng.integers(0, 2 ** 31, size=10):
        weights = initial_weights(15, int(seed))
        grad = loss_gradient(reference_problem, weights)
        fd = np.empty(15)
        for j in range(15):
            step = np.zeros(15)
            step[j] = h
            fd[j] = (loss(reference_problem, weights + step) - loss(reference_problem, weights - step)) / (2 * h)
        np.testing.assert_allclose(grad, fd, rtol=1e-5, atol=1e-7 * np.max(np.abs(grad)))


def test_trained_deflection_decreases_with_filling_ratio():
    values = [solve_static(BeamCase(a, 1, 0.2), [0.5], method='lbfgs')[0].values[0] for a in (0.3, 0.5, 0.7)]
    assert values[0] > values[1] > values[2]


def test_chebyshev_collocation_grid(reference_case):
    samples = sample_grid()
    profile, _ = solve_static(reference_case, samples, grid='chebyshev')
    exact = closed_form_static(reference_case, samples)
    assert np.max(np.abs(profile.values - exact.values)) <= 1e-5


def test_profile_lookup(reference_case):
    profile, _ = solve_static(reference_case)
    assert profile.samples.size == 101
    assert profile.at(0.5) == pytest.approx(1.7139, abs=1e-4)
    with pytest.raises(DomainError):
        profile.at(0.505)


def test_deflection_decreases_with_filling_ratio():
    values = [closed_form_static(BeamCase(a, 1, 0.2), [0.5]).values[0] for a in (0.3, 0.5, 0.7)]
    assert values[0] > values[1] > values[2]


def test_deflection_increases_with_hole_count():
    values = [solve_static(BeamCase(0.5, n, 0.2), [0.5])[0].values[0] for n in (1, 2)]
    assert values[1] > values[0]


def test_deflection_increases_with_nonlocal_parameter():
    values = [solve_static(BeamCase(0.5, 1, nl), [0.5])[0].values[0] for nl in (0.1, 0.2, 0.3, 0.4)]
    assert all(b > a for a, b in zip(values, values[1:]))


def test_too_few_collocation_points(reference_case):
    with pytest.raises(DomainError):
        StaticProblem(reference_case, collocation_count=10)


def test_unknown_grid(reference_case):
    with pytest.raises(DomainError):
        StaticProblem(reference_case, grid='random')


def test_unknown_method(reference_problem):
    with pytest.raises(DomainError):
        solve(reference_problem, 'newton')
