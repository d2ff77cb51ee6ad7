import pytest
import numpy as np
import sys
import os

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from analysis.ratio import ratio_profile
from analysis.sweep import alpha_family, grid_cases, holes_family, nonlocal_family, sweep, sweep_frame
from analysis.tables import FILLING_TABLE, NONLOCAL_TABLE, table_cases, validate_tables
from core.errors import UsageError
from dynamics.galerkin import solve_dynamic
from perforation.model import BeamCase
from statics.solver import DeflectionProfile, ProfileKind, sample_grid, solve_static


@pytest.fixture
def samples():
    return sample_grid()


@pytest.fixture
def sine_profiles(samples):
    shape = np.sin(np.pi * samples)
    return (DeflectionProfile(samples, 2.0 * shape, ProfileKind.STATIC),
            DeflectionProfile(samples, 100.0 * shape, ProfileKind.DYNAMIC))


def test_proportional_profiles_are_constant(sine_profiles):
    report = ratio_profile(*sine_profiles)
    assert report.mean_ratio == pytest.approx(50.0)
    assert report.relative_spread <= 1e-14
    assert report.constant


def test_supports_are_excluded(sine_profiles):
    report = ratio_profile(*sine_profiles)
    assert report.samples.size == 99
    assert report.samples.min() > 0.0 and report.samples.max() < 1.0


def test_perturbed_dynamic_profile_is_not_constant(sine_profiles, samples):
    static, dynamic = sine_profiles
    perturbed = DeflectionProfile(samples, dynamic.values + 0.01 * np.sin(2 * np.pi * samples),
                                  ProfileKind.DYNAMIC)
    assert not ratio_profile(static, perturbed, 1e-5).constant


def test_scaling_changes_mean_not_verdict(sine_profiles, samples):
    static, dynamic = sine_profiles
    scaled = DeflectionProfile(samples, 3.0 * dynamic.values, ProfileKind.DYNAMIC)
    base, tripled = ratio_profile(static, dynamic), ratio_profile(static, scaled)
    assert tripled.mean_ratio == pytest.approx(3.0 * base.mean_ratio)
    assert tripled.constant == base.constant


def test_mismatched_grids(sine_profiles):
    static, _ = sine_profiles
    other = DeflectionProfile(np.linspace(0, 1, 51), np.ones(51), ProfileKind.DYNAMIC)
    with pytest.raises(UsageError):
        ratio_profile(static, other)


def test_profiles_passed_in_wrong_order(sine_profiles):
    static, dynamic = sine_profiles
    with pytest.raises(UsageError):
        ratio_profile(dynamic, static)


def test_ratio_report_keys(sine_profiles):
    assert list(ratio_profile(*sine_profiles).to_dict()) == ['mean_ratio', 'relative_spread', 'constant']


@pytest.mark.parametrize("case", table_cases(), ids=lambda c: c.label())
def test_solver_ratio_is_constant(case, samples):
    static, _ = solve_static(case, samples)
    dynamic, _ = solve_dynamic(case, samples)
    report = ratio_profile(static, dynamic, 1e-5)
    assert report.constant
    window = (report.samples >= 0.05) & (report.samples <= 0.95)
    ratios = report.ratios[window]
    assert (ratios.max() - ratios.min()) / ratios.mean() <= 1e-5


def test_table_parameter_sets():
    cases = table_cases()
    assert len(cases) == 9
    assert len({(c.alpha, c.n_holes, c.nonlocal_param) for c in cases}) == 9
    assert len(FILLING_TABLE) == 18
    assert len(NONLOCAL_TABLE) == 12


def test_filling_ratio_sweep():
    records = sweep(grid_cases([0.3, 0.5, 0.7], [1], [0.2]), stations=[0.5])
    assert [r.case.alpha for r in records] == [0.3, 0.5, 0.7]
    np.testing.assert_allclose([r.static[0] for r in records], [1.6729, 1.4732, 1.4359], atol=1e-4)
    assert all(r.ok and r.frequency > 0 for r in records)


def test_hole_count_sweep():
    records = sweep(grid_cases([0.5], [1, 2], [0.2]), stations=[0.3])
    np.testing.assert_allclose([r.static[0] for r in records], [1.1918, 1.3866], atol=1e-4)


def test_nonlocal_sweep():
    records = sweep([BeamCase(0.5, 1, 0.1)], stations=[0.6])
    assert records[0].static[0] == pytest.approx(1.1037, abs=1e-4)


def test_parallel_sweep_keeps_order_and_values():
    cases = grid_cases([0.3, 0.5, 0.7], [1, 2], [0.2])
    serial = sweep(cases, stations=[0.5])
    threaded = sweep(cases, stations=[0.5], n_jobs=3)
    assert [r.case for r in threaded] == cases
    assert [r.static for r in serial] == [r.static for r in threaded]
    assert [r.frequency for r in serial] == [r.frequency for r in threaded]


def test_failing_case_does_not_abort_sweep():
    cases = [BeamCase(0.5, 1, 0.2), BeamCase(0.5, 1, 1.5), BeamCase(0.5, 2, 0.2)]
    records = sweep(cases, stations=[0.5])
    assert [r.ok for r in records] == [True, False, True]
    assert 'DomainError' in records[1].error


def test_sweep_frame_columns():
    records = sweep([BeamCase(0.5, 1, 0.2), BeamCase(0.5, 1, 1.5)], stations=[0.3, 0.5])
    frame = sweep_frame(records)
    assert list(frame.columns) == ['alpha', 'n_holes', 'nonlocal', 'slenderness', 'regime', 'W_static(0.3)',
                                   'W_static(0.5)', 'W_dynamic(0.3)', 'W_dynamic(0.5)', 'lambda',
                                   'mean_ratio', 'error']
    assert list(frame['regime']) == ['perforated', 'perforated']
    assert frame.loc[0, 'error'] == ''
    assert np.isnan(frame.loc[1, 'W_static(0.5)'])


def test_parameter_families():
    assert all(c.n_holes == 1 and c.nonlocal_param == 0.1 for c in alpha_family())
    assert [c.n_holes for c in holes_family()] == [1, 2, 3, 4, 5]
    assert [c.nonlocal_param for c in nonlocal_family()] == [0.0, 0.1, 0.2, 0.3, 0.4]
    assert all(c.alpha == 0.8 and c.n_holes == 2 for c in nonlocal_family())


@pytest.fixture(scope='module')
def validation_report():
    return validate_tables()


def test_validation_passes(validation_report):
    assert validation_report.passed, validation_report.to_frame().loc[lambda f: ~f['passed']]


def test_validation_lists_every_static_cell(validation_report):
    frame = validation_report.to_frame()
    assert (frame['check'] == 'filling static').sum() == 18
    assert (frame['check'] == 'nonlocal static').sum() == 12
    assert (frame['check'] == 'filling dynamic shape').sum() == 12
    assert (frame['check'] == 'nonlocal dynamic shape').sum() == 8
    assert frame['check'].str.startswith('convergence').sum() == 18


def test_published_ratio_constants_are_informational(validation_report):
    frame = validation_report.to_frame()
    published = frame[frame['check'] == 'ratio constant (published)']
    assert len(published) == 10
    assert published['tolerance'].isna().all()
    assert published['passed'].all()
