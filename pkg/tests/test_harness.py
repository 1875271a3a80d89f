import math

import numpy as np
import pytest
from scipy import stats

from rps.core import random
from rps.core.errors import ParameterError, RpsError
from rps.models.ellipsoid import Ellipsoid
from rps.schemas.experiment import Baseline, ExperimentConfig, GridSpec, ShapingKind
from rps.services import harness
from rps.services.asymptotic import least_squares
from rps.services.eoa import ellipse_area
from rps.services.io import report_to_json
from rps.services.region import indicator


def study(config: ExperimentConfig, **update):
    return harness.coverage_study(config.model_copy(update=update) if update else config)


def assert_coverage(report, method, n, p, tolerance):
    row = report.summary(method, n)
    assert row.failed == 0
    assert abs(row.coverage - p) <= tolerance, row


@pytest.mark.parametrize(
    "noise",
    [
        dict(noise="gaussian", noise_variance=1.0),
        dict(noise="laplace", noise_variance=1.0),
        dict(noise="exponential", noise_rate=0.5),
    ],
    ids=["gaussian", "laplace", "exponential"],
)
def test_coverage_is_exact_for_any_noise(noise):
    config = ExperimentConfig(n_list=[25], m=10, q=1, trials=2000, seed=101, **noise)
    report = harness.coverage_study(config)
    # 4 binomial standard deviations at 2000 trials
    assert_coverage(report, "rps", 25, 0.9, 0.027)
    assert sum(report.rank_counts["rps@n=25"]) == 2000


@pytest.mark.slow
@pytest.mark.parametrize(
    "noise",
    [
        dict(noise="gaussian", noise_variance=1.0),
        dict(noise="laplace", noise_variance=1.0),
        dict(noise="exponential", noise_rate=0.5),
    ],
    ids=["gaussian", "laplace", "exponential"],
)
def test_coverage_acceptance(noise):
    config = ExperimentConfig(n_list=[25], m=10, q=1, trials=10_000, seed=2024, **noise)
    report = harness.coverage_study(config, n_jobs=4)
    assert_coverage(report, "rps", 25, 0.9, 0.009)
    counts = report.rank_counts["rps@n=25"]
    assert stats.chisquare(counts).pvalue > 0.01


def test_rank_distribution_is_uniform():
    config = ExperimentConfig(noise="exponential", noise_rate=0.5, n_list=[25], trials=3000, seed=55)
    counts = harness.coverage_study(config).rank_counts["rps@n=25"]
    assert len(counts) == 10
    assert stats.chisquare(counts).pvalue > 0.001


def test_complementary_level(small_experiment):
    report = study(small_experiment, q=9, trials=2000)
    assert_coverage(report, "rps", 25, 0.1, 0.027)


def test_single_trial_coverage(small_experiment):
    row = study(small_experiment, trials=1).summary("rps", 25)
    assert row.coverage in (0.0, 1.0)
    assert row.trials == 1


def assert_false_parameter_is_excluded(trials: int, seed: int):
    config = ExperimentConfig(n_list=[200, 1000, 2000], trials=trials, seed=seed)
    report = harness.coverage_study(config, theta=np.array([6.0, 1.0]))
    exclusion = [1.0 - report.summary("rps", n).coverage for n in config.n_list]
    sigma = math.sqrt(0.25 / config.trials)
    for smaller, larger in zip(exclusion, exclusion[1:]):
        assert larger >= smaller - 3 * sigma
    assert exclusion[-1] > 0.99


def test_false_parameter_is_excluded_more_often_as_n_grows():
    assert_false_parameter_is_excluded(trials=200, seed=9)


@pytest.mark.slow
def test_false_parameter_exclusion_acceptance():
    assert_false_parameter_is_excluded(trials=1000, seed=9)


def test_eoa_coverage_inherits_level(small_experiment):
    report = study(small_experiment, trials=1000, baselines=[Baseline.EOA])
    row = report.summary("rps-eoa", 25)
    assert row.coverage >= 0.9 - 3 * math.sqrt(0.09 / 1000)
    assert row.coverage >= report.summary("rps", 25).coverage


@pytest.mark.slow
def test_eoa_coverage_acceptance():
    config = ExperimentConfig(n_list=[25], trials=10_000, seed=77, baselines=[Baseline.EOA])
    row = harness.coverage_study(config, n_jobs=4).summary("rps-eoa", 25)
    assert row.coverage >= 0.891


def test_sign_coregressor_keeps_coverage_under_heteroscedastic_noise():
    config = ExperimentConfig(
        system="heteroscedastic",
        theta_star=[1.0, -1.0],
        n_list=[40],
        coregressor="sign",
        shaping="identity",
        trials=1000,
        seed=31,
    )
    assert_coverage(harness.coverage_study(config), "rps", 40, 0.9, 0.03)


def test_failed_trials_are_counted_separately(small_experiment):
    config = small_experiment.model_copy(update={"shaping": ShapingKind.USER, "shaping_matrix": [[1.0, 0.0], [0.0, 0.0]]})
    row = harness.coverage_study(config).summary("rps", 25)
    assert row.failed == row.trials == 50
    assert row.coverage is None


def test_studies_are_reproducible(small_experiment):
    config = small_experiment.model_copy(update={"baselines": [Baseline.SPS, Baseline.ASYMPTOTIC]})
    first = harness.run_study(config, with_areas=True, keep_masks=True)
    second = harness.run_study(config, with_areas=True, keep_masks=True, n_jobs=3)
    assert report_to_json(first) == report_to_json(second)


def test_area_study_orders_region_inside_its_ellipsoid(small_experiment):
    config = small_experiment.model_copy(
        update={"trials": 3, "baselines": [Baseline.SPS, Baseline.EOA, Baseline.ASYMPTOTIC]}
    )
    report = harness.run_study(config, with_areas=True, keep_masks=True)
    assert {m.method for m in report.masks} == {"rps", "sps", "rps-eoa", "sps-eoa", "asymptotic"}
    masks = {m.method: np.array(m.cells, dtype=bool) for m in report.masks}
    assert not (masks["rps"] & ~masks["rps-eoa"]).any()
    assert not (masks["sps"] & ~masks["sps-eoa"]).any()
    for method in ("rps", "sps", "asymptotic"):
        assert len(report.areas[f"{method}@n=25"]) == 3


def test_grid_nodes_are_cell_centres():
    grid = GridSpec(bounds=[(0.0, 1.0), (-2.0, 2.0)], resolution=2)
    np.testing.assert_allclose(grid.axes()[0], [0.25, 0.75])
    np.testing.assert_allclose(grid.axes()[1], [-1.0, 1.0])
    assert grid.nodes().shape == (4, 2)
    assert grid.cell_area == pytest.approx(1.0)


def test_grid_validation():
    with pytest.raises(ValueError):
        GridSpec(bounds=[(1.0, 0.0)], resolution=10)
    with pytest.raises(ValueError):
        GridSpec(bounds=[(0.0, 1.0)], resolution=1)


def test_grid_region_evaluates_every_node(state):
    grid = GridSpec(bounds=[(4.0, 6.0), (0.0, 2.0)], resolution=2)
    mask = harness.grid_region(state, grid)
    assert mask.shape == (2, 2)
    expected = [indicator(node, state) for node in grid.nodes()]
    np.testing.assert_array_equal(mask.ravel().astype(int), expected)


def test_grid_region_contains_estimate(state, dataset):
    grid = harness.default_grid(dataset, 41)
    mask = harness.grid_region(state, grid)
    center = np.unravel_index(np.argmin(np.linalg.norm(grid.nodes() - least_squares(dataset), axis=1)), grid.shape)
    assert mask[center]


def test_touches_edge():
    mask = np.zeros((5, 5), dtype=bool)
    mask[2, 2] = True
    assert not harness.touches_edge(mask)
    mask[0, 3] = True
    assert harness.touches_edge(mask)


def test_grid_dimension_is_checked(state):
    with pytest.raises(RpsError):
        harness.grid_region(state, GridSpec(bounds=[(0.0, 1.0)], resolution=4))


def test_region_area_cases():
    unit = GridSpec(bounds=[(0.0, 1.0), (0.0, 1.0)], resolution=50)
    assert harness.region_area(np.zeros(unit.shape, dtype=bool), unit) == 0.0
    assert harness.region_area(np.ones(unit.shape, dtype=bool), unit) == pytest.approx(1.0)

    square = GridSpec(bounds=[(-1.5, 1.5), (-1.5, 1.5)], resolution=400)
    disk = (np.linalg.norm(square.nodes(), axis=1) <= 1.0).reshape(square.shape)
    assert harness.region_area(disk, square) == pytest.approx(math.pi, rel=0.02)

    with pytest.raises(RpsError):
        harness.region_area(np.zeros((3, 3), dtype=bool), unit)


def test_area_converges_with_resolution(state, dataset):
    coarse = harness.default_grid(dataset, 100)
    fine = harness.default_grid(dataset, 200)
    a = harness.region_area(harness.grid_region(state, coarse), coarse)
    b = harness.region_area(harness.grid_region(state, fine), fine)
    assert b == pytest.approx(a, rel=0.05)


def test_default_grid_is_centred_on_estimate(dataset):
    grid = harness.default_grid(dataset, 10)
    centre = np.array([(lo + hi) / 2.0 for lo, hi in grid.bounds])
    np.testing.assert_allclose(centre, least_squares(dataset))


def test_active_methods(small_experiment):
    config = small_experiment.model_copy(update={"baselines": [Baseline.EOA, Baseline.SPS]})
    assert harness.active_methods(config) == ["rps", "sps", "rps-eoa", "sps-eoa"]
    assert harness.active_methods(small_experiment) == ["rps"]


def test_derived_seeds_do_not_depend_on_order(small_experiment):
    single = harness.run_trial(small_experiment, 25, 7)
    again = harness.run_trial(small_experiment, 25, 7)
    assert single.outcomes["rps"] == again.outcomes["rps"]
    assert harness.run_trial(small_experiment, 25, 8).outcomes["rps"] is not None


def test_negative_seeds_are_rejected():
    with pytest.raises(ParameterError):
        random.derive_seed(-1, 25, 0)
    with pytest.raises(ParameterError):
        random.stream([3, -4], random.NOISE)


def test_reports_flag_regions_that_reach_the_grid_border(small_experiment):
    # a grid much narrower than the region: every cell is inside
    narrow = small_experiment.model_copy(update={"trials": 2, "grid_halfwidth_sd": 0.01})
    report = harness.run_study(narrow, with_areas=True, keep_masks=True)
    assert report.summary("rps", 25).truncated == 2
    assert all(mask.truncated for mask in report.masks)

    wide = small_experiment.model_copy(update={"trials": 2, "grid_halfwidth_sd": 50.0, "grid_resolution": 60})
    report = harness.run_study(wide, with_areas=True, keep_masks=True)
    assert report.summary("rps", 25).truncated == 0
    assert not any(mask.truncated for mask in report.masks)


def test_ellipsoid_records_carry_the_closed_form_area(small_experiment):
    config = small_experiment.model_copy(
        update={"trials": 1, "grid_resolution": 200, "baselines": [Baseline.EOA, Baseline.ASYMPTOTIC]}
    )
    report = harness.run_study(config, with_areas=True, keep_masks=True)
    records = {record.method: record for record in report.ellipsoids}
    assert set(records) == {"rps-eoa", "asymptotic"}
    for method, record in records.items():
        e = Ellipsoid(center=record.center, shape=record.shape, radius=record.radius)
        assert record.area == pytest.approx(ellipse_area(e))
        if e.bounded and not any(m.truncated for m in report.masks if m.method == method):
            # grid-count area converges to the closed form
            assert report.areas[f"{method}@n=25"][0] == pytest.approx(record.area, rel=0.05)
