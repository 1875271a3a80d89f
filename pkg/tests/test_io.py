import json
import math

import numpy as np
import pytest

from rps.core.errors import ParameterError, ShapeError
from rps.models.ellipsoid import Ellipsoid
from rps.schemas.experiment import Baseline
from rps.services import io
from rps.services.harness import run_study


def test_dataset_csv_round_trip(tmp_path, dataset):
    path = io.write_dataset(dataset, tmp_path / "data.csv")
    assert path.read_text().splitlines()[0] == "t,y,phi_1,phi_2"
    assert io.read_dataset(path) == dataset


def test_read_dataset_checks_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b,c\n1,2,3\n")
    with pytest.raises(ShapeError):
        io.read_dataset(path)


def test_read_dataset_names_the_bad_line(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("t,y,phi_1,phi_2\n1,0.3,0.5,0.2\n2,abc,0.5,0.2\n")
    with pytest.raises(ParameterError, match="line 3"):
        io.read_dataset(path)
    path.write_text("t,y,phi_1,phi_2\n1,0.3,0.5\n")
    with pytest.raises(ShapeError, match="line 2 has 3 fields"):
        io.read_dataset(path)
    path.write_text("t,y,phi_1,phi_2\n")
    with pytest.raises(ShapeError, match="no data rows"):
        io.read_dataset(path)


def test_read_dataset_skips_blank_lines(tmp_path):
    path = tmp_path / "data.csv"
    path.write_text("t,y,phi_1,phi_2\n1,0.3,0.5,0.2\n\n2,0.1,0.4,0.5\n")
    dataset = io.read_dataset(path)
    assert dataset.n == 2
    np.testing.assert_array_equal(dataset.y, [0.3, 0.1])


def test_atomic_write_leaves_only_the_target(tmp_path):
    io.atomic_write(tmp_path / "nested" / "out.txt", "hello")
    assert [p.name for p in (tmp_path / "nested").iterdir()] == ["out.txt"]
    assert (tmp_path / "nested" / "out.txt").read_text() == "hello"


def test_load_config(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text('name = "x"\nnoise = "gaussian"\nn_list = [30]\nm = 20\nq = 2\nseed = 4\n')
    config = io.load_config(path)
    assert (config.name, config.m, config.q, config.p) == ("x", 20, 2, 0.9)

    path.write_text("name = ")
    with pytest.raises(ParameterError):
        io.load_config(path)


def test_load_config_rejects_unknown_keys(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text("colour = 3\n")
    with pytest.raises(ValueError):
        io.load_config(path)


def test_ellipsoid_json_keeps_infinite_radius():
    e = Ellipsoid(center=[1.0, 2.0], shape=np.eye(2), radius=math.inf)
    payload = json.loads(io.ellipsoid_to_json(e))
    assert payload["radius"] == math.inf
    assert payload["shape"] == [[1.0, 0.0], [0.0, 1.0]]


def test_ellipse_csv_has_header_and_points():
    e = Ellipsoid(center=[0.0, 0.0], shape=np.eye(2), radius=1.0)
    lines = io.ellipse_to_csv(e, 10).splitlines()
    assert lines[0] == "theta_1,theta_2"
    assert len(lines) == 11


def test_write_report_files(tmp_path, small_experiment):
    config = small_experiment.model_copy(
        update={"n_list": [25, 40], "trials": 2, "baselines": [Baseline.ASYMPTOTIC, Baseline.EOA]}
    )
    report = run_study(config, with_areas=True, keep_masks=True)
    written = io.write_report(report, tmp_path)
    names = sorted(p.name for p in tmp_path.iterdir())
    assert sorted(p.name for p in written) == names
    assert "report.json" in names and "summary.csv" in names
    assert sorted(n for n in names if n.startswith("mask_")) == ["mask_rps_n25.csv", "mask_rps_n40.csv"]

    summary = (tmp_path / "summary.csv").read_text().splitlines()
    assert summary[0] == "method,n,trials,coverage,stderr,mean_area,area_stderr"
    assert len(summary) == 1 + 3 * 2

    mask = np.loadtxt(tmp_path / "mask_rps_n25.csv", delimiter=",")
    assert mask.shape == (30, 30)
