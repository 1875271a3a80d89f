"""Files in and out: datasets, configs, reports, masks and ellipse outlines.

Every file is written to a temporary sibling first and renamed into
place, so a failed run never leaves a half-written artifact.
"""

import csv
import io
import json
import logging
import os
import tempfile

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Union

import numpy as np

from rps.core.errors import ParameterError, ShapeError
from rps.models.dataset import RegressionDataset
from rps.models.ellipsoid import Ellipsoid
from rps.schemas.experiment import ExperimentConfig
from rps.schemas.report import ExperimentReport, StateSnapshot
from rps.services.eoa import ellipse_area, ellipse_boundary

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]
SUMMARY_FIELDS = ["method", "n", "trials", "coverage", "stderr", "mean_area", "area_stderr"]
INDICATOR_METHODS = ("rps", "sps")


def atomic_write(path: PathLike, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    logger.debug("wrote %s", path)
    return path


def load_config(path: PathLike) -> ExperimentConfig:
    """Flat TOML experiment config"""
    try:
        with open(path, "rb") as handle:
            data = tomllib.load(handle)
    except tomllib.TOMLDecodeError as exc:
        raise ParameterError(f"cannot parse config {path}: {exc}") from exc
    return ExperimentConfig.model_validate(data)


def dataset_to_csv(dataset: RegressionDataset) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["t", "y"] + [f"phi_{k + 1}" for k in range(dataset.d)])
    for t in range(dataset.n):
        writer.writerow([t + 1, repr(float(dataset.y[t]))] + [repr(float(v)) for v in dataset.phi[t]])
    return buffer.getvalue()


def write_dataset(dataset: RegressionDataset, path: PathLike) -> Path:
    return atomic_write(path, dataset_to_csv(dataset))


def read_dataset(path: PathLike) -> RegressionDataset:
    with open(path, newline="", encoding="utf-8") as handle:
        rows = list(csv.reader(handle))
    if not rows or rows[0][:2] != ["t", "y"] or len(rows[0]) < 3:
        raise ShapeError(f"{path}: expected header t,y,phi_1,...,phi_d")
    width = len(rows[0])
    records = []
    # line 1 is the header
    for line, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != width:
            raise ShapeError(f"{path}: line {line} has {len(row)} fields, header has {width}")
        try:
            records.append([float(v) for v in row])
        except ValueError as exc:
            raise ParameterError(f"{path}: line {line} is not numeric ({exc})") from exc
    if not records:
        raise ShapeError(f"{path}: no data rows")
    body = np.array(records)
    return RegressionDataset(phi=body[:, 2:], y=body[:, 1])


def dataset_to_json(dataset: RegressionDataset) -> str:
    return json.dumps({"y": dataset.y.tolist(), "phi": dataset.phi.tolist()}, indent=2)


def mask_to_csv(cells) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    array = np.asarray(cells, dtype=int)
    writer.writerows(array.reshape(array.shape[0], -1).tolist())
    return buffer.getvalue()


def ellipse_to_csv(e: Ellipsoid, k: int = 200) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["theta_1", "theta_2"])
    writer.writerows([[repr(float(a)), repr(float(b))] for a, b in ellipse_boundary(e, k)])
    return buffer.getvalue()


def ellipsoid_to_json(e: Ellipsoid) -> str:
    payload = {"center": e.center.tolist(), "shape": e.shape.tolist(), "radius": e.radius}
    if e.d == 2:
        payload["area"] = ellipse_area(e)
    return json.dumps(payload, indent=2)


def summary_csv(report: ExperimentReport) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=SUMMARY_FIELDS, lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    for row in report.summaries:
        writer.writerow({k: ("" if v is None else v) for k, v in row.model_dump().items()})
    return buffer.getvalue()


def report_to_json(report: ExperimentReport) -> str:
    return report.model_dump_json(indent=2)


def snapshot_to_json(snap: StateSnapshot) -> str:
    return snap.model_dump_json(indent=2)


def write_report(report: ExperimentReport, out_dir: PathLike) -> list[Path]:
    """report.json, summary.csv, one CSV per indicator mask and one outline per bounded ellipse"""
    out_dir = Path(out_dir)
    written = [
        atomic_write(out_dir / "report.json", report_to_json(report)),
        atomic_write(out_dir / "summary.csv", summary_csv(report)),
    ]
    for mask in report.masks:
        if mask.method in INDICATOR_METHODS:
            written.append(atomic_write(out_dir / f"mask_{mask.method}_n{mask.n}.csv", mask_to_csv(mask.cells)))
    for record in report.ellipsoids:
        e = Ellipsoid(center=record.center, shape=record.shape, radius=record.radius)
        if e.bounded and e.d == 2 and e.radius > 0:
            written.append(atomic_write(out_dir / f"ellipse_{record.method}_n{record.n}.csv", ellipse_to_csv(e)))
    logger.info("wrote %d files to %s", len(written), out_dir)
    return written
