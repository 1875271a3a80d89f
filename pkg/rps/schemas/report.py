from typing import Optional

from pydantic import BaseModel, ConfigDict, Field


class MethodSummary(BaseModel):
    """One row of the CSV summary"""

    method: str
    n: int
    trials: int
    covered: int = 0
    failed: int = 0
    coverage: Optional[float] = Field(default=None, ge=0, le=1)
    stderr: Optional[float] = None
    mean_area: Optional[float] = Field(default=None, ge=0)
    area_stderr: Optional[float] = None
    unbounded: int = 0
    # trials whose grid region reached the grid border
    truncated: int = 0


class GridMask(BaseModel):
    method: str
    n: int
    bounds: list[tuple[float, float]]
    resolution: list[int]
    area: float = Field(ge=0)
    truncated: bool = False
    # nested lists, one level per grid axis
    cells: list


class EllipsoidRecord(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="constants")

    method: str
    n: int
    center: list[float]
    shape: list[list[float]]
    radius: float
    # closed-form area, planar ellipses only
    area: Optional[float] = None


class ExperimentReport(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="constants")

    name: str
    seed: int
    config_hash: str
    config: dict
    summaries: list[MethodSummary] = []
    rank_counts: dict[str, list[int]] = {}
    areas: dict[str, list[float]] = {}
    masks: list[GridMask] = []
    ellipsoids: list[EllipsoidRecord] = []
    # wall-clock time; kept out of the reproducible payload
    runtime_seconds: float = Field(default=0.0, exclude=True)

    def summary(self, method: str, n: int) -> MethodSummary:
        for row in self.summaries:
            if row.method == method and row.n == n:
                return row
        raise KeyError(f"no summary for {method} at n={n}")


class StateSnapshot(BaseModel):
    """Everything needed to rebuild a perturbation state for a given dataset"""

    kind: str = "rps"
    config: dict
    seed: int
    n: int
    permutations: list[list[int]] = []
    signs: list[list[int]] = []
    tiebreak: list[int]
