import math
from enum import Enum
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from rps.schemas.system import (
    BENCHMARK_FILTER,
    BENCHMARK_THETA,
    NoiseFamily,
    NoiseSpec,
    TrueSystem,
)


class CoregressorKind(str, Enum):
    IDENTITY = "identity"
    CENTERED_KNOWN_MEAN = "centered-known-mean"
    CENTERED_EMPIRICAL = "centered-empirical"
    CENTERED_REFERENCE = "centered-reference"
    SIGN = "sign"
    USER = "user"


class ShapingKind(str, Enum):
    IDENTITY = "identity"
    EMPIRICAL_GRAM = "empirical-gram"
    USER = "user"


class Baseline(str, Enum):
    SPS = "sps"
    ASYMPTOTIC = "asymptotic"
    EOA = "eoa"


class CoregressorSpec(BaseModel):
    """How the co-regressors psi_t are formed from the regressors.

    ``mean`` is the known E[phi_t] for ``centered-known-mean``; ``matrix``
    is the reference sequence zeta (``centered-reference``) or the
    co-regressors themselves (``user``).
    """

    model_config = ConfigDict(frozen=True)

    kind: CoregressorKind = CoregressorKind.IDENTITY
    mean: Optional[list[float]] = None
    matrix: Optional[list[list[float]]] = None

    @model_validator(mode="after")
    def check_payload(self):
        if self.kind == CoregressorKind.CENTERED_KNOWN_MEAN and self.mean is None:
            raise ValueError("centered-known-mean needs the regressor mean")
        if (
            self.kind in (CoregressorKind.USER, CoregressorKind.CENTERED_REFERENCE)
            and self.matrix is None
        ):
            raise ValueError(f"{self.kind.value} needs a matrix")
        return self


class ShapingSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: ShapingKind = ShapingKind.EMPIRICAL_GRAM
    matrix: Optional[list[list[float]]] = None

    @model_validator(mode="after")
    def check_payload(self):
        if self.kind == ShapingKind.USER and self.matrix is None:
            raise ValueError("user shaping needs a matrix")
        return self


class RpsConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    m: int = Field(default=10, gt=1)
    q: int = Field(default=1, gt=0)
    coregressor: CoregressorSpec = CoregressorSpec()
    shaping: ShapingSpec = ShapingSpec()
    seed: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def check_levels(self):
        if self.q >= self.m:
            raise ValueError(f"need m > q > 0, got m={self.m}, q={self.q}")
        return self

    @property
    def p(self) -> float:
        """Confidence level 1 - q/m"""
        return 1.0 - self.q / self.m


class GridSpec(BaseModel):
    """Rectangular grid of cell centres.

    Axis k is split into ``resolution[k]`` equal cells over
    ``bounds[k]``; nodes sit at the cell centres and masks are stored
    row-major with axis 0 varying slowest.
    """

    model_config = ConfigDict(frozen=True)

    bounds: list[tuple[float, float]] = Field(min_length=1)
    resolution: list[int]

    @field_validator("bounds")
    @classmethod
    def check_bounds(cls, bounds):
        for lo, hi in bounds:
            if not (math.isfinite(lo) and math.isfinite(hi)) or lo >= hi:
                raise ValueError(f"grid bounds must satisfy lo < hi, got ({lo}, {hi})")
        return bounds

    @model_validator(mode="before")
    @classmethod
    def broadcast_resolution(cls, data):
        if isinstance(data, dict) and isinstance(data.get("resolution"), int):
            data = dict(data)
            data["resolution"] = [data["resolution"]] * len(data.get("bounds", []))
        return data

    @model_validator(mode="after")
    def check_resolution(self):
        if len(self.resolution) != len(self.bounds):
            raise ValueError("one resolution per grid dimension")
        if any(k < 2 for k in self.resolution):
            raise ValueError("grid resolution must be at least 2")
        return self

    @property
    def d(self) -> int:
        return len(self.bounds)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(self.resolution)

    @property
    def steps(self) -> np.ndarray:
        return np.array([(hi - lo) / k for (lo, hi), k in zip(self.bounds, self.resolution)])

    @property
    def cell_area(self) -> float:
        return float(np.prod(self.steps))

    def axes(self) -> list[np.ndarray]:
        return [
            lo + (np.arange(k) + 0.5) * h
            for (lo, _), k, h in zip(self.bounds, self.resolution, self.steps)
        ]

    def nodes(self) -> np.ndarray:
        """All grid nodes as a (size, d) array in mask order"""
        mesh = np.meshgrid(*self.axes(), indexing="ij")
        return np.stack([axis.ravel() for axis in mesh], axis=1)


class ExperimentConfig(BaseModel):
    """Flat experiment description, one key per line of a config file"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str = "custom"
    system: Literal["fir", "heteroscedastic"] = "fir"
    theta_star: list[float] = Field(default=BENCHMARK_THETA, min_length=1)
    input_filter: list[float] = Field(default=BENCHMARK_FILTER, min_length=1)

    noise: NoiseFamily = NoiseFamily.LAPLACE
    noise_mean: float = 0.0
    noise_variance: Optional[float] = Field(default=None, gt=0)
    noise_rate: Optional[float] = Field(default=None, gt=0)
    noise_scale: Optional[float] = Field(default=None, gt=0)

    n_list: list[int] = Field(default=[250], min_length=1)
    m: int = Field(default=10, gt=1)
    q: int = Field(default=1, gt=0)
    coregressor: CoregressorKind = CoregressorKind.IDENTITY
    coregressor_mean: Optional[list[float]] = None
    shaping: ShapingKind = ShapingKind.EMPIRICAL_GRAM
    shaping_matrix: Optional[list[list[float]]] = None
    baselines: list[Baseline] = []

    trials: int = Field(default=1000, ge=1)
    grid_resolution: int = Field(default=200, ge=2)
    grid_bounds: Optional[list[tuple[float, float]]] = None
    grid_halfwidth_sd: float = Field(default=4.0, gt=0)
    lmi_tol: float = Field(default=1e-9, gt=0)
    seed: int = Field(default=0, ge=0)

    @field_validator("n_list")
    @classmethod
    def check_sizes(cls, n_list):
        if any(n < 1 for n in n_list):
            raise ValueError("sample sizes must be positive")
        return n_list

    @model_validator(mode="after")
    def check_consistency(self):
        if self.q >= self.m:
            raise ValueError(f"need m > q > 0, got m={self.m}, q={self.q}")
        if self.noise == NoiseFamily.CUSTOM:
            raise ValueError("custom noise cannot be described in a config file")
        if self.grid_bounds is not None:
            GridSpec(bounds=self.grid_bounds, resolution=self.grid_resolution)
        # building the derived objects validates the dependent keys
        self.noise_spec()
        self.rps_config()
        return self

    def noise_spec(self) -> NoiseSpec:
        if self.noise == NoiseFamily.EXPONENTIAL:
            if self.noise_rate is None and self.noise_scale is None:
                return NoiseSpec(family=self.noise, loc=self.noise_mean, rate=1.0)
            return NoiseSpec(
                family=self.noise,
                loc=self.noise_mean,
                rate=self.noise_rate,
                scale=self.noise_scale,
            )
        if self.noise_rate is not None:
            raise ValueError(f"{self.noise.value} noise has no rate parameter")
        scale = self.noise_scale
        if scale is None:
            variance = 1.0 if self.noise_variance is None else self.noise_variance
            factor = 2.0 if self.noise == NoiseFamily.LAPLACE else 1.0
            scale = math.sqrt(variance / factor)
        return NoiseSpec(family=self.noise, loc=self.noise_mean, scale=scale)

    def true_system(self) -> TrueSystem:
        return TrueSystem(
            theta_star=self.theta_star,
            noise=self.noise_spec(),
            input_filter=self.input_filter,
        )

    def rps_config(self, seed: Optional[int] = None) -> RpsConfig:
        return RpsConfig(
            m=self.m,
            q=self.q,
            coregressor=CoregressorSpec(kind=self.coregressor, mean=self.coregressor_mean),
            shaping=ShapingSpec(kind=self.shaping, matrix=self.shaping_matrix),
            seed=self.seed if seed is None else seed,
        )

    @property
    def p(self) -> float:
        return 1.0 - self.q / self.m
