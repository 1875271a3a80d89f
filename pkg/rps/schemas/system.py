import math
from enum import Enum
from typing import Callable, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import stats

from rps.core.errors import ParameterError


class NoiseFamily(str, Enum):
    GAUSSIAN = "gaussian"
    LAPLACE = "laplace"
    EXPONENTIAL = "exponential"
    CUSTOM = "custom"


Sampler = Callable[[np.random.Generator, int], np.ndarray]


class NoiseSpec(BaseModel):
    """Law of the i.i.d. noise terms.

    ``scale`` is the standard deviation (gaussian), the Laplace scale b
    (variance 2b²) or the exponential mean 1/rate. Exponential noise may
    be given by ``rate`` or by ``scale``; ``loc`` shifts every family.
    """

    model_config = ConfigDict(frozen=True)

    family: NoiseFamily = NoiseFamily.GAUSSIAN
    loc: float = 0.0
    scale: Optional[float] = Field(default=None, gt=0, allow_inf_nan=False)
    rate: Optional[float] = Field(default=None, gt=0, allow_inf_nan=False)
    sampler: Optional[Sampler] = Field(default=None, exclude=True)

    @model_validator(mode="after")
    def check_parameters(self):
        if self.family == NoiseFamily.CUSTOM:
            if self.sampler is None:
                raise ValueError("custom noise needs a sampler")
            return self
        if self.sampler is not None:
            raise ValueError(f"{self.family.value} noise does not take a sampler")
        if self.family == NoiseFamily.EXPONENTIAL:
            if self.rate is not None and self.scale is not None:
                if not math.isclose(self.rate * self.scale, 1.0, rel_tol=1e-12):
                    raise ValueError("exponential rate and scale disagree")
        elif self.rate is not None:
            raise ValueError(f"{self.family.value} noise has no rate parameter")
        return self

    @classmethod
    def gaussian(cls, mean: float = 0.0, std: float = 1.0) -> "NoiseSpec":
        return cls(family=NoiseFamily.GAUSSIAN, loc=mean, scale=std)

    @classmethod
    def laplace(cls, mean: float = 0.0, variance: float = 1.0) -> "NoiseSpec":
        if variance <= 0:
            raise ParameterError(f"variance must be positive, got {variance}")
        return cls(family=NoiseFamily.LAPLACE, loc=mean, scale=math.sqrt(variance / 2.0))

    @classmethod
    def exponential(
        cls, rate: Optional[float] = None, scale: Optional[float] = None
    ) -> "NoiseSpec":
        if rate is None and scale is None:
            rate = 1.0
        return cls(family=NoiseFamily.EXPONENTIAL, rate=rate, scale=scale)

    @classmethod
    def custom(cls, sampler: Sampler) -> "NoiseSpec":
        return cls(family=NoiseFamily.CUSTOM, sampler=sampler)

    @property
    def effective_scale(self) -> float:
        if self.scale is not None:
            return self.scale
        if self.rate is not None:
            return 1.0 / self.rate
        return 1.0

    @property
    def mean(self) -> Optional[float]:
        if self.family == NoiseFamily.CUSTOM:
            return None
        if self.family == NoiseFamily.EXPONENTIAL:
            return self.loc + self.effective_scale
        return self.loc

    @property
    def variance(self) -> Optional[float]:
        if self.family == NoiseFamily.CUSTOM:
            return None
        if self.family == NoiseFamily.LAPLACE:
            return 2.0 * self.effective_scale**2
        return self.effective_scale**2

    def distribution(self):
        """Frozen scipy distribution of the noise (None for custom samplers)"""
        if self.family == NoiseFamily.GAUSSIAN:
            return stats.norm(loc=self.loc, scale=self.effective_scale)
        if self.family == NoiseFamily.LAPLACE:
            return stats.laplace(loc=self.loc, scale=self.effective_scale)
        if self.family == NoiseFamily.EXPONENTIAL:
            return stats.expon(loc=self.loc, scale=self.effective_scale)
        return None


class TrueSystem(BaseModel):
    model_config = ConfigDict(frozen=True)

    theta_star: list[float] = Field(min_length=1)
    noise: NoiseSpec = NoiseSpec()
    input_filter: list[float] = Field(default=[1.0], min_length=1)
    fir_order: Optional[int] = None

    @model_validator(mode="after")
    def check_order(self):
        if self.fir_order is not None and self.fir_order != len(self.theta_star):
            raise ValueError(
                f"fir_order {self.fir_order} does not match "
                f"{len(self.theta_star)} parameters"
            )
        return self

    @property
    def theta(self) -> np.ndarray:
        return np.asarray(self.theta_star, dtype=float)

    @property
    def order(self) -> int:
        return len(self.theta_star)


# Input filter and parameters of the two-tap FIR benchmark system
BENCHMARK_FILTER = [1.0, 0.775, 0.55, 0.325, 0.1]
BENCHMARK_THETA = [5.0, 1.0]
