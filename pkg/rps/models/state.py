from dataclasses import dataclass
from typing import ClassVar

import numpy as np

from rps.models.dataset import RegressionDataset
from rps.schemas.experiment import RpsConfig


@dataclass(frozen=True, eq=False)
class PerturbationState:
    """Frozen randomisation plus the quantities reused by every query.

    Index 0 is the unperturbed reference sum; indices 1..m-1 are the
    perturbed sums. Subclasses define how residuals are perturbed.
    """

    kind: ClassVar[str] = "base"

    dataset: RegressionDataset
    config: RpsConfig
    psi: np.ndarray
    shaping: np.ndarray
    r_half: np.ndarray
    r_half_inv: np.ndarray
    tiebreak: np.ndarray

    @property
    def m(self) -> int:
        return self.config.m

    @property
    def q(self) -> int:
        return self.config.q

    @property
    def n(self) -> int:
        return self.dataset.n

    @property
    def d(self) -> int:
        return self.dataset.d

    def perturb(self, values: np.ndarray, i: int) -> np.ndarray:
        """Apply perturbation i to an array whose first axis runs over t"""
        raise NotImplementedError

    def __repr__(self):
        return f"<{type(self).__name__} m={self.m} q={self.q} n={self.n} d={self.d}>"


@dataclass(frozen=True, eq=False, repr=False)
class RpsState(PerturbationState):
    """Residual-permuted sums: perms[i-1] is the permutation sigma_i"""

    kind: ClassVar[str] = "rps"

    perms: np.ndarray = None

    def perturb(self, values: np.ndarray, i: int) -> np.ndarray:
        if i == 0:
            return values
        return values[self.perms[i - 1]]


@dataclass(frozen=True, eq=False, repr=False)
class SpsState(PerturbationState):
    """Sign-perturbed sums: signs[i-1] is the +-1 vector alpha_i"""

    kind: ClassVar[str] = "sps"

    signs: np.ndarray = None

    def perturb(self, values: np.ndarray, i: int) -> np.ndarray:
        if i == 0:
            return values
        alpha = self.signs[i - 1]
        return alpha.reshape((-1,) + (1,) * (values.ndim - 1)) * values
