from dataclasses import dataclass

import numpy as np

from rps.core.errors import ParameterError, ShapeError


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=float, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class RegressionDataset:
    """One realization of Y_t = phi_t' theta + W_t, regressors stored as rows"""

    phi: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        phi = np.asarray(self.phi, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if phi.ndim == 1:
            phi = phi[:, None]
        if phi.ndim != 2 or y.ndim != 1:
            raise ShapeError("phi must be a matrix and y a vector")
        if phi.shape[0] != y.shape[0]:
            raise ShapeError(f"phi has {phi.shape[0]} rows but y has {y.shape[0]} entries")
        if phi.shape[0] < 1 or phi.shape[1] < 1:
            raise ShapeError("dataset needs n >= 1 and d >= 1")
        if not (np.isfinite(phi).all() and np.isfinite(y).all()):
            raise ParameterError("dataset contains NaN or infinite values")
        object.__setattr__(self, "phi", _frozen(phi))
        object.__setattr__(self, "y", _frozen(y))

    @property
    def n(self) -> int:
        return self.phi.shape[0]

    @property
    def d(self) -> int:
        return self.phi.shape[1]

    def __eq__(self, other):
        if not isinstance(other, RegressionDataset):
            return NotImplemented
        return np.array_equal(self.phi, other.phi) and np.array_equal(self.y, other.y)

    __hash__ = None

    def __repr__(self):
        return f"<RegressionDataset n={self.n} d={self.d}>"
