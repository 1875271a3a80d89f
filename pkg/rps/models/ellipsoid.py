import math
from dataclasses import dataclass

import numpy as np

from rps.core.errors import MatrixValidationError, ParameterError, ShapeError

SYMMETRY_TOL = 1e-10


def is_symmetric(matrix: np.ndarray, tol: float = SYMMETRY_TOL) -> bool:
    scale = max(1.0, float(np.max(np.abs(matrix), initial=0.0)))
    return bool(np.max(np.abs(matrix - matrix.T), initial=0.0) <= tol * scale)


@dataclass(frozen=True, eq=False)
class Ellipsoid:
    """{theta : (theta - center)' shape (theta - center) <= radius}; radius may be +inf"""

    center: np.ndarray
    shape: np.ndarray
    radius: float

    def __post_init__(self):
        center = np.asarray(self.center, dtype=float).ravel()
        shape = np.asarray(self.shape, dtype=float)
        if shape.shape != (center.size, center.size):
            raise ShapeError(f"shape matrix {shape.shape} does not match center of size {center.size}")
        if not is_symmetric(shape):
            raise MatrixValidationError("ellipsoid shape matrix must be symmetric")
        radius = float(self.radius)
        if math.isnan(radius) or radius < 0:
            raise ParameterError(f"ellipsoid radius must be nonnegative, got {radius}")
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "shape", (shape + shape.T) / 2.0)
        object.__setattr__(self, "radius", radius)

    @property
    def d(self) -> int:
        return self.center.size

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.radius)

    def __repr__(self):
        return f"<Ellipsoid d={self.d} radius={self.radius:.6g}>"


@dataclass(frozen=True, eq=False)
class LmiProblem:
    """One instance of: min gamma s.t. lambda >= 0, [[-I + lambda A, lambda b], [lambda b', lambda c + gamma]] psd"""

    A: np.ndarray
    b: np.ndarray
    c: float

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        b = np.asarray(self.b, dtype=float).ravel()
        if A.shape != (b.size, b.size):
            raise ShapeError(f"A has shape {A.shape} but b has size {b.size}")
        if not is_symmetric(A):
            raise MatrixValidationError("LMI matrix A must be symmetric")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", float(self.c))


@dataclass(frozen=True, eq=False)
class PerturbedAggregates:
    """Stacked (1/n) Psi' P_i Phi and (1/n) Psi' P_i y for i = 0..m-1.

    Entry 0 is unperturbed, so ``q[0]`` is V_n and ``xi[0]`` is
    (1/n) Psi' y.
    """

    q: np.ndarray
    xi: np.ndarray

    @property
    def v_n(self) -> np.ndarray:
        return self.q[0]
