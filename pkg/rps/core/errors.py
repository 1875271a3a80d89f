"""Error hierarchy shared by the library and the command line.

Every error carries a human readable ``detail`` and the process
``exit_code`` the CLI returns for it: 1 for invalid input, 2 for
numerical trouble.
"""

from typing import Optional


class RpsError(Exception):
    exit_code: int = 1

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class ParameterError(RpsError, ValueError):
    """Invalid scalar parameter (m, q, noise scale, tolerance, ...)."""


class ShapeError(RpsError, ValueError):
    """Array dimensions do not agree."""


class MatrixValidationError(RpsError, ValueError):
    """A user supplied matrix violates its contract (e.g. not symmetric)."""


class NotPsdError(MatrixValidationError):
    pass


class DegreesOfFreedomError(ParameterError):
    pass


class NumericalError(RpsError):
    exit_code = 2


class ConditioningError(NumericalError):
    def __init__(self, detail: str, condition_number: Optional[float] = None):
        super().__init__(detail)
        self.condition_number = condition_number
