from rps.models.dataset import RegressionDataset
from rps.models.state import PerturbationState, RpsState, SpsState
from rps.models.ellipsoid import Ellipsoid, LmiProblem, PerturbedAggregates


__all__ = [
    "RegressionDataset",
    "PerturbationState",
    "RpsState",
    "SpsState",
    "Ellipsoid",
    "LmiProblem",
    "PerturbedAggregates",
]
