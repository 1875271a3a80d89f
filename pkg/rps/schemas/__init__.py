from rps.schemas.system import NoiseFamily, NoiseSpec, TrueSystem
from rps.schemas.experiment import (
    Baseline,
    CoregressorKind,
    CoregressorSpec,
    ExperimentConfig,
    GridSpec,
    RpsConfig,
    ShapingKind,
    ShapingSpec,
)
from rps.schemas.report import (
    EllipsoidRecord,
    ExperimentReport,
    GridMask,
    MethodSummary,
    StateSnapshot,
)


__all__ = [
    "NoiseFamily",
    "NoiseSpec",
    "TrueSystem",
    "Baseline",
    "CoregressorKind",
    "CoregressorSpec",
    "ExperimentConfig",
    "GridSpec",
    "RpsConfig",
    "ShapingKind",
    "ShapingSpec",
    "EllipsoidRecord",
    "ExperimentReport",
    "GridMask",
    "MethodSummary",
    "StateSnapshot",
]
