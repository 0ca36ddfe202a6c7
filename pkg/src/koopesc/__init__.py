"""Koopman-lifted relay extremum seeking for limit-cycle amplitude damping."""

from .backend import BACKEND
from .experiments import (
    Metrics,
    RunLog,
    TrainingConfig,
    compute_metrics,
    convexity_score,
    run_closed_loop,
    static_map,
    train,
)
from .lifting import KoopmanModel, lift, load_model, project_energy, save_model
from .plant import (
    InterferenceParams,
    PlantParams,
    PlantState,
    SimulationDivergence,
)
from .signal import (
    DetectorConfig,
    DetectorState,
    RelayConfig,
    RelayState,
    detector_step,
    lifted_cost,
    raw_cost,
    relay_step,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "DetectorConfig",
    "DetectorState",
    "InterferenceParams",
    "KoopmanModel",
    "Metrics",
    "PlantParams",
    "PlantState",
    "RelayConfig",
    "RelayState",
    "RunLog",
    "SimulationDivergence",
    "TrainingConfig",
    "compute_metrics",
    "convexity_score",
    "detector_step",
    "lift",
    "lifted_cost",
    "load_model",
    "project_energy",
    "raw_cost",
    "relay_step",
    "run_closed_loop",
    "save_model",
    "static_map",
    "train",
    "__version__",
]
