from .base import DEFAULT_TOLERANCES, ExperimentContext
from .registry import RUNNERS, run_experiment

__all__ = ["DEFAULT_TOLERANCES", "ExperimentContext", "RUNNERS", "run_experiment"]
