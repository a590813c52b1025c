"""Deterministic discrete-event simulator for MEA-DSR vs DSR comparisons."""

from .scenario import Scenario, SweepSuite, build_suite, load_scenario
from .simulation import RunResult, Simulation, run_single

__version__ = "0.1.0"

__all__ = [
    "Scenario", "SweepSuite", "build_suite", "load_scenario",
    "RunResult", "Simulation", "run_single", "__version__",
]
