"""Virtual-time emulator of a loom efficiency and cloth-length monitor."""

from .scenario import Scenario, ScenarioError
from .sim import SimOutput, expected_rotations, run
from .soc_core import ShiftRecord, efficiency_bp, length_cm

__all__ = [
    "Scenario",
    "ScenarioError",
    "ShiftRecord",
    "SimOutput",
    "efficiency_bp",
    "expected_rotations",
    "length_cm",
    "run",
]
