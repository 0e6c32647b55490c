"""Walker crossing a waiting crowd: simulation and trajectory analysis."""

__version__ = "0.1.0"

from .core import (Agent, ModelParams, Rect, Scenario, SelfCategory, Topography,  # noqa: E402
                   Trajectory, ValidationError, Vec2)
from .engine import RunResult, run, run_batch  # noqa: E402
from .scenarios import generate_reenactment  # noqa: E402

__all__ = [
    "Agent", "ModelParams", "Rect", "RunResult", "Scenario", "SelfCategory", "Topography",
    "Trajectory", "ValidationError", "Vec2", "generate_reenactment", "run", "run_batch",
    "__version__",
]
