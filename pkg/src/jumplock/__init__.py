"""Quantum-jump trajectory simulator with a click-triggered detuning lock."""
__version__ = "0.1.0"

from .dynamics import (  # noqa: E402
    FullLambdaParams,
    PropagatorConfig,
    ReducedLambdaParams,
    TwoLevelParams,
    propagate,
)
from .feedback import FeedbackConfig, FeedbackState, run_closed_loop  # noqa: E402
from .jumps import DetectionModel, JumpEvent, RngStream  # noqa: E402
from .qstate import BlochVector, BrightDarkBasis, from_bloch, make_bright_dark, to_bloch  # noqa: E402
from .records import TrajectoryRecord  # noqa: E402

__all__ = [
    "__version__", "FullLambdaParams", "PropagatorConfig", "ReducedLambdaParams", "TwoLevelParams",
    "propagate", "FeedbackConfig", "FeedbackState", "run_closed_loop", "DetectionModel",
    "JumpEvent", "RngStream", "BlochVector", "BrightDarkBasis", "from_bloch", "make_bright_dark",
    "to_bloch", "TrajectoryRecord",
]
