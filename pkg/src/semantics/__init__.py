"""Contract states and the firing relations of the five transition types."""

from src.semantics.firing import TraceNetSemantics, replay_marking
from src.semantics.replay import render_trace, replay
from src.semantics.state import (
    Confirmation,
    EdgeKind,
    ExecutionParams,
    FiredTransition,
    PoolEntry,
    TraceNetState,
)

__all__ = [
    "Confirmation",
    "EdgeKind",
    "ExecutionParams",
    "FiredTransition",
    "PoolEntry",
    "TraceNetSemantics",
    "TraceNetState",
    "render_trace",
    "replay",
    "replay_marking",
]
