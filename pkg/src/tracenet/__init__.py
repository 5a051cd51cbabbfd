"""Timed Petri net skeleton over contract outputs and witness permutations."""

from src.tracenet.dot import gvquote, net_to_dot
from src.tracenet.net import (
    InputArc,
    NetTransition,
    Place,
    TraceNet,
    build_tracenet,
    required_tokens,
)

__all__ = [
    "InputArc",
    "NetTransition",
    "Place",
    "TraceNet",
    "build_tracenet",
    "gvquote",
    "net_to_dot",
    "required_tokens",
]
