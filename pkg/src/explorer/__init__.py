"""Reachability graph construction, normalization and export."""

from src.explorer.build import Explorer, build_rg
from src.explorer.canonical import Horizon
from src.explorer.dot import export_dot
from src.explorer.graph import GraphStats, ReachabilityGraph, terminal_states

__all__ = [
    "Explorer",
    "GraphStats",
    "Horizon",
    "ReachabilityGraph",
    "build_rg",
    "export_dot",
    "terminal_states",
]
