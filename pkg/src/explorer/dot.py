"""DOT rendering of reachability graphs."""

from collections.abc import Iterator

from src.explorer.graph import ReachabilityGraph
from src.semantics.state import TraceNetState
from src.tracenet.dot import gvquote


def _state_label(state: TraceNetState) -> str:
    marking = ", ".join(sorted(state.marking)) or "-"
    return f"h={state.height}\n{marking}"


def _graph_lines(rg: ReachabilityGraph) -> Iterator[str]:
    names = {state: f"n{index}" for index, state in enumerate(rg.nodes)}
    yield "digraph reachability {"
    for state, name in names.items():
        shape = "doublecircle" if rg.is_terminal(state) else "ellipse"
        if state == rg.root:
            shape = "box"
        yield f"  {name} [shape={shape} label={gvquote(_state_label(state))}];"
    for source, step, target in rg.edges():
        yield f"  {names[source]} -> {names[target]} [label={gvquote(step.label)}];"
    yield "}"


def export_dot(rg: ReachabilityGraph) -> str:
    """
    Deterministic DOT text for a reachability graph.

    Nodes are numbered in discovery order and labelled with height and marking; the
    root is drawn as a box and terminal states as double circles.
    """
    return "\n".join(_graph_lines(rg)) + "\n"
