"""DOT rendering of trace nets."""

from collections.abc import Iterator

from src.tracenet.net import TraceNet


def gvquote(text: str) -> str:
    """Quote a string as a DOT identifier."""
    escaped = text.replace("\\", "\\\\").replace('"', r"\"").replace("\n", r"\n")
    return f'"{escaped}"'


def _net_lines(net: TraceNet) -> Iterator[str]:
    yield "digraph tracenet {"
    yield "  rankdir=LR;"
    for place_id in net.places:
        style = "filled" if place_id in net.m0 else "solid"
        label = gvquote(f"{place_id}\n{net.output(place_id).value}")
        yield f"  {gvquote(place_id)} [shape=circle style={style} label={label}];"
    for t in net.transitions.values():
        node = gvquote(f"t:{t.id}")
        yield f"  {node} [shape=box height=0.1 label={gvquote(t.id)}];"
        for arc in t.inputs:
            yield f"  {gvquote(arc.place)} -> {node} [label={gvquote(_interval(arc.older, arc.after))}];"
        for place_id in t.outputs:
            yield f"  {node} -> {gvquote(place_id)};"
    yield "}"


def _interval(older: int, after: int) -> str:
    return f"older>={older} after>={after}"


def net_to_dot(net: TraceNet) -> str:
    """Places as circles (marked ones filled), transitions as bars, arcs labelled with bounds."""
    return "\n".join(_net_lines(net)) + "\n"
