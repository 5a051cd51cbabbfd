"""Contract state stability: does waiting forever change what can happen?"""

import logging
from dataclasses import dataclass

import networkx as nx
from networkx.algorithms.isomorphism import categorical_edge_match, categorical_node_match

from src.explorer.build import Explorer
from src.explorer.graph import ReachabilityGraph
from src.semantics.firing import TraceNetSemantics
from src.semantics.state import EdgeKind, FiredTransition, TraceNetState

logger = logging.getLogger(__name__)


def _shape(step: FiredTransition) -> str:
    """Step label without delay lengths, which differ once clocks have run out."""
    if step.kind is EdgeKind.DELAY:
        return "d"
    if step.kind is EdgeKind.REORG:
        return f"r({step.blocks})[{' '.join(_shape(s) for s in step.branch)}]"
    return step.label


def _labelled(rg: ReachabilityGraph) -> nx.DiGraph:
    graph = nx.DiGraph()
    for state in rg.nodes:
        graph.add_node(state, proj=(state.k_int, state.k_ext, state.marking))
    shapes: dict[tuple[TraceNetState, TraceNetState], list[str]] = {}
    for source, step, target in rg.edges():
        shapes.setdefault((source, target), []).append(_shape(step))
    for (source, target), labels in shapes.items():
        graph.add_edge(source, target, shapes=tuple(sorted(labels)))
    return graph


@dataclass(frozen=True)
class StabilityReport:
    stable: bool
    delay: int
    nodes_now: int
    nodes_later: int

    def render(self) -> str:
        return (
            f"state stability: {'stable' if self.stable else 'unstable'}\n"
            f"saturating delay: {self.delay}\n"
            f"states from the current state: {self.nodes_now}\n"
            f"states after the delay: {self.nodes_later}\n"
        )


def state_stability(
    semantics: TraceNetSemantics, z: TraceNetState, budget: int | None = None
) -> StabilityReport:
    """
    Compare the graph from ``z`` with the graph after an unbounded delay.

    The unbounded delay is the saturating one: afterwards every relative and absolute
    lock and every confirmation wait has run out. The state is stable when both
    graphs are isomorphic with matching knowledge, marking and step shapes.
    """
    explorer = Explorer(semantics, budget=budget)
    delay = explorer.horizon.saturation_delay(z)
    now = explorer.build(z)
    later_root = semantics.fire_delay(z, delay) if delay else z
    later = explorer.build(later_root)
    stable = nx.is_isomorphic(
        _labelled(now),
        _labelled(later),
        node_match=categorical_node_match("proj", None),
        edge_match=categorical_edge_match("shapes", None),
    )
    logger.info("State %s is %s", z.describe(), "stable" if stable else "unstable")
    return StabilityReport(stable, delay, now.number_of_nodes(), later.number_of_nodes())
