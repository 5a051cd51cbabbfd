"""Reachability graph container and queries."""

from collections import Counter, deque
from collections.abc import Callable, Iterator
from dataclasses import dataclass

import networkx as nx

from src.semantics.state import EdgeKind, FiredTransition, TraceNetState
from src.tracenet.net import TraceNet

Edge = tuple[TraceNetState, FiredTransition, TraceNetState]


@dataclass(frozen=True)
class GraphStats:
    nodes: int
    edges: int
    edges_by_kind: tuple[tuple[str, int], ...]
    terminals: int

    def render(self) -> str:
        lines = [f"nodes: {self.nodes}", f"edges: {self.edges}"]
        lines.extend(f"  {kind}: {count}" for kind, count in self.edges_by_kind)
        lines.append(f"terminal states: {self.terminals}")
        return "\n".join(lines)


class ReachabilityGraph:
    """
    States reachable from a root, with fired transitions as edge keys.

    Wraps a ``networkx.MultiDiGraph`` whose nodes are normalized states; an edge's
    key is the FiredTransition itself, so a step fired twice between the same pair
    of states is stored once.
    """

    def __init__(self, net: TraceNet, root: TraceNetState, graph: nx.MultiDiGraph):
        self.net = net
        self.root = root
        self.graph = graph

    def __contains__(self, state: object) -> bool:
        return state in self.graph

    @property
    def nodes(self) -> list[TraceNetState]:
        return list(self.graph.nodes)

    def number_of_nodes(self) -> int:
        return int(self.graph.number_of_nodes())

    def number_of_edges(self) -> int:
        return int(self.graph.number_of_edges())

    def edges(self) -> Iterator[Edge]:
        for u, v, step in self.graph.edges(keys=True):
            yield u, step, v

    def out_edges(self, state: TraceNetState) -> list[tuple[FiredTransition, TraceNetState]]:
        return [(step, v) for _, v, step in self.graph.out_edges(state, keys=True)]

    def in_edges(self, state: TraceNetState) -> list[tuple[TraceNetState, FiredTransition]]:
        return [(u, step) for u, _, step in self.graph.in_edges(state, keys=True)]

    def is_terminal(self, state: TraceNetState) -> bool:
        return all(step.kind is EdgeKind.REORG for step, _ in self.out_edges(state))

    def shortest_trace(
        self,
        target: Callable[[TraceNetState], bool],
        follow: Callable[[FiredTransition], bool] = lambda step: True,
    ) -> tuple[list[FiredTransition], TraceNetState] | None:
        """Breadth-first path from the root to the first state satisfying ``target``."""
        parents: dict[TraceNetState, tuple[TraceNetState, FiredTransition] | None] = {
            self.root: None
        }
        queue = deque([self.root])
        while queue:
            state = queue.popleft()
            if target(state):
                trace: list[FiredTransition] = []
                cursor = state
                while (parent := parents[cursor]) is not None:
                    cursor, step = parent
                    trace.append(step)
                return trace[::-1], state
            for step, successor in self.out_edges(state):
                if follow(step) and successor not in parents:
                    parents[successor] = (state, step)
                    queue.append(successor)
        return None

    def stats(self) -> GraphStats:
        kinds = Counter(step.kind.value for _, step, _ in self.edges())
        return GraphStats(
            nodes=self.number_of_nodes(),
            edges=self.number_of_edges(),
            edges_by_kind=tuple(sorted(kinds.items())),
            terminals=len(terminal_states(self)),
        )


def terminal_states(rg: ReachabilityGraph) -> frozenset[TraceNetState]:
    """States without outgoing message, broadcast, on-chain or delay edges."""
    return frozenset(state for state in rg.graph.nodes if rg.is_terminal(state))
