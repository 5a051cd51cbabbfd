"""
Worklist construction of the reachability graph.

Each popped state contributes its message, broadcast, on-chain and minimal delay
steps, plus one reorg edge per state the adversary can reach on a replacement branch:
roll back 1..r_max blocks, then confirm its own transitions without broadcasting and
mine single blocks, never above the original height plus one.
"""

import logging
import random
from collections import deque

import networkx as nx

from src.exceptions import BudgetExceededError
from src.explorer.canonical import Horizon
from src.explorer.graph import ReachabilityGraph
from src.knowledge.objects import Actor
from src.semantics.firing import TraceNetSemantics
from src.semantics.state import EdgeKind, FiredTransition, TraceNetState
from src.settings import settings

logger = logging.getLogger(__name__)

PROGRESS_INTERVAL = 10_000


class Explorer:
    """Breadth-first unfolding of one net under fixed execution parameters."""

    def __init__(
        self,
        semantics: TraceNetSemantics,
        budget: int | None = None,
        shuffle_seed: int | None = None,
    ):
        self.semantics = semantics
        self.budget = budget if budget is not None else settings.state_budget
        self.horizon = Horizon.for_net(semantics.net, semantics.params)
        self._rng = random.Random(shuffle_seed) if shuffle_seed is not None else None

    def normalize(self, z: TraceNetState) -> TraceNetState:
        return self.horizon.normalize(z)

    def expand(self, z: TraceNetState) -> list[tuple[FiredTransition, TraceNetState]]:
        """Outgoing steps of a normalized state with normalized targets."""
        steps = [(step, self.normalize(target)) for step, target in self.semantics.successors(z)]
        steps.extend(self._reorg_steps(z))
        return steps

    def _reorg_steps(self, z: TraceNetState) -> list[tuple[FiredTransition, TraceNetState]]:
        semantics = self.semantics
        limit = z.height + 1
        seen = {z}
        steps = []
        for depth in range(1, semantics.params.reorg_depth + 1):
            start = semantics.fire_reorg(z, depth)
            queue: deque[tuple[TraceNetState, tuple[FiredTransition, ...]]] = deque(
                [(start, ())]
            )
            visited = {self.normalize(start)}
            while queue:
                state, branch = queue.popleft()
                target = self.normalize(state)
                if target not in seen:
                    seen.add(target)
                    steps.append(
                        (
                            FiredTransition(
                                EdgeKind.REORG, actor=Actor.EXT, blocks=depth, branch=branch
                            ),
                            target,
                        )
                    )
                moves = [
                    (step, semantics.apply_branch(state, [step]))
                    for step in semantics.fireable_onchain(
                        state, exempt=True, actors=(Actor.EXT,)
                    )
                ]
                if state.height + 1 <= limit:
                    step = FiredTransition.delay(1)
                    moves.append((step, semantics.fire_delay(state, 1)))
                for step, successor in moves:
                    key = self.normalize(successor)
                    if key not in visited:
                        visited.add(key)
                        queue.append((successor, (*branch, step)))
        return steps

    def build(self, root: TraceNetState) -> ReachabilityGraph:
        """
        Explore every state reachable from ``root``.

        Raises:
            BudgetExceededError: If more states than the budget are discovered
        """
        root = self.normalize(root)
        graph = nx.MultiDiGraph()
        graph.add_node(root)
        worklist = deque([root])
        warned = False
        expanded = 0
        while worklist:
            z = worklist.popleft()
            successors = self.expand(z)
            if self._rng is not None:
                self._rng.shuffle(successors)
            for step, target in successors:
                if target not in graph:
                    graph.add_node(target)
                    worklist.append(target)
                graph.add_edge(z, target, key=step)
            expanded += 1
            size = graph.number_of_nodes()
            if size > self.budget:
                raise BudgetExceededError(self.budget)
            if not warned and size >= 0.9 * self.budget:
                warned = True
                logger.warning("Exploration reached %d of %d states", size, self.budget)
            if expanded % PROGRESS_INTERVAL == 0:
                logger.debug("Expanded %d states, %d discovered", expanded, size)
        rg = ReachabilityGraph(self.semantics.net, root, graph)
        logger.info(
            "Explored %d states and %d edges", rg.number_of_nodes(), rg.number_of_edges()
        )
        return rg


def build_rg(
    semantics: TraceNetSemantics,
    root: TraceNetState,
    budget: int | None = None,
    shuffle_seed: int | None = None,
) -> ReachabilityGraph:
    """Reachability graph of ``semantics`` from ``root``."""
    return Explorer(semantics, budget=budget, shuffle_seed=shuffle_seed).build(root)
