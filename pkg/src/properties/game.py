"""
Trustless execution as a safety game over the reachability graph.

The verifier (int) picks internal and delay edges; the adversary (ext) may take any
of its edges, reorgs included, from every state the verifier passes through. A state
is settled when the verifier has nothing left to broadcast or confirm and no timelock
is pending: whatever ext still does, the verifier would only react. Settled states
are scored by the policy.
"""

import logging
from collections import deque
from collections.abc import Iterable
from dataclasses import dataclass

from src.exceptions import PolicyError
from src.explorer.graph import Edge, ReachabilityGraph
from src.knowledge.objects import Actor
from src.properties.policies import SafetyPolicy
from src.semantics.replay import render_trace
from src.semantics.state import EdgeKind, FiredTransition, TraceNetState

logger = logging.getLogger(__name__)


def is_verifier_move(step: FiredTransition) -> bool:
    """Internal and time edges, the ones the verifier chooses."""
    return step.actor is Actor.INT or step.kind is EdgeKind.DELAY


def is_adversary_move(step: FiredTransition) -> bool:
    return step.actor is Actor.EXT


def is_settled(rg: ReachabilityGraph, state: TraceNetState) -> bool:
    """No internal broadcast or confirmation and no delay edge leaves the state."""
    for step, _ in rg.out_edges(state):
        if step.kind is EdgeKind.DELAY:
            return False
        if step.actor is Actor.INT and step.kind in (EdgeKind.BROADCAST, EdgeKind.ONCHAIN):
            return False
    return True


def eval_policy(policy: SafetyPolicy, rg: ReachabilityGraph, state: TraceNetState) -> bool:
    """
    Score a settled state.

    Raises:
        PolicyError: If the verifier can still act in ``state``
    """
    if not is_settled(rg, state):
        raise PolicyError(f"state {state.describe()} is not settled")
    return policy.holds(state, rg.net)


def _backward_reach(
    rg: ReachabilityGraph, targets: Iterable[TraceNetState], within: set[TraceNetState]
) -> set[TraceNetState]:
    reach = set(targets)
    queue = deque(reach)
    while queue:
        state = queue.popleft()
        for source, step in rg.in_edges(state):
            if source in within and source not in reach and is_verifier_move(step):
                reach.add(source)
                queue.append(source)
    return reach


def passing_states(rg: ReachabilityGraph, policy: SafetyPolicy) -> frozenset[TraceNetState]:
    """Settled states where the policy holds."""
    return frozenset(
        state for state in rg.nodes if is_settled(rg, state) and policy.holds(state, rg.net)
    )


def refine_safe(
    rg: ReachabilityGraph,
    passing: frozenset[TraceNetState],
    safe: frozenset[TraceNetState],
) -> frozenset[TraceNetState]:
    """
    One round of the safe-state computation.

    Keeps the states of ``safe`` that reach a passing state of ``safe`` through
    verifier moves inside it and whose adversary edges all land in ``safe``.
    """
    reach = _backward_reach(rg, passing & safe, set(safe))
    return frozenset(
        state
        for state in reach
        if all(
            target in safe
            for step, target in rg.out_edges(state)
            if is_adversary_move(step)
        )
    )


def safe_states(rg: ReachabilityGraph, policy: SafetyPolicy) -> frozenset[TraceNetState]:
    """
    Greatest set of states from which the verifier can force a passing settled state.

    Starts from every node and applies ``refine_safe`` until nothing changes.
    """
    passing = passing_states(rg, policy)
    safe = frozenset(rg.nodes)
    rounds = 0
    while True:
        rounds += 1
        shrunk = refine_safe(rg, passing, safe)
        if shrunk == safe:
            break
        safe = shrunk
    logger.debug(
        "Safe-state fixpoint after %d rounds: %d of %d", rounds, len(safe), rg.number_of_nodes()
    )
    return safe


@dataclass(frozen=True)
class Verdict:
    """Outcome of a trustless execution check; strategy and counterexample are exclusive."""

    holds: bool
    policy: str
    safe_states: frozenset[TraceNetState]
    strategy: tuple[Edge, ...] = ()
    counterexample: tuple[FiredTransition, ...] | None = None
    failing_state: TraceNetState | None = None

    def render(self, rg: ReachabilityGraph) -> str:
        lines = [
            f"trustless execution: {'holds' if self.holds else 'fails'}",
            f"policy: {self.policy}",
            f"safe states: {len(self.safe_states)}",
            rg.stats().render(),
        ]
        if self.holds:
            lines.append(f"strategy edges: {len(self.strategy)}")
            lines.extend(
                f"  {source.describe()} --{step.label}--> {target.describe()}"
                for source, step, target in self.strategy
            )
        else:
            lines.append("counterexample:")
            lines.append(f"  {render_trace(self.counterexample or ()) or '(root)'}")
            if self.failing_state is not None:
                lines.append(f"  ends in {self.failing_state.describe()}")
        return "\n".join(lines) + "\n"


def _counterexample(
    rg: ReachabilityGraph, policy: SafetyPolicy
) -> tuple[tuple[FiredTransition, ...], TraceNetState]:
    def failing(state: TraceNetState) -> bool:
        return is_settled(rg, state) and not policy.holds(state, rg.net)

    found = rg.shortest_trace(failing, follow=lambda step: step.actor is not Actor.INT)
    if found is None:
        found = rg.shortest_trace(failing)
    if found is None:
        return (), rg.root
    trace, state = found
    return tuple(trace), state


def trustless_execution(rg: ReachabilityGraph, policy: SafetyPolicy) -> Verdict:
    """
    Decide whether the verifier has a safe way through the contract from the root.

    When it does, the strategy lists every verifier edge between safe states. When it
    does not, the counterexample is the shortest adversary and time play into a
    failing settled state, or the shortest play of any kind when none exists.
    """
    safe = safe_states(rg, policy)
    holds = rg.root in safe
    if holds:
        strategy = tuple(
            (source, step, target)
            for source, step, target in rg.edges()
            if is_verifier_move(step) and source in safe and target in safe
        )
        verdict = Verdict(True, policy.description, safe, strategy=strategy)
    else:
        trace, state = _counterexample(rg, policy)
        verdict = Verdict(
            False, policy.description, safe, counterexample=trace, failing_state=state
        )
    logger.info(
        "Trustless execution %s for %s (%d safe states)",
        "holds" if holds else "fails",
        policy.description,
        len(safe),
    )
    return verdict
