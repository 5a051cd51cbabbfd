"""
Firing rules for messages, broadcasts, confirmations, delays and reorgs.

All operations are pure: they take a state and return a new one. The ``fire_*``
methods check their precondition and raise FiringError when it does not hold; the
explorer uses ``successors`` which only produces fireable steps.
"""

import logging
from collections.abc import Iterable, Mapping
from itertools import groupby
from operator import itemgetter

from src.exceptions import FiringError
from src.knowledge.deduction import Deducer, witness_reveals
from src.knowledge.objects import (
    Actor,
    ActorKnowledge,
    KnowledgeObject,
    kind_of,
)
from src.semantics.state import (
    Confirmation,
    EdgeKind,
    ExecutionParams,
    FiredTransition,
    PoolEntry,
    TraceNetState,
)
from src.tracenet.net import NetTransition, TraceNet

logger = logging.getLogger(__name__)


def replay_marking(
    net: TraceNet, history: Iterable[tuple[str, int]]
) -> dict[str, int]:
    """
    Marked places with arrival heights after confirming ``history`` from m0.

    Entries come in height order. Confirmations sharing a height are applied
    together, so a transition may spend an output created in the same block.

    Raises:
        FiringError: If an entry spends an unmarked place, a place is spent twice or
            a marked place is marked again
    """
    arrivals = dict(net.arrivals0)
    for height, block in groupby(history, key=itemgetter(1)):
        transitions = [net.transitions[t_id] for t_id, _ in block]
        produced = [place for t in transitions for place in t.outputs]
        spent = [place for t in transitions for place in t.input_places]
        for t in transitions:
            for place in t.input_places:
                if place not in arrivals and place not in produced:
                    raise FiringError(f"{t.id} spends unmarked place {place}")
        if len(set(spent)) < len(spent):
            raise FiringError(f"a place is spent twice at height {height}")
        for place in produced:
            if place in arrivals or produced.count(place) > 1:
                raise FiringError(f"height {height} would mark {place} twice")
        for place in spent:
            arrivals.pop(place, None)
        for place in produced:
            if place not in spent:
                arrivals[place] = height
    return arrivals


class TraceNetSemantics:
    """Firing relation of one trace net."""

    def __init__(self, net: TraceNet, deducer: Deducer, params: ExecutionParams):
        self.net = net
        self.deducer = deducer
        self.params = params

    def initial_state(self, knowledge: Mapping[Actor, ActorKnowledge]) -> TraceNetState:
        """Setup knowledge closed under the rules, m0 and b0."""
        return TraceNetState.create(
            {actor: self.deducer.closure(k) for actor, k in knowledge.items()},
            height=self.net.b0,
            arrivals=self.net.arrivals0,
        )

    # Validity and deduction

    def is_valid(self, z: TraceNetState, t: NetTransition) -> bool:
        """Inputs marked and both clocks released."""
        if z.height < t.after:
            return False
        return all(
            arc.place in z.marking and z.older_clock(arc.place) >= arc.older
            for arc in t.inputs
        )

    def deducers(self, z: TraceNetState, t: NetTransition) -> tuple[Actor, ...]:
        """Actors whose knowledge produces the transition's witness."""
        return tuple(
            actor
            for actor in Actor
            if t.perm in self.deducer.deducible(z.knowledge(actor), t.tx)
        )

    def reveals(
        self, z: TraceNetState, t: NetTransition, actor: Actor
    ) -> frozenset[KnowledgeObject]:
        """What the counterparty learns when ``actor`` publishes the transition."""
        return witness_reveals(t.perm, z.knowledge(actor.other))

    # Messages

    def fireable_messages(self, z: TraceNetState) -> list[FiredTransition]:
        steps = []
        for sender in Actor:
            recipient = z.knowledge(sender.other)
            for obj in z.knowledge(sender).sorted_objects():
                if kind_of(obj) in self.params.message_kinds and obj not in recipient:
                    steps.append(
                        FiredTransition(
                            EdgeKind.MESSAGE,
                            actor=sender,
                            payload=obj,
                            payload_label=self.net.context.describe(obj),
                        )
                    )
        return steps

    def fire_message(self, z: TraceNetState, step: FiredTransition) -> TraceNetState:
        if step not in self.fireable_messages(z):
            raise FiringError(f"message {step.label} is not fireable")
        return self._apply_message(z, step)

    def _apply_message(self, z: TraceNetState, step: FiredTransition) -> TraceNetState:
        assert step.actor is not None and step.payload is not None
        recipient = step.actor.other
        learned = self.deducer.learn(z.knowledge(recipient), [step.payload])
        return z.with_knowledge(recipient, learned)

    # Broadcasts

    def fireable_broadcasts(self, z: TraceNetState) -> list[FiredTransition]:
        steps = []
        for t in self.net.transitions.values():
            if z.pooled(t.id) or not self.is_valid(z, t):
                continue
            for actor in self.deducers(z, t):
                if self.reveals(z, t, actor):
                    steps.append(
                        FiredTransition(EdgeKind.BROADCAST, actor=actor, transition=t.id)
                    )
        return steps

    def fire_broadcast(self, z: TraceNetState, step: FiredTransition) -> TraceNetState:
        if step not in self.fireable_broadcasts(z):
            raise FiringError(f"broadcast {step.label} is not fireable")
        return self._apply_broadcast(z, step)

    def _apply_broadcast(self, z: TraceNetState, step: FiredTransition) -> TraceNetState:
        assert step.actor is not None and step.transition is not None
        t = self.net.transitions[step.transition]
        observer = step.actor.other
        revealed = self.reveals(z, t, step.actor)
        z = z.with_knowledge(observer, self.deducer.learn(z.knowledge(observer), revealed))
        pool = (*z.pool, PoolEntry(t.id, step.actor, z.height))
        return TraceNetState.create(
            {Actor.INT: z.k_int, Actor.EXT: z.k_ext},
            height=z.height,
            arrivals=z.arrival_map,
            history=z.history,
            pool=pool,
        )

    # Confirmations

    def fireable_onchain(
        self,
        z: TraceNetState,
        exempt: bool = False,
        actors: Iterable[Actor] = tuple(Actor),
    ) -> list[FiredTransition]:
        """
        On-chain firings ready in ``z``.

        A broadcast transaction confirms once the confirmation delay of the actor who
        broadcast it has passed, whoever fires it. A transaction that was never
        broadcast confirms directly only when its witness reveals nothing to the
        counterparty, or when ``exempt`` (blocks mined privately on a reorg branch).
        """
        allowed = tuple(actors)
        steps = []
        for t in self.net.transitions.values():
            if not self.is_valid(z, t):
                continue
            entry = z.pooled(t.id)
            for actor in self.deducers(z, t):
                if actor not in allowed:
                    continue
                if exempt:
                    ready = True
                elif entry is not None:
                    ready = z.height - entry.height >= self.params.conf_delay(entry.actor)
                else:
                    ready = not self.reveals(z, t, actor)
                if ready:
                    steps.append(
                        FiredTransition(EdgeKind.ONCHAIN, actor=actor, transition=t.id)
                    )
        return steps

    def fire_onchain(
        self, z: TraceNetState, step: FiredTransition, exempt: bool = False
    ) -> TraceNetState:
        actors = (Actor.EXT,) if exempt else tuple(Actor)
        if step not in self.fireable_onchain(z, exempt=exempt, actors=actors):
            raise FiringError(f"on-chain transition {step.label} is not fireable")
        return self._apply_onchain(z, step, exempt)

    def _apply_onchain(
        self, z: TraceNetState, step: FiredTransition, exempt: bool = False
    ) -> TraceNetState:
        assert step.actor is not None and step.transition is not None
        t = self.net.transitions[step.transition]
        if exempt:
            observer = step.actor.other
            revealed = self.reveals(z, t, step.actor)
            if revealed:
                z = z.with_knowledge(
                    observer, self.deducer.learn(z.knowledge(observer), revealed)
                )
        arrivals = z.arrival_map
        spent = tuple((place, arrivals.pop(place)) for place in t.input_places)
        for place in t.outputs:
            if place in arrivals:
                raise FiringError(f"{t.id} would mark {place} twice")
            arrivals[place] = z.height
        pool = [
            entry
            for entry in z.pool
            if entry.transition != t.id
            and all(
                place in arrivals
                for place in self.net.transitions[entry.transition].input_places
            )
        ]
        return TraceNetState.create(
            {Actor.INT: z.k_int, Actor.EXT: z.k_ext},
            height=z.height,
            arrivals=arrivals,
            history=(*z.history, Confirmation(t.id, z.height, spent)),
            pool=pool,
        )

    # Time

    def fire_delay(self, z: TraceNetState, blocks: int) -> TraceNetState:
        if blocks < 1:
            raise FiringError(f"delay must be at least one block, got {blocks}")
        return TraceNetState(
            k_int=z.k_int,
            k_ext=z.k_ext,
            height=z.height + blocks,
            marking=z.marking,
            arrivals=z.arrivals,
            history=z.history,
            pool=z.pool,
        )

    def next_release(self, z: TraceNetState) -> int | None:
        """
        Smallest delay after which a new transition becomes fireable.

        Considers timelocks of marked transitions some actor can deduce and pool
        entries still waiting for their confirmation delay. None if nothing is
        pending.
        """
        waits = []
        for t in self.net.transitions.values():
            if not all(place in z.marking for place in t.input_places):
                continue
            actors = self.deducers(z, t)
            if not actors:
                continue
            wait = max(
                t.after - z.height,
                *(arc.older - z.older_clock(arc.place) for arc in t.inputs),
            )
            if wait > 0:
                waits.append(wait)
                continue
            entry = z.pooled(t.id)
            if entry is None:
                continue
            pending = entry.height + self.params.conf_delay(entry.actor) - z.height
            if pending > 0:
                waits.append(pending)
        return min(waits, default=None)

    # Reorganizations

    def fire_reorg(self, z: TraceNetState, depth: int) -> TraceNetState:
        """
        Roll back the top ``depth`` blocks.

        Confirmations above the cut are reverted: their outputs leave the marking and
        the tokens they spent return with their original arrival heights. Knowledge is
        kept. The height never drops below b0.
        """
        if depth < 1:
            raise FiringError(f"reorg depth must be at least 1, got {depth}")
        cut = z.height - depth
        history = [c for c in z.history if c.height <= cut]
        reverted = [c for c in z.history if c.height > cut]
        produced = {
            place for c in reverted for place in self.net.transitions[c.transition].outputs
        }
        arrivals = {p: h for p, h in z.arrivals if p not in produced}
        arrivals.update((p, h) for c in reverted for p, h in c.spent if p not in produced)
        pool = [entry for entry in z.pool if entry.height <= cut]
        if reverted:
            logger.debug(
                "Reorg of depth %d reverted %s", depth, [c.transition for c in reverted]
            )
        return TraceNetState.create(
            {Actor.INT: z.k_int, Actor.EXT: z.k_ext},
            height=max(cut, self.net.b0),
            arrivals=arrivals,
            history=history,
            pool=pool,
        )

    # Dispatch

    def successors(self, z: TraceNetState) -> list[tuple[FiredTransition, TraceNetState]]:
        """Every non-reorg step fireable in ``z`` with its target state."""
        steps: list[tuple[FiredTransition, TraceNetState]] = []
        for step in self.fireable_messages(z):
            steps.append((step, self._apply_message(z, step)))
        for step in self.fireable_broadcasts(z):
            steps.append((step, self._apply_broadcast(z, step)))
        for step in self.fireable_onchain(z):
            steps.append((step, self._apply_onchain(z, step)))
        wait = self.next_release(z)
        if wait is not None:
            steps.append((FiredTransition.delay(wait), self.fire_delay(z, wait)))
        return steps

    def apply_branch(
        self, z: TraceNetState, branch: Iterable[FiredTransition]
    ) -> TraceNetState:
        """Replay an adversary branch: exempt confirmations and single blocks."""
        for step in branch:
            if step.kind is EdgeKind.DELAY:
                z = self.fire_delay(z, step.blocks)
            else:
                z = self.fire_onchain(z, step, exempt=True)
        return z

    def fire(self, z: TraceNetState, step: FiredTransition) -> TraceNetState:
        """Fire any step, checking its precondition."""
        match step.kind:
            case EdgeKind.MESSAGE:
                return self.fire_message(z, step)
            case EdgeKind.BROADCAST:
                return self.fire_broadcast(z, step)
            case EdgeKind.ONCHAIN:
                return self.fire_onchain(z, step)
            case EdgeKind.DELAY:
                return self.fire_delay(z, step.blocks)
            case EdgeKind.REORG:
                return self.apply_branch(self.fire_reorg(z, step.blocks), step.branch)
