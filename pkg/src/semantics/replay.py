"""
Snapshot replay and trace rendering.

A snapshot is a list of steps fired from the initial state:
- ``<transition>``: confirm, broadcasting first when the witness reveals something
  and waiting out the confirmation delay of whoever broadcast it
- ``tb(<transition>)``: broadcast only
- ``d(<n>)``: let n blocks pass
- ``r(<n>)``: roll back n blocks
- ``e(<actor>:<object>)``: message, e.g. ``e(int:Preimage(H))``

Confirmations and broadcasts take an optional actor prefix, ``ext:swap_B`` or
``tb(int:fund_A)``. Without one the first actor able to fire the step is used, int
before ext.
"""

import logging
import re
from collections.abc import Iterable, Sequence

from src.exceptions import FiringError, KnowledgeError, ReplayError
from src.knowledge.objects import Actor
from src.semantics.firing import TraceNetSemantics
from src.semantics.state import EdgeKind, FiredTransition, TraceNetState

logger = logging.getLogger(__name__)

_STEP = re.compile(r"^(?P<op>tb|d|r|e)\((?P<arg>.*)\)$")


def render_trace(steps: Iterable[FiredTransition]) -> str:
    """Arrow notation, e.g. ``--tb(fund_A)--> --fund_A--> --d(10)-->``."""
    return " ".join(f"--{step.label}-->" for step in steps)


def _split_actor(text: str) -> tuple[str, Actor | None]:
    prefix, sep, rest = text.partition(":")
    if sep and prefix in (Actor.INT.value, Actor.EXT.value):
        return rest, Actor(prefix)
    return text, None


def _named(t_id: str, actor: Actor | None) -> str:
    return f"{actor.value}:{t_id}" if actor else t_id


class _Replayer:
    def __init__(self, semantics: TraceNetSemantics, state: TraceNetState):
        self.semantics = semantics
        self.state = state
        self.fired: list[FiredTransition] = []

    def fire(self, step: FiredTransition) -> None:
        self.state = self.semantics.fire(self.state, step)
        self.fired.append(step)

    def _pick(
        self, steps: Iterable[FiredTransition], t_id: str, actor: Actor | None
    ) -> FiredTransition | None:
        return next(
            (
                step
                for step in steps
                if step.transition == t_id and (actor is None or step.actor is actor)
            ),
            None,
        )

    def transition(self, t_id: str, actor: Actor | None = None) -> None:
        if t_id not in self.semantics.net.transitions:
            raise FiringError(f"unknown transition {t_id}")
        step = self._pick(self.semantics.fireable_onchain(self.state), t_id, actor)
        if step is not None:
            self.fire(step)
            return
        entry = self.state.pooled(t_id)
        if entry is None:
            self.broadcast(t_id, actor)
            entry = self.state.pooled(t_id)
            assert entry is not None
        wait = entry.height + self.semantics.params.conf_delay(entry.actor) - self.state.height
        if wait > 0:
            self.fire(FiredTransition.delay(wait))
        step = self._pick(self.semantics.fireable_onchain(self.state), t_id, actor)
        if step is None:
            raise FiringError(f"{_named(t_id, actor)} cannot confirm after its broadcast")
        self.fire(step)

    def broadcast(self, t_id: str, actor: Actor | None = None) -> None:
        step = self._pick(self.semantics.fireable_broadcasts(self.state), t_id, actor)
        if step is None:
            raise FiringError(f"{_named(t_id, actor)} is neither confirmable nor broadcastable")
        self.fire(step)

    def message(self, argument: str) -> None:
        actor_text, _, object_text = argument.partition(":")
        try:
            sender = Actor(actor_text)
        except ValueError:
            raise FiringError(f"unknown actor {actor_text!r}") from None
        obj = self.semantics.net.context.parse_object(object_text)
        self.fire(
            FiredTransition(
                EdgeKind.MESSAGE,
                actor=sender,
                payload=obj,
                payload_label=self.semantics.net.context.describe(obj),
            )
        )

    def step(self, text: str) -> None:
        match = _STEP.match(text.strip())
        if match is None:
            self.transition(*_split_actor(text.strip()))
            return
        op, argument = match["op"], match["arg"]
        if op == "tb":
            self.broadcast(*_split_actor(argument))
        elif op == "e":
            self.message(argument)
        else:
            try:
                blocks = int(argument)
            except ValueError:
                raise FiringError(f"expected a block count, got {argument!r}") from None
            if op == "d":
                self.fire(FiredTransition.delay(blocks))
            else:
                self.state = self.semantics.fire_reorg(self.state, blocks)
                self.fired.append(
                    FiredTransition(EdgeKind.REORG, actor=Actor.EXT, blocks=blocks)
                )


def replay(
    semantics: TraceNetSemantics, state: TraceNetState, steps: Sequence[str]
) -> tuple[TraceNetState, list[FiredTransition]]:
    """
    Fire snapshot steps from ``state``.

    Returns the reached state and the fired steps, with automatic broadcasts and
    confirmation waits made explicit.

    Raises:
        ReplayError: If a step is malformed or not fireable
    """
    replayer = _Replayer(semantics, state)
    for index, text in enumerate(steps):
        try:
            replayer.step(text)
        except (FiringError, KnowledgeError) as e:
            raise ReplayError(f"snapshot step {index} ({text!r}): {e}") from None
    if steps:
        logger.info("Replayed %d snapshot steps to %s", len(steps), replayer.state.describe())
    return replayer.state, replayer.fired
