"""Contract state, fired transitions and execution parameters."""

from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field, replace
from enum import Enum

from src.knowledge.objects import Actor, ActorKnowledge, KnowledgeObject
from src.settings import DEFAULT_MESSAGE_KINDS


class EdgeKind(str, Enum):
    """Transition types of the symbolic execution phase."""

    MESSAGE = "message"
    BROADCAST = "broadcast"
    ONCHAIN = "onchain"
    DELAY = "delay"
    REORG = "reorg"


@dataclass(frozen=True)
class ExecutionParams:
    """Confirmation delays, reorg depth and the message allowlist."""

    conf_delay_int: int = 0
    conf_delay_ext: int = 0
    reorg_depth: int = 0
    message_kinds: frozenset[str] = frozenset(DEFAULT_MESSAGE_KINDS)

    def conf_delay(self, actor: Actor) -> int:
        return self.conf_delay_int if actor is Actor.INT else self.conf_delay_ext


@dataclass(frozen=True)
class PoolEntry:
    """A broadcast transaction waiting for confirmation."""

    transition: str
    actor: Actor
    height: int


@dataclass(frozen=True)
class Confirmation:
    """A confirmed transition with the arrival heights of the tokens it spent."""

    transition: str
    height: int
    spent: tuple[tuple[str, int], ...] = ()


@dataclass(frozen=True)
class FiredTransition:
    """
    One labelled step of a trace.

    Reorg steps carry the adversary's replacement branch as nested steps.
    """

    kind: EdgeKind
    actor: Actor | None = None
    transition: str | None = None
    payload: KnowledgeObject | None = None
    blocks: int = 0
    branch: tuple["FiredTransition", ...] = ()
    payload_label: str = field(default="", compare=False)

    def __str__(self) -> str:
        return self.label

    @property
    def label(self) -> str:
        match self.kind:
            case EdgeKind.MESSAGE:
                actor = self.actor.value if self.actor else "?"
                return f"e({actor}:{self.payload_label or self.payload})"
            case EdgeKind.BROADCAST:
                return f"tb({self.transition})"
            case EdgeKind.ONCHAIN:
                return str(self.transition)
            case EdgeKind.DELAY:
                return f"d({self.blocks})"
            case EdgeKind.REORG:
                inner = " ".join(step.label for step in self.branch)
                return f"r({self.blocks})[{inner}]"

    @property
    def owner(self) -> str:
        """Firing party: ``int``, ``ext`` or ``time``."""
        return self.actor.value if self.actor else "time"

    @classmethod
    def delay(cls, blocks: int) -> "FiredTransition":
        return cls(EdgeKind.DELAY, blocks=blocks)


def _sorted_pairs(pairs: Iterable[tuple[str, int]]) -> tuple[tuple[str, int], ...]:
    return tuple(sorted(pairs))


def sorted_history(history: Iterable[Confirmation]) -> tuple[Confirmation, ...]:
    return tuple(sorted(history, key=lambda c: (c.height, c.transition)))


def sorted_pool(pool: Iterable[PoolEntry]) -> tuple[PoolEntry, ...]:
    return tuple(sorted(pool, key=lambda e: (e.transition, e.actor.value)))


@dataclass(frozen=True)
class TraceNetState:
    """
    Knowledge pair, blockheight, marking, token arrivals, history and pool.

    Relative clocks are derived: a marked place's clock is the blocks elapsed since
    its token arrived and an unmarked place's clock is 0, for every arc it feeds.

    History and pool are kept sorted, so confirmations at one height compare equal
    whatever order they were fired in.
    """

    k_int: ActorKnowledge
    k_ext: ActorKnowledge
    height: int
    marking: frozenset[str]
    arrivals: tuple[tuple[str, int], ...] = ()
    history: tuple[Confirmation, ...] = ()
    pool: tuple[PoolEntry, ...] = ()

    @classmethod
    def create(
        cls,
        knowledge: Mapping[Actor, ActorKnowledge],
        height: int,
        arrivals: Mapping[str, int],
        history: Iterable[Confirmation] = (),
        pool: Iterable[PoolEntry] = (),
    ) -> "TraceNetState":
        return cls(
            k_int=knowledge[Actor.INT],
            k_ext=knowledge[Actor.EXT],
            height=height,
            marking=frozenset(arrivals),
            arrivals=_sorted_pairs(arrivals.items()),
            history=sorted_history(history),
            pool=sorted_pool(pool),
        )

    def knowledge(self, actor: Actor) -> ActorKnowledge:
        return self.k_int if actor is Actor.INT else self.k_ext

    def with_knowledge(self, actor: Actor, knowledge: ActorKnowledge) -> "TraceNetState":
        if actor is Actor.INT:
            return replace(self, k_int=knowledge)
        return replace(self, k_ext=knowledge)

    @property
    def arrival_map(self) -> dict[str, int]:
        return dict(self.arrivals)

    @property
    def chain(self) -> tuple[tuple[str, int], ...]:
        """Confirmed transitions with their heights."""
        return tuple((c.transition, c.height) for c in self.history)

    def older_clock(self, place: str) -> int:
        for marked, arrived in self.arrivals:
            if marked == place:
                return self.height - arrived
        return 0

    def pooled(self, transition: str) -> PoolEntry | None:
        return next((e for e in self.pool if e.transition == transition), None)

    def describe(self) -> str:
        return f"h={self.height} {{{', '.join(sorted(self.marking))}}}"
