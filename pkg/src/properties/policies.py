"""Safety policies scored on the verifier's settled states."""

import re
from collections.abc import Callable
from dataclasses import dataclass
from typing import Protocol

from src.exceptions import KnowledgeError, PolicyError
from src.knowledge.context import ContractContext
from src.knowledge.objects import Actor, ActorKnowledge, KnowledgeObject
from src.semantics.state import TraceNetState
from src.tracenet.net import TraceNet
from src.txmodel.paths import output_sat, path_owned

_POLICY = re.compile(r"^(?P<kind>balance|secret):(?P<actor>int|ext):(?P<arg>.+)$")


class SafetyPolicy(Protocol):
    """Predicate over a settled state."""

    @property
    def description(self) -> str: ...

    def holds(self, state: TraceNetState, net: TraceNet) -> bool: ...


def owned_balance(state: TraceNetState, net: TraceNet, actor: Actor) -> int:
    """Total value of marked outputs the actor can spend alone on every path."""
    secrets = state.knowledge(actor).secrets
    total = 0
    for place in state.marking:
        output = net.output(place)
        if all(path_owned(witness, secrets) for witness in output_sat(output)):
            total += output.value
    return total


@dataclass(frozen=True)
class BalancePolicy:
    actor: Actor
    minimum: int

    @property
    def description(self) -> str:
        return f"balance:{self.actor.value}:{self.minimum}"

    def holds(self, state: TraceNetState, net: TraceNet) -> bool:
        return owned_balance(state, net, self.actor) >= self.minimum


@dataclass(frozen=True)
class SecretPolicy:
    """The object must stay unknown to the actor."""

    actor: Actor
    obj: KnowledgeObject
    label: str

    @property
    def description(self) -> str:
        return f"secret:{self.actor.value}:{self.label}"

    def holds(self, state: TraceNetState, net: TraceNet) -> bool:
        return self.obj not in state.knowledge(self.actor)


@dataclass(frozen=True)
class PredicatePolicy:
    """Arbitrary predicate over both knowledge sets and the marking."""

    description: str
    predicate: Callable[[ActorKnowledge, ActorKnowledge, frozenset[str]], bool]

    def holds(self, state: TraceNetState, net: TraceNet) -> bool:
        return self.predicate(state.k_int, state.k_ext, state.marking)


def parse_policy(text: str, context: ContractContext) -> SafetyPolicy:
    """
    Parse ``balance:<actor>:<min>`` or ``secret:<actor>:<object>``.

    Raises:
        PolicyError: If the text matches neither form
    """
    match = _POLICY.match(text.strip())
    if match is None:
        raise PolicyError(
            f"unknown policy {text!r}, expected balance:<actor>:<min> "
            "or secret:<actor>:<object>"
        )
    actor = Actor(match["actor"])
    argument = match["arg"]
    if match["kind"] == "balance":
        try:
            minimum = int(argument)
        except ValueError:
            raise PolicyError(f"balance minimum must be an integer, got {argument!r}") from None
        if minimum < 0:
            raise PolicyError(f"balance minimum must be >= 0, got {minimum}")
        return BalancePolicy(actor, minimum)
    try:
        obj = context.parse_object(argument)
    except KnowledgeError as e:
        raise PolicyError(str(e)) from None
    return SecretPolicy(actor, obj, context.describe(obj))
