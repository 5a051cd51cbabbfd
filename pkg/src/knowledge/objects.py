"""Symbolic knowledge objects and per-actor knowledge sets."""

from dataclasses import astuple, dataclass
from enum import Enum

from src.txmodel.paths import Secrets


class Actor(str, Enum):
    """The verifying actor and its adversarial counterparty."""

    INT = "int"
    EXT = "ext"

    @property
    def other(self) -> "Actor":
        return Actor.EXT if self is Actor.INT else Actor.INT


@dataclass(frozen=True)
class PrivKey:
    key: str


@dataclass(frozen=True)
class PubKey:
    key: str


@dataclass(frozen=True)
class Preimage:
    digest: str


@dataclass(frozen=True)
class Digest:
    digest: str


@dataclass(frozen=True)
class Template:
    tx: str


@dataclass(frozen=True)
class Signature:
    """Signature by ``key`` over template ``tx``."""

    key: str
    tx: str


@dataclass(frozen=True)
class PreSignature:
    """Pre-signature by ``signer`` over ``tx``, adapted with adaptor key ``adaptor``."""

    signer: str
    tx: str
    adaptor: str


@dataclass(frozen=True)
class AdaptorPriv:
    adaptor: str


@dataclass(frozen=True)
class AdaptorPub:
    adaptor: str


KnowledgeObject = (
    PrivKey
    | PubKey
    | Preimage
    | Digest
    | Template
    | Signature
    | PreSignature
    | AdaptorPriv
    | AdaptorPub
)

OBJECT_KINDS: dict[str, type[KnowledgeObject]] = {
    kind.__name__: kind
    for kind in (
        PrivKey,
        PubKey,
        Preimage,
        Digest,
        Template,
        Signature,
        PreSignature,
        AdaptorPriv,
        AdaptorPub,
    )
}


def kind_of(obj: KnowledgeObject) -> str:
    return type(obj).__name__


def object_sort_key(obj: KnowledgeObject) -> tuple[str, tuple[object, ...]]:
    return kind_of(obj), astuple(obj)


@dataclass(frozen=True)
class ActorKnowledge:
    """Immutable snapshot of what one actor knows."""

    actor: Actor
    objects: frozenset[KnowledgeObject] = frozenset()

    def __contains__(self, obj: object) -> bool:
        return obj in self.objects

    def __len__(self) -> int:
        return len(self.objects)

    def with_objects(self, objects: frozenset[KnowledgeObject]) -> "ActorKnowledge":
        return ActorKnowledge(self.actor, objects)

    def sorted_objects(self) -> list[KnowledgeObject]:
        return sorted(self.objects, key=object_sort_key)

    @property
    def secrets(self) -> Secrets:
        """Private keys and preimages, the inputs to path ownership."""
        return Secrets(
            keys=frozenset(o.key for o in self.objects if isinstance(o, PrivKey)),
            preimages=frozenset(
                o.digest for o in self.objects if isinstance(o, Preimage)
            ),
        )
