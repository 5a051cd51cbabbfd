"""Closure caching and the transaction-level deduction queries."""

import logging
from collections.abc import Iterable
from functools import lru_cache

from src.knowledge.context import ContractContext
from src.knowledge.objects import (
    ActorKnowledge,
    KnowledgeObject,
    Preimage,
    Signature,
    Template,
)
from src.knowledge.rules import BUILTIN_RULES, derive_closure
from src.txmodel.paths import WitnessPermutation, permutations
from src.txmodel.template import TxTemplate

logger = logging.getLogger(__name__)


def perm_objects(perm: WitnessPermutation) -> frozenset[KnowledgeObject]:
    """The witness elements a permutation puts on chain."""
    objects: set[KnowledgeObject] = set()
    for witness in perm.choice:
        objects.update(Signature(key, perm.tx) for key in witness.signature_keys)
        objects.update(Preimage(digest) for digest in witness.digests)
    return frozenset(objects)


def can_deduce_tx(
    knowledge: ActorKnowledge, tx: TxTemplate, context: ContractContext
) -> list[WitnessPermutation]:
    """
    Permutations of ``tx`` whose every witness element the actor can produce.

    The actor must know the template; dissatisfactions needing a hash mismatch or an
    unmet lock are never produced.
    """
    if Template(tx.id) not in knowledge:
        return []
    return [
        perm
        for perm in permutations(tx, context.resolver)
        if perm.producible and perm_objects(perm) <= knowledge.objects
    ]


def witness_reveals(
    perm: WitnessPermutation, observer: ActorKnowledge
) -> frozenset[KnowledgeObject]:
    """Witness elements of ``perm`` the observer does not know yet."""
    return perm_objects(perm) - observer.objects


class Deducer:
    """
    Memoizing front end for closures over one contract.

    States share knowledge sets heavily, so closures and per-template deductions are
    cached by their frozen inputs.
    """

    def __init__(
        self, context: ContractContext, rules: Iterable[str] = BUILTIN_RULES
    ):
        self.context = context
        self.rules = tuple(rules)
        self._closure = lru_cache(maxsize=None)(self._compute_closure)
        self._deduce = lru_cache(maxsize=None)(self._compute_deduce)

    def _compute_closure(
        self, objects: frozenset[KnowledgeObject]
    ) -> frozenset[KnowledgeObject]:
        closed = derive_closure(objects, self.rules, self.context)
        if len(closed) > len(objects):
            logger.debug("Closure grew from %d to %d objects", len(objects), len(closed))
        return closed

    def _compute_deduce(
        self, knowledge: ActorKnowledge, tx_id: str
    ) -> tuple[WitnessPermutation, ...]:
        return tuple(can_deduce_tx(knowledge, self.context.template(tx_id), self.context))

    def closure(self, knowledge: ActorKnowledge) -> ActorKnowledge:
        return knowledge.with_objects(self._closure(knowledge.objects))

    def learn(
        self, knowledge: ActorKnowledge, objects: Iterable[KnowledgeObject]
    ) -> ActorKnowledge:
        """Add objects and close under the rules."""
        return knowledge.with_objects(self._closure(knowledge.objects | frozenset(objects)))

    def deducible(
        self, knowledge: ActorKnowledge, tx_id: str
    ) -> tuple[WitnessPermutation, ...]:
        return self._deduce(knowledge, tx_id)
