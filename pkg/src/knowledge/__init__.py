"""
Symbolic actor knowledge.

Knowledge sets are immutable and closed under the deduction rules of the contract
(sweep derivation, signing and optional extensions such as adaptor signatures).
"""

from src.knowledge.context import ContractContext
from src.knowledge.deduction import Deducer, can_deduce_tx, witness_reveals
from src.knowledge.objects import (
    Actor,
    ActorKnowledge,
    AdaptorPriv,
    AdaptorPub,
    Digest,
    KnowledgeObject,
    PreSignature,
    Preimage,
    PrivKey,
    PubKey,
    Signature,
    Template,
)
from src.knowledge.rules import DEDUCTION_RULES, EXTENSIONS, derive_closure, rules_for

__all__ = [
    "Actor",
    "ActorKnowledge",
    "AdaptorPriv",
    "AdaptorPub",
    "ContractContext",
    "DEDUCTION_RULES",
    "Deducer",
    "Digest",
    "EXTENSIONS",
    "KnowledgeObject",
    "PreSignature",
    "Preimage",
    "PrivKey",
    "PubKey",
    "Signature",
    "Template",
    "can_deduce_tx",
    "derive_closure",
    "rules_for",
    "witness_reveals",
]
