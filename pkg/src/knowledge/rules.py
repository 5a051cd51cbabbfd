"""
Deduction rules over actor knowledge.

Each rule maps a knowledge set to the objects it derives in one step. Rules are
registered by name; the built-in set covers sweep derivation and signing, and the
``adaptor`` extension adds pre-signature adaptation and secret extraction.
"""

import logging
from collections.abc import Callable, Iterable, Iterator

from src.exceptions import KnowledgeError
from src.knowledge.context import ContractContext
from src.knowledge.objects import (
    AdaptorPriv,
    KnowledgeObject,
    PreSignature,
    PrivKey,
    Signature,
    Template,
)

logger = logging.getLogger(__name__)

DeductionRule = Callable[
    [frozenset[KnowledgeObject], ContractContext], Iterable[KnowledgeObject]
]


def sweep_tx(
    known: frozenset[KnowledgeObject], context: ContractContext
) -> Iterator[KnowledgeObject]:
    """Sweep templates for controlled paths of outputs and prevouts of known templates."""
    for obj in known:
        if not isinstance(obj, Template) or context.is_sweep(obj.tx):
            continue
        tx = context.template(obj.tx)
        for ref in (*tx.output_refs, *tx.prevouts):
            for sweep_id in context.sweeps_from.get(ref, ()):
                yield Template(sweep_id)


def sign(
    known: frozenset[KnowledgeObject], context: ContractContext
) -> Iterator[KnowledgeObject]:
    """
    Signatures over known templates with held private keys.

    A (key, template) pair covered by a setup pre-signature is only obtainable
    through adaptation.
    """
    keys = [obj.key for obj in known if isinstance(obj, PrivKey)]
    for obj in known:
        if not isinstance(obj, Template):
            continue
        signers = context.tx_signers.get(obj.tx, frozenset())
        for key in keys:
            if key in signers and (key, obj.tx) not in context.presigned:
                yield Signature(key, obj.tx)


def adapt(
    known: frozenset[KnowledgeObject], context: ContractContext
) -> Iterator[KnowledgeObject]:
    """Pre-signature plus adaptor secret completes the signature."""
    for obj in known:
        if isinstance(obj, PreSignature) and AdaptorPriv(obj.adaptor) in known:
            yield Signature(obj.signer, obj.tx)


def extract(
    known: frozenset[KnowledgeObject], context: ContractContext
) -> Iterator[KnowledgeObject]:
    """Pre-signature plus the completed signature leaks the adaptor secret."""
    for obj in known:
        if isinstance(obj, PreSignature) and Signature(obj.signer, obj.tx) in known:
            yield AdaptorPriv(obj.adaptor)


DEDUCTION_RULES: dict[str, DeductionRule] = {
    "SweepTx": sweep_tx,
    "Sign": sign,
    "Adapt": adapt,
    "Ext": extract,
}

BUILTIN_RULES = ("SweepTx", "Sign")

# Extensions a contract can enable by name
EXTENSIONS: dict[str, tuple[str, ...]] = {
    "adaptor": ("Adapt", "Ext"),
}


def rules_for(extensions: Iterable[str]) -> tuple[str, ...]:
    """
    Rule names for the built-ins plus the named extensions.

    Raises:
        KnowledgeError: On an unknown extension
    """
    names = list(BUILTIN_RULES)
    for extension in extensions:
        if extension not in EXTENSIONS:
            raise KnowledgeError(f"unknown knowledge extension {extension!r}")
        names.extend(EXTENSIONS[extension])
    return tuple(names)


def derive_closure(
    objects: frozenset[KnowledgeObject],
    rules: Iterable[str],
    context: ContractContext,
) -> frozenset[KnowledgeObject]:
    """
    Least fixpoint of the named rules applied to ``objects``.

    Raises:
        KnowledgeError: If a rule is unknown or derives an object outside the universe
    """
    try:
        active = [DEDUCTION_RULES[name] for name in rules]
    except KeyError as e:
        raise KnowledgeError(f"unknown deduction rule {e.args[0]!r}") from None

    known = objects
    while True:
        derived: set[KnowledgeObject] = set()
        for rule in active:
            derived.update(obj for obj in rule(known, context) if obj not in known)
        if not derived:
            return known
        outside = derived - context.universe
        if outside:
            raise KnowledgeError(
                f"deduction left the contract universe: {sorted(map(str, outside))}"
            )
        known = known | derived
