"""
Contract context: the finite universe deduction works in.

The context is built once per contract from the declared templates, funding outputs,
key ownership and setup-phase pre-signatures. It precomputes every sweep template
(one per single-actor-controlled path of a funding or declared output) so that the
knowledge universe is finite and fixed before exploration starts.
"""

import logging
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field

from src.exceptions import DanglingPrevoutError, KnowledgeError
from src.knowledge.objects import (
    OBJECT_KINDS,
    Actor,
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
from src.miniscript.ast import pk
from src.txmodel.paths import (
    OutputResolver,
    Secrets,
    output_sat,
    path_controlled,
    permutations,
)
from src.txmodel.template import OutputRef, TxInput, TxOutput, TxTemplate

logger = logging.getLogger(__name__)


def sweep_label(source: str, path: int) -> str:
    return f"sweep({source}#{path})"


@dataclass(frozen=True, eq=False)
class ContractContext:
    """Templates, output resolution and the object universe of one contract."""

    templates: Mapping[str, TxTemplate]
    declared: tuple[str, ...]
    resolver: OutputResolver
    funding: Mapping[OutputRef, TxOutput]
    key_owners: Mapping[str, Actor]
    sweeps_from: Mapping[OutputRef, tuple[str, ...]]
    sweep_ids: frozenset[str]
    presigned: frozenset[tuple[str, str]]
    tx_signers: Mapping[str, frozenset[str]]
    universe: frozenset[KnowledgeObject]
    labels: Mapping[str, str] = field(default_factory=dict)

    @classmethod
    def build(
        cls,
        declared: Iterable[TxTemplate],
        funding: Mapping[OutputRef, TxOutput],
        key_owners: Mapping[str, Actor],
        digests: Iterable[str] = (),
        adaptors: Iterable[str] = (),
        presignatures: Iterable[PreSignature] = (),
    ) -> "ContractContext":
        """
        Build the context from declared data.

        Declared templates must be ordered so every prevout refers to a funding
        output or to an earlier template.

        Raises:
            DanglingPrevoutError: If a prevout does not resolve
            KnowledgeError: If a pre-signature references an unknown key or template
        """
        holdings = {
            actor: Secrets(
                keys=frozenset(k for k, owner in key_owners.items() if owner == actor)
            )
            for actor in Actor
        }
        templates: dict[str, TxTemplate] = {}
        resolver: dict[OutputRef, TxOutput] = dict(funding)
        source_labels: dict[OutputRef, str] = {ref: str(ref) for ref in funding}
        sweeps_from: dict[OutputRef, tuple[str, ...]] = {}
        sweep_ids: set[str] = set()
        declared_ids: list[str] = []

        def add_sweeps(ref: OutputRef) -> None:
            out = resolver[ref]
            found: list[str] = []
            for path, witness in enumerate(output_sat(out)):
                for actor in Actor:
                    if not path_controlled(witness, actor, holdings):
                        continue
                    sweep = TxTemplate(
                        sweep_label(source_labels[ref], path),
                        (TxInput(ref, path=path),),
                        (TxOutput(out.value, pk(witness.signature_keys[0])),),
                    )
                    templates.setdefault(sweep.id, sweep)
                    sweep_ids.add(sweep.id)
                    found.append(sweep.id)
            sweeps_from[ref] = tuple(found)

        for ref in sorted(funding):
            add_sweeps(ref)

        for tx in declared:
            for prevout in tx.prevouts:
                if prevout not in resolver:
                    raise DanglingPrevoutError(
                        f"{tx.label}: prevout {prevout} is neither funding nor an "
                        "output of an earlier template"
                    )
            declared_ids.append(tx.id)
            is_sweep = tx.id in sweep_ids
            templates[tx.id] = tx
            for index, out in enumerate(tx.outs):
                ref = tx.output_ref(index)
                resolver[ref] = out
                source_labels[ref] = f"{tx.label}:{index}"
                if not is_sweep:
                    add_sweeps(ref)

        # Sweep outputs are sinks but still resolvable.
        for sweep_id in sweep_ids:
            sweep = templates[sweep_id]
            resolver[sweep.output_ref(0)] = sweep.outs[0]

        tx_signers = {
            tx_id: frozenset(
                key
                for perm in permutations(tx, resolver)
                if perm.producible
                for witness in perm.choice
                for key in witness.signature_keys
            )
            for tx_id, tx in templates.items()
        }

        presigs = tuple(presignatures)
        for presig in presigs:
            if presig.tx not in templates:
                raise KnowledgeError(f"pre-signature over unknown template {presig.tx}")
            if presig.signer not in tx_signers[presig.tx]:
                raise KnowledgeError(
                    f"pre-signature by {presig.signer} over {templates[presig.tx].label}, "
                    "which never requires that key"
                )

        digest_list = tuple(digests)
        adaptor_list = tuple(adaptors)
        universe: set[KnowledgeObject] = set()
        universe.update(PrivKey(key) for key in key_owners)
        universe.update(PubKey(key) for key in key_owners)
        universe.update(Preimage(d) for d in digest_list)
        universe.update(Digest(d) for d in digest_list)
        universe.update(AdaptorPriv(a) for a in adaptor_list)
        universe.update(AdaptorPub(a) for a in adaptor_list)
        universe.update(presigs)
        universe.update(Template(tx_id) for tx_id in templates)
        universe.update(
            Signature(key, tx_id)
            for tx_id, signers in tx_signers.items()
            for key in signers
        )

        logger.debug(
            "Contract context: %d templates (%d sweeps), universe of %d objects",
            len(templates),
            len(sweep_ids),
            len(universe),
        )
        return cls(
            templates=templates,
            declared=tuple(declared_ids),
            resolver=resolver,
            funding=dict(funding),
            key_owners=dict(key_owners),
            sweeps_from=sweeps_from,
            sweep_ids=frozenset(sweep_ids),
            presigned=frozenset((p.signer, p.tx) for p in presigs),
            tx_signers=tx_signers,
            universe=frozenset(universe),
            labels={tx_id: tx.label for tx_id, tx in templates.items()},
        )

    def template(self, tx_id: str) -> TxTemplate:
        return self.templates[tx_id]

    def by_label(self, label: str) -> TxTemplate:
        for tx in self.templates.values():
            if tx.label == label:
                return tx
        raise KeyError(label)

    def is_sweep(self, tx_id: str) -> bool:
        return tx_id in self.sweep_ids

    def ref_label(self, ref: OutputRef) -> str:
        """Display name of an output, ``<tx label>:<index>``."""
        label = self.labels.get(ref.txid, ref.txid)
        return f"{label}:{ref.index}"

    def describe(self, obj: KnowledgeObject) -> str:
        """Render an object with template labels instead of digests."""
        if isinstance(obj, Template):
            return f"Template({self.labels[obj.tx]})"
        if isinstance(obj, Signature):
            return f"Signature({obj.key},{self.labels[obj.tx]})"
        if isinstance(obj, PreSignature):
            return f"PreSignature({obj.signer},{self.labels[obj.tx]},{obj.adaptor})"
        (value,) = vars(obj).values()
        return f"{type(obj).__name__}({value})"

    def parse_object(self, text: str) -> KnowledgeObject:
        """
        Inverse of describe().

        Raises:
            KnowledgeError: If the text does not name an object of the universe
        """
        text = text.replace(" ", "")
        kind, opening, rest = text.partition("(")
        if not opening or not rest.endswith(")") or kind not in OBJECT_KINDS:
            raise KnowledgeError(f"cannot parse knowledge object {text!r}")
        args = rest[:-1].split(",")
        try:
            if kind == "Template":
                obj: KnowledgeObject = Template(self.by_label(args[0]).id)
            elif kind == "Signature":
                obj = Signature(args[0], self.by_label(args[1]).id)
            elif kind == "PreSignature":
                obj = PreSignature(args[0], self.by_label(args[1]).id, args[2])
            else:
                (value,) = args
                obj = OBJECT_KINDS[kind](value)  # type: ignore[call-arg]
        except (KeyError, IndexError, ValueError):
            raise KnowledgeError(f"cannot parse knowledge object {text!r}") from None
        if obj not in self.universe:
            raise KnowledgeError(f"{text} is not part of the contract universe")
        return obj
