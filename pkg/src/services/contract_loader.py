"""
Contract description loading and serialization.

Turns a validated ContractDocument into the domain objects the checker works on:
templates with content ids, the contract context and the per-actor setup knowledge.
"""

import logging
from collections.abc import Mapping
from dataclasses import dataclass, field
from pathlib import Path

import networkx as nx

from src.exceptions import (
    ContractValidationError,
    KnowledgeError,
    MiniscriptError,
    TransactionError,
)
from src.knowledge.context import ContractContext
from src.knowledge.objects import (
    OBJECT_KINDS,
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
from src.knowledge.rules import rules_for
from src.miniscript.ast import MiniscriptNode, NodeKind, normalize_digest, parse_miniscript
from src.miniscript.typecheck import MiniscriptType, type_check
from src.schemas.contract import ContractDocument, TemplateDocument
from src.txmodel.template import OutputRef, TxInput, TxOutput, TxTemplate

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ContractDescription:
    """A loaded contract: the source document plus everything derived from it."""

    document: ContractDocument
    context: ContractContext = field(compare=False, repr=False)
    rules: tuple[str, ...]
    knowledge: Mapping[Actor, ActorKnowledge]
    confirmations: Mapping[OutputRef, int]
    initial_height: int

    @property
    def name(self) -> str:
        return self.document.name

    @property
    def templates(self) -> tuple[TxTemplate, ...]:
        """Declared templates in dependency order."""
        return tuple(self.context.template(tx_id) for tx_id in self.context.declared)


class _Builder:
    """Validates one document and assembles its domain objects."""

    def __init__(self, document: ContractDocument):
        self.document = document
        self.key_owners: dict[str, Actor] = {}
        self.digests: set[str] = set()
        self.by_label: dict[str, TxTemplate] = {}
        self.funding: dict[OutputRef, TxOutput] = {}

    def build(self) -> ContractDescription:
        self._collect_secrets()
        self._collect_funding()
        for label in self._template_order():
            self._add_template(self._template_document(label))
        context = self._build_context()
        try:
            rules = rules_for(self.document.extensions)
        except KnowledgeError as e:
            raise ContractValidationError("extensions", str(e)) from None
        self._check_message_kinds()

        knowledge = {actor: self._setup_knowledge(actor, context) for actor in Actor}
        confirmations = {
            OutputRef(f.txid, f.index): f.confirmed_height
            for f in self.document.funding
            if f.confirmed_height is not None
        }
        return ContractDescription(
            document=self.document,
            context=context,
            rules=rules,
            knowledge=knowledge,
            confirmations=confirmations,
            initial_height=self.document.initial_height,
        )

    # Declarations

    def _collect_secrets(self) -> None:
        for actor, setup in self.document.actors.items():
            for key in setup.keys:
                owner = self.key_owners.setdefault(key, actor)
                if owner != actor:
                    raise ContractValidationError(
                        "knowledge-consistency",
                        f"private key {key} is declared by both actors",
                    )
        try:
            self.digests = {normalize_digest(d) for d in self.document.digests}
        except MiniscriptError as e:
            raise ContractValidationError("references", str(e)) from None

        for actor, setup in self.document.actors.items():
            for digest in setup.preimages:
                if digest not in self.digests:
                    raise ContractValidationError(
                        "references", f"{actor.value} holds preimage of undeclared {digest}"
                    )
            for adaptor in setup.adaptor_secrets:
                if adaptor not in self.document.adaptors:
                    raise ContractValidationError(
                        "references",
                        f"{actor.value} holds secret of undeclared adaptor {adaptor}",
                    )

    def _collect_funding(self) -> None:
        for entry in self.document.funding:
            ref = OutputRef(entry.txid, entry.index)
            if ref in self.funding:
                raise ContractValidationError("unique-ids", f"funding output {ref} twice")
            if (
                entry.confirmed_height is not None
                and entry.confirmed_height > self.document.initial_height
            ):
                raise ContractValidationError(
                    "chain-state",
                    f"funding output {ref} confirms at {entry.confirmed_height}, "
                    f"after the initial height {self.document.initial_height}",
                )
            self.funding[ref] = TxOutput(entry.value, self._script(entry.script, str(ref)))

    def _script(self, text: str, where: str) -> MiniscriptNode:
        try:
            node = parse_miniscript(text)
            script_type = type_check(node)
        except MiniscriptError as e:
            raise ContractValidationError("script", f"{where}: {e}") from None
        if script_type != MiniscriptType.B:
            raise ContractValidationError(
                "script", f"{where}: output script has type {script_type.value}, expected B"
            )
        for leaf in node.walk():
            if leaf.kind == NodeKind.PK and leaf.payload not in self.key_owners:
                raise ContractValidationError(
                    "references", f"{where}: key {leaf.payload} is not declared"
                )
            if leaf.kind == NodeKind.SHA256 and leaf.payload not in self.digests:
                raise ContractValidationError(
                    "references", f"{where}: digest {leaf.payload} is not declared"
                )
        return node

    # Templates

    def _template_document(self, label: str) -> TemplateDocument:
        return next(t for t in self.document.templates if t.label == label)

    def _template_order(self) -> list[str]:
        """Template labels with every template after the ones it spends from."""
        funding_ids = {ref.txid for ref in self.funding}
        graph: nx.DiGraph = nx.DiGraph()
        position: dict[str, int] = {}
        for index, tpl in enumerate(self.document.templates):
            if tpl.label in position or tpl.label in funding_ids:
                raise ContractValidationError(
                    "unique-ids", f"label {tpl.label} is declared more than once"
                )
            position[tpl.label] = index
            graph.add_node(tpl.label)
        for tpl in self.document.templates:
            for tx_input in tpl.inputs:
                source = tx_input.prevout.rpartition(":")[0]
                if source in position:
                    graph.add_edge(source, tpl.label)
                elif source not in funding_ids:
                    raise ContractValidationError(
                        "references",
                        f"{tpl.label}: prevout {tx_input.prevout} names no funding "
                        "output or template",
                    )
        if not nx.is_directed_acyclic_graph(graph):
            cycle = nx.find_cycle(graph)
            raise ContractValidationError(
                "acyclic", "templates spend each other: " + " -> ".join(u for u, _ in cycle)
            )
        return list(nx.lexicographical_topological_sort(graph, key=position.__getitem__))

    def _resolve(self, prevout: str, where: str) -> tuple[OutputRef, TxOutput]:
        source, _, index_text = prevout.rpartition(":")
        index = int(index_text)
        if source in self.by_label:
            tx = self.by_label[source]
            if index >= len(tx.outs):
                raise ContractValidationError(
                    "references", f"{where}: {source} has no output {index}"
                )
            return tx.output_ref(index), tx.outs[index]
        ref = OutputRef(source, index)
        if ref not in self.funding:
            raise ContractValidationError(
                "references", f"{where}: funding output {prevout} is not declared"
            )
        return ref, self.funding[ref]

    def _add_template(self, tpl: TemplateDocument) -> None:
        inputs: list[TxInput] = []
        spent = 0
        for tx_input in tpl.inputs:
            ref, out = self._resolve(tx_input.prevout, tpl.label)
            spent += out.value
            inputs.append(TxInput(ref, older=tx_input.older, path=tx_input.path))
        outputs = tuple(
            TxOutput(out.value, self._script(out.script, f"{tpl.label}:{index}"))
            for index, out in enumerate(tpl.outputs)
        )
        try:
            tx = TxTemplate(tpl.label, tuple(inputs), outputs, after=tpl.after)
        except TransactionError as e:
            raise ContractValidationError("template", str(e)) from None
        if tx.total_out != spent:
            raise ContractValidationError(
                "value-conservation",
                f"{tpl.label} spends {spent} but pays out {tx.total_out}",
            )
        if any(other.id == tx.id for other in self.by_label.values()):
            raise ContractValidationError(
                "unique-ids", f"{tpl.label} duplicates the content of another template"
            )
        self.by_label[tpl.label] = tx

    # Knowledge

    def _build_context(self) -> ContractContext:
        presignatures = []
        for presig in self.document.presignatures:
            tx = self._labelled(presig.template, "pre-signature")
            if presig.signer not in self.key_owners:
                raise ContractValidationError(
                    "references", f"pre-signature by undeclared key {presig.signer}"
                )
            if presig.adaptor not in self.document.adaptors:
                raise ContractValidationError(
                    "references", f"pre-signature with undeclared adaptor {presig.adaptor}"
                )
            presignatures.append(PreSignature(presig.signer, tx.id, presig.adaptor))
        try:
            return ContractContext.build(
                self.by_label.values(),
                self.funding,
                self.key_owners,
                digests=sorted(self.digests),
                adaptors=self.document.adaptors,
                presignatures=presignatures,
            )
        except (TransactionError, KnowledgeError, MiniscriptError) as e:
            raise ContractValidationError("references", str(e)) from None

    def _labelled(self, label: str, what: str) -> TxTemplate:
        if label not in self.by_label:
            raise ContractValidationError(
                "references", f"{what} names unknown template {label}"
            )
        return self.by_label[label]

    def _setup_knowledge(self, actor: Actor, context: ContractContext) -> ActorKnowledge:
        setup = self.document.actors[actor]
        objects: set[KnowledgeObject] = set()
        objects.update(PrivKey(key) for key in setup.keys)
        objects.update(PubKey(key) for key in self.key_owners)
        objects.update(Preimage(d) for d in setup.preimages)
        objects.update(Digest(d) for d in self.digests)
        objects.update(AdaptorPriv(a) for a in setup.adaptor_secrets)
        objects.update(AdaptorPub(a) for a in self.document.adaptors)
        objects.update(
            PreSignature(p.signer, self.by_label[p.template].id, p.adaptor)
            for p in self.document.presignatures
            if actor in p.known_by
        )
        for signature in setup.signatures:
            tx = self._labelled(signature.template, "setup signature")
            obj = Signature(signature.key, tx.id)
            if obj not in context.universe:
                raise ContractValidationError(
                    "references",
                    f"{signature.key} never signs {signature.template}",
                )
            objects.add(obj)
        labels = setup.templates if setup.templates is not None else list(self.by_label)
        objects.update(
            Template(self._labelled(label, f"{actor.value} setup").id) for label in labels
        )
        return ActorKnowledge(actor, frozenset(objects))

    def _check_message_kinds(self) -> None:
        for kind in self.document.message_kinds or ():
            if kind not in OBJECT_KINDS:
                raise ContractValidationError(
                    "message-kinds", f"unknown knowledge object kind {kind!r}"
                )


def build_contract(document: ContractDocument) -> ContractDescription:
    """
    Validate an already parsed document and derive its domain objects.

    Raises:
        ContractValidationError: If the document violates a contract invariant
    """
    return _Builder(document).build()


def parse_contract(text: str) -> ContractDescription:
    """
    Parse and validate a contract description from JSON text.

    Raises:
        pydantic.ValidationError: If the text is not a well-formed document
        ContractValidationError: If the document violates a contract invariant
    """
    return build_contract(ContractDocument.model_validate_json(text))


def load_contract(path: str | Path) -> ContractDescription:
    """Load a contract description file."""
    description = parse_contract(Path(path).read_text(encoding="utf-8"))
    logger.info(
        "Loaded contract %s: %d declared templates, %d in the universe",
        description.name,
        len(description.context.declared),
        len(description.context.templates),
    )
    return description


def serialize_contract(description: ContractDescription) -> str:
    """Render a contract back to its versioned JSON document."""
    return description.document.model_dump_json(indent=2) + "\n"
