"""
Trace net construction.

Places stand for transaction outputs and transitions for witness permutations of
templates. Several transitions may read the same place: they are alternative ways of
spending one output, and the marking semantics let at most one of them fire on any
single chain history.
"""

import logging
from collections import Counter
from collections.abc import Iterable, Mapping
from dataclasses import dataclass

from src.exceptions import NetConstructionError, TransactionError
from src.knowledge.context import ContractContext
from src.txmodel.paths import WitnessPermutation, permutations
from src.txmodel.template import OutputRef, TxOutput

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Place:
    """A transaction output, named ``<tx label>:<index>``."""

    id: str
    source: OutputRef


@dataclass(frozen=True)
class InputArc:
    """Arc from a place into a transition with its earliest-firing bounds."""

    place: str
    older: int
    after: int


@dataclass(frozen=True)
class NetTransition:
    """One witness permutation of one template."""

    id: str
    tx: str
    perm: WitnessPermutation
    inputs: tuple[InputArc, ...]
    outputs: tuple[str, ...]

    def __str__(self) -> str:
        return self.id

    @property
    def after(self) -> int:
        return max(arc.after for arc in self.inputs)

    @property
    def input_places(self) -> tuple[str, ...]:
        return tuple(arc.place for arc in self.inputs)


@dataclass(frozen=True, eq=False)
class TraceNet:
    """Places, transitions, initial marking and initial blockheight of a contract."""

    context: ContractContext
    places: Mapping[str, Place]
    transitions: Mapping[str, NetTransition]
    m0: frozenset[str]
    b0: int
    arrivals0: Mapping[str, int]

    def output(self, place: str) -> TxOutput:
        return self.context.resolver[self.places[place].source]

    def spenders(self, place: str) -> tuple[NetTransition, ...]:
        return tuple(t for t in self.transitions.values() if place in t.input_places)

    @property
    def older_bounds(self) -> tuple[int, ...]:
        return tuple(arc.older for t in self.transitions.values() for arc in t.inputs)

    @property
    def after_bounds(self) -> tuple[int, ...]:
        return tuple(t.after for t in self.transitions.values())


def required_tokens(t: NetTransition) -> Counter[str]:
    """Token demand of a transition; places it does not read count 0."""
    return Counter(t.input_places)


def _place_for(
    ref: OutputRef,
    context: ContractContext,
    places: dict[str, Place],
    by_ref: dict[OutputRef, str],
) -> str:
    if ref in by_ref:
        return by_ref[ref]
    if ref not in context.resolver:
        raise NetConstructionError(f"prevout {ref} does not resolve to an output")
    place_id = context.ref_label(ref)
    if place_id in places:
        raise NetConstructionError(
            f"outputs {places[place_id].source} and {ref} share the place {place_id}"
        )
    places[place_id] = Place(place_id, ref)
    by_ref[ref] = place_id
    return place_id


def build_tracenet(
    context: ContractContext,
    templates: Iterable[str],
    confirmations: Mapping[OutputRef, int],
    b0: int,
) -> TraceNet:
    """
    Build the net for the given template ids.

    Every funding output gets a place; those with a confirmation height start marked.
    Each producible witness permutation of a template becomes a transition, suffixed
    ``/<k>`` when a template has more than one.

    Raises:
        NetConstructionError: On a dangling prevout or two outputs sharing a place
    """
    included = set(templates)
    places: dict[str, Place] = {}
    by_ref: dict[OutputRef, str] = {}
    transitions: dict[str, NetTransition] = {}

    for ref in sorted(context.funding):
        _place_for(ref, context, places, by_ref)

    for tx_id, tx in context.templates.items():
        if tx_id not in included:
            continue
        ins = [_place_for(ref, context, places, by_ref) for ref in tx.prevouts]
        outs = tuple(_place_for(ref, context, places, by_ref) for ref in tx.output_refs)
        try:
            perms = [perm for perm in permutations(tx, context.resolver) if perm.producible]
        except TransactionError as e:
            raise NetConstructionError(str(e)) from None
        for k, perm in enumerate(perms):
            after = perm.tx_after(tx)
            t_id = tx.label if len(perms) == 1 else f"{tx.label}/{k}"
            transitions[t_id] = NetTransition(
                id=t_id,
                tx=tx_id,
                perm=perm,
                inputs=tuple(
                    InputArc(place, older, after)
                    for place, older in zip(ins, perm.input_older(tx), strict=True)
                ),
                outputs=outs,
            )

    marked = {
        by_ref[ref]: height for ref, height in sorted(confirmations.items()) if ref in by_ref
    }
    net = TraceNet(
        context=context,
        places=places,
        transitions=transitions,
        m0=frozenset(marked),
        b0=b0,
        arrivals0=marked,
    )
    logger.info(
        "Built trace net with %d places and %d transitions", len(places), len(transitions)
    )
    return net
