"""Execution paths of outputs and transactions: witnesses, ownership, timing."""

from collections.abc import Mapping
from dataclasses import dataclass
from itertools import product

from src.exceptions import (
    DanglingPrevoutError,
    MiniscriptTypeError,
    MissingConfirmationError,
    TransactionError,
)
from src.miniscript.typecheck import MiniscriptType, type_check
from src.miniscript.witness import SymbolicWitness, sat
from src.txmodel.template import OutputRef, TxOutput, TxTemplate

OutputResolver = Mapping[OutputRef, TxOutput]


@dataclass(frozen=True)
class Secrets:
    """Private keys (by key id) and preimages (by digest) an actor holds."""

    keys: frozenset[str] = frozenset()
    preimages: frozenset[str] = frozenset()


@dataclass(frozen=True)
class WitnessPermutation:
    """One symbolic witness per input of a template, in input order."""

    tx: str
    choice: tuple[SymbolicWitness, ...]
    paths: tuple[int, ...]

    def input_older(self, template: TxTemplate) -> tuple[int, ...]:
        """Effective relative lock per input: script lock merged with the field."""
        return tuple(
            max(witness.older, tx_input.older)
            for witness, tx_input in zip(self.choice, template.ins, strict=True)
        )

    def tx_after(self, template: TxTemplate) -> int:
        """Effective absolute lock of the transaction."""
        return max([template.after, *(witness.after for witness in self.choice)])

    @property
    def producible(self) -> bool:
        return all(witness.producible for witness in self.choice)


def output_sat(out: TxOutput) -> tuple[SymbolicWitness, ...]:
    """
    Satisfying witnesses of an output script.

    Raises:
        MiniscriptTypeError: If the script is ill-typed or not of type B
    """
    script_type = type_check(out.script)
    if script_type != MiniscriptType.B:
        raise MiniscriptTypeError(str(out.script), MiniscriptType.B.value, script_type.value)
    return sat(out.script)


def resolve(resolver: OutputResolver, ref: OutputRef) -> TxOutput:
    try:
        return resolver[ref]
    except KeyError:
        raise DanglingPrevoutError(f"prevout {ref} does not resolve") from None


def input_choices(
    tx: TxTemplate, resolver: OutputResolver
) -> list[list[tuple[int, SymbolicWitness]]]:
    """Per input, the (path index, witness) alternatives allowed by commitments."""
    choices: list[list[tuple[int, SymbolicWitness]]] = []
    for tx_input in tx.ins:
        witnesses = output_sat(resolve(resolver, tx_input.prevout))
        if tx_input.path is None:
            choices.append(list(enumerate(witnesses)))
            continue
        if tx_input.path >= len(witnesses):
            raise TransactionError(
                f"{tx.label}: committed path {tx_input.path} of {tx_input.prevout} "
                f"exceeds its {len(witnesses)} paths"
            )
        choices.append([(tx_input.path, witnesses[tx_input.path])])
    return choices


def permutations(tx: TxTemplate, resolver: OutputResolver) -> list[WitnessPermutation]:
    """
    All witness permutations of a template, input-major.

    Inputs committed to a path contribute only that path.

    Raises:
        DanglingPrevoutError: If a prevout is not in the resolver
    """
    return [
        WitnessPermutation(
            tx=tx.id,
            choice=tuple(witness for _, witness in combination),
            paths=tuple(path for path, _ in combination),
        )
        for combination in product(*input_choices(tx, resolver))
    ]


def path_owned(witness: SymbolicWitness, secrets: Secrets) -> bool:
    """
    True iff the holder of ``secrets`` can satisfy every constraint of the path.

    Timelocks are ignored since waiting satisfies them; non-producible paths are
    never owned.
    """
    return (
        witness.producible
        and all(key in secrets.keys for key in witness.signature_keys)
        and all(digest in secrets.preimages for digest in witness.digests)
    )


def path_controlled(
    witness: SymbolicWitness, actor: str, holdings: Mapping[str, Secrets]
) -> bool:
    """True iff ``actor`` exclusively holds every signing key the path demands."""
    keys = witness.signature_keys
    if not keys or not witness.producible:
        return False
    own = holdings.get(actor, Secrets())
    if not all(key in own.keys for key in keys):
        return False
    return not any(
        key in secrets.keys
        for other, secrets in holdings.items()
        if other != actor
        for key in keys
    )


def earliest_broadcast(
    tx: TxTemplate,
    confirm_heights: Mapping[OutputRef, int],
    perm: WitnessPermutation | None = None,
) -> int:
    """
    First blockheight at which every lock of the transaction has released.

    With a permutation, the script locks of the chosen paths are included.

    Raises:
        MissingConfirmationError: If a prevout has no confirmation height
    """
    older = perm.input_older(tx) if perm else tuple(i.older for i in tx.ins)
    after = perm.tx_after(tx) if perm else tx.after
    releases = [after]
    for tx_input, lock in zip(tx.ins, older, strict=True):
        if tx_input.prevout not in confirm_heights:
            raise MissingConfirmationError(
                f"{tx.label}: prevout {tx_input.prevout} is not confirmed"
            )
        releases.append(confirm_heights[tx_input.prevout] + lock)
    return max(releases)
