"""
Unsigned transaction templates.

A template is identified by a digest of its structured content:
- inputs as (prevout, older, committed path)
- outputs as (value, compiled script)
- the transaction-level after lock

The human-readable label is not part of the digest. Per-input locks are relative
(``older``, minimum prevout age) and the transaction lock is absolute (``after``,
minimum blockheight).
"""

import hashlib
import json
from dataclasses import dataclass, field

from src.exceptions import TransactionError
from src.miniscript.ast import MiniscriptNode
from src.miniscript.script import compile_to_script


@dataclass(frozen=True, order=True)
class OutputRef:
    """(txid, index) reference to a transaction output."""

    txid: str
    index: int

    def __str__(self) -> str:
        return f"{self.txid}:{self.index}"


@dataclass(frozen=True)
class TxOutput:
    """Value locked by a spending condition."""

    value: int
    script: MiniscriptNode

    def __post_init__(self) -> None:
        if self.value < 0:
            raise TransactionError(f"output value must be >= 0, got {self.value}")


@dataclass(frozen=True)
class TxInput:
    """
    Reference to a spent output.

    ``path`` commits the input to one execution path of the spent script (an index
    into its satisfying witnesses); None leaves every path open.
    """

    prevout: OutputRef
    older: int = 0
    path: int | None = None

    def __post_init__(self) -> None:
        if self.older < 0:
            raise TransactionError(f"input older lock must be >= 0, got {self.older}")
        if self.path is not None and self.path < 0:
            raise TransactionError(f"committed path must be >= 0, got {self.path}")


def _encode(
    ins: tuple[TxInput, ...], outs: tuple[TxOutput, ...], after: int
) -> bytes:
    document = {
        "ins": [
            [i.prevout.txid, i.prevout.index, i.older, i.path] for i in ins
        ],
        "outs": [
            [o.value, [str(opcode) for opcode in compile_to_script(o.script)]]
            for o in outs
        ],
        "after": after,
    }
    return json.dumps(document, separators=(",", ":"), sort_keys=True).encode()


def template_id(
    ins: tuple[TxInput, ...], outs: tuple[TxOutput, ...], after: int
) -> str:
    """Canonical content digest of a template."""
    return hashlib.sha256(_encode(ins, outs, after)).hexdigest()


@dataclass(frozen=True)
class TxTemplate:
    """Unsigned transaction; ``id`` is derived from the content on construction."""

    label: str = field(compare=False)
    ins: tuple[TxInput, ...]
    outs: tuple[TxOutput, ...]
    after: int = 0
    id: str = field(init=False)

    def __post_init__(self) -> None:
        if not self.ins or not self.outs:
            raise TransactionError(
                f"{self.label}: a template needs at least one input and one output"
            )
        prevouts = [tx_input.prevout for tx_input in self.ins]
        if len(set(prevouts)) != len(prevouts):
            raise TransactionError(f"{self.label}: two inputs spend the same prevout")
        if self.after < 0:
            raise TransactionError(f"{self.label}: after lock must be >= 0")
        object.__setattr__(self, "id", template_id(self.ins, self.outs, self.after))

    def __str__(self) -> str:
        return self.label

    def output_ref(self, index: int) -> OutputRef:
        return OutputRef(self.id, index)

    @property
    def output_refs(self) -> tuple[OutputRef, ...]:
        return tuple(self.output_ref(index) for index in range(len(self.outs)))

    @property
    def prevouts(self) -> tuple[OutputRef, ...]:
        return tuple(tx_input.prevout for tx_input in self.ins)

    @property
    def total_out(self) -> int:
        return sum(out.value for out in self.outs)
