"""
Symbolic satisfaction of fragments.

A symbolic witness is a conjunction of constraint terms over the witness stack of a
spending input. Composition with ``+`` concatenates two witnesses: the left operand
keeps the low stack slots and the right operand's slots are shifted above it, so

    sat(andor(pk(A), sha256(H), ...)) starts with sat(sha256(H)) + sat(pk(A))
                                       = [HashEq(0, H), Sig(1, A)]

Timelock terms carry no slot. Met locks of one kind merge by maximum and unmet locks
(dissatisfactions of older/after) merge by minimum; a witness with an unmet lock or a
hash mismatch can never be produced and only exists for composition bookkeeping.
"""

from dataclasses import dataclass, replace
from functools import cache
from itertools import product

from src.exceptions import DsatUndefinedError
from src.miniscript.ast import MiniscriptNode, NodeKind
from src.miniscript.typecheck import MiniscriptType, type_check


@dataclass(frozen=True)
class Sig:
    """Slot holds a signature for the key."""

    slot: int
    key: str

    def __str__(self) -> str:
        return f"sig w{self.slot} {self.key}"


@dataclass(frozen=True)
class HashEq:
    """Slot holds the preimage of the digest, or anything else when mismatch is set."""

    slot: int
    digest: str
    mismatch: bool = False

    def __str__(self) -> str:
        relation = "!=" if self.mismatch else "="
        return f"sha256 w{self.slot} {relation} {self.digest}"


@dataclass(frozen=True)
class SizeEq:
    slot: int
    size: int

    def __str__(self) -> str:
        return f"size w{self.slot} = {self.size}"


@dataclass(frozen=True)
class ConstEq:
    slot: int
    value: int

    def __str__(self) -> str:
        return f"w{self.slot} = {self.value}"


@dataclass(frozen=True)
class After:
    """Absolute lock: blockheight >= height (or < height when unmet)."""

    height: int
    unmet: bool = False

    def __str__(self) -> str:
        return f"after {'<' if self.unmet else '>='} {self.height}"


@dataclass(frozen=True)
class Older:
    """Relative lock: prevout age >= blocks (or < blocks when unmet)."""

    blocks: int
    unmet: bool = False

    def __str__(self) -> str:
        return f"older {'<' if self.unmet else '>='} {self.blocks}"


SlotTerm = Sig | HashEq | SizeEq | ConstEq
ConstraintTerm = Sig | HashEq | SizeEq | ConstEq | After | Older


def _merged_bound(values: list[int], unmet: bool) -> list[int]:
    if not values:
        return []
    return [min(values) if unmet else max(values)]


def _normalize(terms: list[ConstraintTerm]) -> tuple[ConstraintTerm, ...]:
    slot_terms: list[SlotTerm] = sorted(
        (term for term in terms if not isinstance(term, (After, Older))),
        key=lambda term: term.slot,
    )
    locks: list[ConstraintTerm] = []
    for unmet in (False, True):
        heights = [t.height for t in terms if isinstance(t, After) and t.unmet == unmet]
        locks.extend(After(h, unmet) for h in _merged_bound(heights, unmet))
    for unmet in (False, True):
        blocks = [t.blocks for t in terms if isinstance(t, Older) and t.unmet == unmet]
        locks.extend(Older(b, unmet) for b in _merged_bound(blocks, unmet))
    return (*slot_terms, *locks)


@dataclass(frozen=True)
class SymbolicWitness:
    """One execution path of a script as constraints on the witness stack."""

    terms: tuple[ConstraintTerm, ...]
    slot_count: int

    @classmethod
    def of(cls, *terms: ConstraintTerm) -> "SymbolicWitness":
        slots = {term.slot for term in terms if not isinstance(term, (After, Older))}
        return cls(_normalize(list(terms)), len(slots))

    def __add__(self, other: "SymbolicWitness") -> "SymbolicWitness":
        shifted = [
            term
            if isinstance(term, (After, Older))
            else replace(term, slot=term.slot + self.slot_count)
            for term in other.terms
        ]
        return SymbolicWitness(
            _normalize([*self.terms, *shifted]), self.slot_count + other.slot_count
        )

    def __str__(self) -> str:
        return "[" + ", ".join(str(term) for term in self.terms) + "]"

    @property
    def producible(self) -> bool:
        """False when the witness requires a hash mismatch or an unmet lock."""
        return not any(
            (isinstance(term, HashEq) and term.mismatch)
            or (isinstance(term, (After, Older)) and term.unmet)
            for term in self.terms
        )

    @property
    def signature_keys(self) -> tuple[str, ...]:
        return tuple(term.key for term in self.terms if isinstance(term, Sig))

    @property
    def digests(self) -> tuple[str, ...]:
        return tuple(
            term.digest
            for term in self.terms
            if isinstance(term, HashEq) and not term.mismatch
        )

    @property
    def older(self) -> int:
        """Relative lock demanded by the path, 0 when none."""
        return next(
            (t.blocks for t in self.terms if isinstance(t, Older) and not t.unmet), 0
        )

    @property
    def after(self) -> int:
        """Absolute lock demanded by the path, 0 when none."""
        return next(
            (t.height for t in self.terms if isinstance(t, After) and not t.unmet), 0
        )


def _compose(
    left: tuple[SymbolicWitness, ...], right: tuple[SymbolicWitness, ...]
) -> list[SymbolicWitness]:
    return [a + b for b, a in product(right, left)]


def _unique(witnesses: list[SymbolicWitness]) -> tuple[SymbolicWitness, ...]:
    return tuple(dict.fromkeys(witnesses))


@cache
def _sat(node: MiniscriptNode) -> tuple[SymbolicWitness, ...]:
    if node.kind == NodeKind.PK:
        assert isinstance(node.payload, str)
        return (SymbolicWitness.of(Sig(0, node.payload)),)
    if node.kind == NodeKind.SHA256:
        assert isinstance(node.payload, str)
        return (SymbolicWitness.of(HashEq(0, node.payload)),)
    if node.kind == NodeKind.OLDER:
        assert isinstance(node.payload, int)
        return (SymbolicWitness.of(Older(node.payload)),)
    if node.kind == NodeKind.AFTER:
        assert isinstance(node.payload, int)
        return (SymbolicWitness.of(After(node.payload)),)
    if node.kind == NodeKind.VERIFY:
        return _sat(node.children[0])
    if node.kind == NodeKind.AND_V:
        x, y = node.children
        return _unique(_compose(_sat(y), _sat(x)))

    x, y, z = node.children
    return _unique(_compose(_sat(y), _sat(x)) + _compose(_sat(z), _dsat(x)))


@cache
def _dsat(node: MiniscriptNode) -> tuple[SymbolicWitness, ...]:
    if type_check(node) == MiniscriptType.V:
        raise DsatUndefinedError(f"{node} has type V and no dissatisfaction")
    if node.kind == NodeKind.PK:
        return (SymbolicWitness.of(ConstEq(0, 0)),)
    if node.kind == NodeKind.SHA256:
        assert isinstance(node.payload, str)
        return (
            SymbolicWitness.of(SizeEq(0, 32), HashEq(0, node.payload, mismatch=True)),
        )
    if node.kind == NodeKind.OLDER:
        assert isinstance(node.payload, int)
        return (SymbolicWitness.of(Older(node.payload, unmet=True)),)
    if node.kind == NodeKind.AFTER:
        assert isinstance(node.payload, int)
        return (SymbolicWitness.of(After(node.payload, unmet=True)),)
    if node.kind == NodeKind.AND_V:
        x, y = node.children
        return _unique(_compose(_dsat(y), _sat(x)))

    x, y, z = node.children
    return _unique(_compose(_dsat(z), _sat(x)) + _compose(_dsat(y), _sat(x)))


def sat(node: MiniscriptNode) -> tuple[SymbolicWitness, ...]:
    """
    All satisfying symbolic witnesses of a fragment, in composition order.

    Raises:
        MiniscriptTypeError: If the fragment is ill-typed
    """
    type_check(node)
    return _sat(node)


def dsat(node: MiniscriptNode) -> tuple[SymbolicWitness, ...]:
    """
    All dissatisfying symbolic witnesses of a B-typed fragment.

    Raises:
        MiniscriptTypeError: If the fragment is ill-typed
        DsatUndefinedError: If the fragment has type V
    """
    type_check(node)
    return _dsat(node)
