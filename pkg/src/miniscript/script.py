"""
Compilation of fragments to script opcodes and the inverse lifting.

Only the opcodes used by the fragment templates are representable. A compiled
script can be rendered one fragment template per line, branch bodies indented:

    <PK_A> OP_CHECKSIG
    OP_NOTIF
      <PK_B> OP_CHECKSIGVERIFY
      <10> OP_CHECKSEQUENCEVERIFY
    OP_ELSE
      OP_SIZE <32> OP_EQUALVERIFY
      OP_SHA256 <B_32> OP_EQUAL
    OP_ENDIF

Lifting returns the canonical tree for a script: and_v chains nest to the right, a
verify wrapper applies to the innermost base unit, and an andor condition is the
single base unit in front of NOTIF.
"""

from dataclasses import dataclass
from enum import Enum

from src.exceptions import LiftError
from src.miniscript.ast import MiniscriptNode, NodeKind, and_v, andor, v
from src.miniscript.ast import after as after_node
from src.miniscript.ast import older as older_node
from src.miniscript.ast import pk as pk_node
from src.miniscript.ast import sha256 as sha256_node
from src.miniscript.typecheck import MiniscriptType, type_check


class Opcode(str, Enum):
    """Opcodes appearing in the fragment templates."""

    PUSH = "PUSH"  # push of constant data
    CHECKSIG = "CHECKSIG"
    CHECKSIGVERIFY = "CHECKSIGVERIFY"
    VERIFY = "VERIFY"
    NOTIF = "NOTIF"
    ELSE = "ELSE"
    ENDIF = "ENDIF"
    SIZE = "SIZE"
    EQUAL = "EQUAL"
    EQUALVERIFY = "EQUALVERIFY"
    SHA256 = "SHA256"
    CHECKSEQUENCEVERIFY = "CHECKSEQUENCEVERIFY"
    CHECKLOCKTIMEVERIFY = "CHECKLOCKTIMEVERIFY"


@dataclass(frozen=True)
class ScriptOpcode:
    """A single opcode, or a constant push when mnemonic is PUSH."""

    mnemonic: Opcode
    data: str | int | None = None

    def __str__(self) -> str:
        if self.mnemonic == Opcode.PUSH:
            return f"<{self.data}>"
        return f"OP_{self.mnemonic.value}"


def push(data: str | int) -> ScriptOpcode:
    return ScriptOpcode(Opcode.PUSH, data)


def op(mnemonic: Opcode) -> ScriptOpcode:
    return ScriptOpcode(mnemonic)


# (indent level, opcodes on the line)
ScriptLine = tuple[int, list[ScriptOpcode]]


def _compile_lines(node: MiniscriptNode, depth: int) -> list[ScriptLine]:
    if node.kind == NodeKind.PK:
        assert isinstance(node.payload, str)
        return [(depth, [push(node.payload), op(Opcode.CHECKSIG)])]
    if node.kind == NodeKind.SHA256:
        assert isinstance(node.payload, str)
        return [
            (depth, [op(Opcode.SIZE), push(32), op(Opcode.EQUALVERIFY)]),
            (depth, [op(Opcode.SHA256), push(node.payload), op(Opcode.EQUAL)]),
        ]
    if node.kind == NodeKind.OLDER:
        assert isinstance(node.payload, int)
        return [(depth, [push(node.payload), op(Opcode.CHECKSEQUENCEVERIFY)])]
    if node.kind == NodeKind.AFTER:
        assert isinstance(node.payload, int)
        return [(depth, [push(node.payload), op(Opcode.CHECKLOCKTIMEVERIFY)])]

    if node.kind == NodeKind.VERIFY:
        lines = _compile_lines(node.children[0], depth)
        last_depth, last_ops = lines[-1]
        if last_ops[-1] == op(Opcode.CHECKSIG):
            fused = last_ops[:-1] + [op(Opcode.CHECKSIGVERIFY)]
        else:
            fused = last_ops + [op(Opcode.VERIFY)]
        return lines[:-1] + [(last_depth, fused)]

    if node.kind == NodeKind.AND_V:
        x, y = node.children
        return _compile_lines(x, depth) + _compile_lines(y, depth)

    x, y, z = node.children
    return (
        _compile_lines(x, depth)
        + [(depth, [op(Opcode.NOTIF)])]
        + _compile_lines(z, depth + 1)
        + [(depth, [op(Opcode.ELSE)])]
        + _compile_lines(y, depth + 1)
        + [(depth, [op(Opcode.ENDIF)])]
    )


def compile_to_script(node: MiniscriptNode) -> list[ScriptOpcode]:
    """Emit the opcode template of every fragment, concatenated by composition."""
    type_check(node)
    return [opcode for _, ops in _compile_lines(node, 0) for opcode in ops]


def render_script(node: MiniscriptNode) -> str:
    """Render the compiled script one fragment template per line."""
    type_check(node)
    return "\n".join(
        "  " * depth + " ".join(str(opcode) for opcode in ops)
        for depth, ops in _compile_lines(node, 0)
    )


class _Lifter:
    """Template matcher over a flat opcode list."""

    def __init__(self, opcodes: list[ScriptOpcode]):
        self.opcodes = opcodes
        self.index = 0

    def _at(self, offset: int = 0) -> ScriptOpcode | None:
        position = self.index + offset
        return self.opcodes[position] if position < len(self.opcodes) else None

    def _is(self, offset: int, mnemonic: Opcode) -> bool:
        opcode = self._at(offset)
        return opcode is not None and opcode.mnemonic == mnemonic

    def _push_data(self, offset: int) -> str | int | None:
        opcode = self._at(offset)
        if opcode is None or opcode.mnemonic != Opcode.PUSH:
            return None
        return opcode.data

    def lift(self) -> MiniscriptNode:
        node = self._sequence()
        if self.index != len(self.opcodes):
            raise LiftError(self.index, f"unexpected {self.opcodes[self.index]}")
        return node

    def _unit(self) -> MiniscriptNode:
        start = self.index
        data = self._push_data(0)
        if isinstance(data, str) and self._is(1, Opcode.CHECKSIG):
            self.index += 2
            return pk_node(data)
        if isinstance(data, str) and self._is(1, Opcode.CHECKSIGVERIFY):
            self.index += 2
            return v(pk_node(data))
        if isinstance(data, int) and self._is(1, Opcode.CHECKSEQUENCEVERIFY):
            self.index += 2
            return older_node(data)
        if isinstance(data, int) and self._is(1, Opcode.CHECKLOCKTIMEVERIFY):
            self.index += 2
            return after_node(data)
        if (
            self._is(0, Opcode.SIZE)
            and self._push_data(1) == 32
            and self._is(2, Opcode.EQUALVERIFY)
            and self._is(3, Opcode.SHA256)
            and isinstance(self._push_data(4), str)
            and self._is(5, Opcode.EQUAL)
        ):
            digest = self._push_data(4)
            assert isinstance(digest, str)
            self.index += 6
            return sha256_node(digest)
        found = self._at()
        raise LiftError(start, "no fragment template matches" if found else "truncated")

    def _expect(self, mnemonic: Opcode) -> None:
        if not self._is(0, mnemonic):
            raise LiftError(self.index, f"expected OP_{mnemonic.value}")
        self.index += 1

    def _sequence(self) -> MiniscriptNode:
        prefix: list[MiniscriptNode] = []
        while True:
            unit = self._unit()
            while True:
                if self._is(0, Opcode.NOTIF) and type_check(unit) == MiniscriptType.B:
                    self.index += 1
                    z = self._sequence()
                    self._expect(Opcode.ELSE)
                    y = self._sequence()
                    self._expect(Opcode.ENDIF)
                    unit = andor(unit, y, z)
                elif self._is(0, Opcode.VERIFY) and type_check(unit) == MiniscriptType.B:
                    self.index += 1
                    unit = v(unit)
                else:
                    break
            following = self._at()
            if (
                type_check(unit) == MiniscriptType.V
                and following is not None
                and following.mnemonic not in (Opcode.ELSE, Opcode.ENDIF)
            ):
                prefix.append(unit)
                continue
            break

        for verified in reversed(prefix):
            unit = and_v(verified, unit)
        return unit


def lift_script(opcodes: list[ScriptOpcode]) -> MiniscriptNode:
    """
    Lift a compiled script back into its canonical fragment tree.

    Raises:
        LiftError: Naming the first opcode position no template matches
    """
    if not opcodes:
        raise LiftError(0, "empty script")
    node = _Lifter(list(opcodes)).lift()
    type_check(node)
    return node
