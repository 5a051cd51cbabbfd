"""
Miniscript fragment AST and expression parser.

Expressions use function-call syntax, one fragment per call:

    andor(pk(A),sha256(H),and_v(v(pk(B)),older(10)))

Parsing is whitespace-insensitive; str(node) yields the canonical spelling with no
whitespace, so parse_miniscript(str(node)) == node.

Payload conventions:
- pk takes a key identifier ([A-Za-z0-9_]+).
- sha256 takes either 64 hex digits (a literal 32-byte digest) or a symbolic digest
  name that is not purely hexadecimal (e.g. H, B_32, secret1).
- older/after take a decimal block count in [1, 2**31).
"""

import re
from dataclasses import dataclass
from enum import Enum

from src.exceptions import (
    MiniscriptArityError,
    MiniscriptPayloadError,
    MiniscriptSyntaxError,
)

MAX_LOCK_VALUE = 2**31

_IDENTIFIER = re.compile(r"[A-Za-z0-9_]+")
_HEX_ONLY = re.compile(r"[0-9a-fA-F]+")
_TOKEN = re.compile(r"\s*(?:(?P<name>[A-Za-z0-9_]+)|(?P<punct>[(),]))")


class NodeKind(str, Enum):
    """Fragment kinds admitted by the checker."""

    ANDOR = "andor"
    AND_V = "and_v"
    VERIFY = "v"  # verify wrapper
    PK = "pk"
    SHA256 = "sha256"
    OLDER = "older"
    AFTER = "after"

    @property
    def is_leaf(self) -> bool:
        return self in LEAF_KINDS


LEAF_KINDS = frozenset({NodeKind.PK, NodeKind.SHA256, NodeKind.OLDER, NodeKind.AFTER})

ARITY: dict[NodeKind, int] = {
    NodeKind.ANDOR: 3,
    NodeKind.AND_V: 2,
    NodeKind.VERIFY: 1,
    NodeKind.PK: 0,
    NodeKind.SHA256: 0,
    NodeKind.OLDER: 0,
    NodeKind.AFTER: 0,
}


def normalize_digest(value: str) -> str:
    """Validate a sha256 payload and return its canonical spelling."""
    if _HEX_ONLY.fullmatch(value):
        if len(value) != 64:
            raise MiniscriptPayloadError(
                f"sha256 digest must be 32 bytes, got {len(value) // 2} "
                f"({len(value)} hex digits)"
            )
        return value.lower()
    if not _IDENTIFIER.fullmatch(value):
        raise MiniscriptPayloadError(f"invalid sha256 digest name {value!r}")
    return value


@dataclass(frozen=True)
class MiniscriptNode:
    """Immutable fragment node; validated on construction."""

    kind: NodeKind
    children: tuple["MiniscriptNode", ...] = ()
    payload: str | int | None = None

    def __post_init__(self) -> None:
        expected = ARITY[self.kind]
        if len(self.children) != expected:
            raise MiniscriptArityError(
                f"{self.kind.value} takes {expected} children, got {len(self.children)}"
            )
        if self.kind in (NodeKind.OLDER, NodeKind.AFTER):
            if (
                not isinstance(self.payload, int)
                or isinstance(self.payload, bool)
                or not 1 <= self.payload < MAX_LOCK_VALUE
            ):
                raise MiniscriptPayloadError(
                    f"{self.kind.value} requires a block count in [1, {MAX_LOCK_VALUE}), "
                    f"got {self.payload!r}"
                )
        elif self.kind == NodeKind.SHA256:
            if not isinstance(self.payload, str):
                raise MiniscriptPayloadError("sha256 requires a digest payload")
            object.__setattr__(self, "payload", normalize_digest(self.payload))
        elif self.kind == NodeKind.PK:
            if not isinstance(self.payload, str) or not _IDENTIFIER.fullmatch(
                self.payload
            ):
                raise MiniscriptPayloadError(f"invalid key identifier {self.payload!r}")
        elif self.payload is not None:
            raise MiniscriptPayloadError(f"{self.kind.value} takes no payload")

    def __str__(self) -> str:
        if self.kind.is_leaf:
            return f"{self.kind.value}({self.payload})"
        inner = ",".join(str(child) for child in self.children)
        return f"{self.kind.value}({inner})"

    def walk(self) -> list["MiniscriptNode"]:
        """Return this node and all descendants in pre-order."""
        nodes = [self]
        for child in self.children:
            nodes.extend(child.walk())
        return nodes


# Builders used by tests, the loader and SweepTx


def pk(key: str) -> MiniscriptNode:
    return MiniscriptNode(NodeKind.PK, payload=key)


def sha256(digest: str) -> MiniscriptNode:
    return MiniscriptNode(NodeKind.SHA256, payload=digest)


def older(blocks: int) -> MiniscriptNode:
    return MiniscriptNode(NodeKind.OLDER, payload=blocks)


def after(height: int) -> MiniscriptNode:
    return MiniscriptNode(NodeKind.AFTER, payload=height)


def v(child: MiniscriptNode) -> MiniscriptNode:
    return MiniscriptNode(NodeKind.VERIFY, (child,))


def and_v(x: MiniscriptNode, y: MiniscriptNode) -> MiniscriptNode:
    return MiniscriptNode(NodeKind.AND_V, (x, y))


def andor(x: MiniscriptNode, y: MiniscriptNode, z: MiniscriptNode) -> MiniscriptNode:
    return MiniscriptNode(NodeKind.ANDOR, (x, y, z))


@dataclass(frozen=True)
class _Token:
    text: str
    position: int

    @property
    def is_name(self) -> bool:
        return self.text not in ("(", ")", ",")


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    position = 0
    while position < len(text):
        if text[position].isspace():
            position += 1
            continue
        match = _TOKEN.match(text, position)
        if match is None:
            raise MiniscriptSyntaxError(
                position, "fragment name, '(', ')' or ','", text[position]
            )
        token_text = match.group("name") or match.group("punct")
        start = match.start("name") if match.group("name") else match.start("punct")
        tokens.append(_Token(token_text, start))
        position = match.end()
    return tokens


class _Parser:
    """Recursive-descent parser over the token list."""

    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.index = 0

    def _peek(self) -> _Token | None:
        return self.tokens[self.index] if self.index < len(self.tokens) else None

    def _expect(self, expected: str) -> _Token:
        token = self._peek()
        punctuation = expected in ("(", ")", ",")
        label = f"'{expected}'" if punctuation else expected
        if token is None:
            raise MiniscriptSyntaxError(len(self.text), label)
        if (token.text != expected) if punctuation else not token.is_name:
            raise MiniscriptSyntaxError(token.position, label, token.text)
        self.index += 1
        return token

    def parse(self) -> MiniscriptNode:
        node = self._parse_expr()
        trailing = self._peek()
        if trailing is not None:
            raise MiniscriptSyntaxError(trailing.position, "end of input", trailing.text)
        return node

    def _parse_expr(self) -> MiniscriptNode:
        name = self._expect("fragment name")
        try:
            kind = NodeKind(name.text)
        except ValueError:
            raise MiniscriptSyntaxError(
                name.position, "fragment name", name.text
            ) from None
        self._expect("(")
        if kind.is_leaf:
            return self._parse_leaf(kind)

        children = [self._parse_expr()]
        while (token := self._peek()) is not None and token.text == ",":
            self.index += 1
            children.append(self._parse_expr())
        self._expect(")")
        if len(children) != ARITY[kind]:
            raise MiniscriptArityError(
                f"{kind.value} at position {name.position} takes {ARITY[kind]} "
                f"arguments, got {len(children)}"
            )
        return MiniscriptNode(kind, tuple(children))

    def _parse_leaf(self, kind: NodeKind) -> MiniscriptNode:
        expected = {
            NodeKind.PK: "key identifier",
            NodeKind.SHA256: "digest",
            NodeKind.OLDER: "block count",
            NodeKind.AFTER: "block height",
        }[kind]
        argument = self._expect(expected)
        token = self._peek()
        if token is not None and token.text == ",":
            raise MiniscriptArityError(
                f"{kind.value} at position {argument.position} takes exactly one argument"
            )
        self._expect(")")

        payload: str | int = argument.text
        if kind in (NodeKind.OLDER, NodeKind.AFTER):
            if not argument.text.isdigit():
                raise MiniscriptPayloadError(
                    f"{kind.value} requires a decimal block count, got {argument.text!r}"
                )
            payload = int(argument.text)
        return MiniscriptNode(kind, payload=payload)


def parse_miniscript(text: str) -> MiniscriptNode:
    """
    Parse an expression string into a fragment AST.

    Args:
        text: Non-empty expression such as ``andor(pk(A),sha256(H),older(5))``

    Returns:
        The validated root node

    Raises:
        MiniscriptSyntaxError: On an unexpected token (carries position and expectation)
        MiniscriptArityError: On a wrong number of arguments
        MiniscriptPayloadError: On a bad digest or non-positive lock
    """
    if not text or not text.strip():
        raise MiniscriptSyntaxError(0, "fragment name")
    return _Parser(text).parse()
