"""Base/verify typing of fragment compositions."""

from enum import Enum
from functools import cache

from src.exceptions import MiniscriptTypeError
from src.miniscript.ast import MiniscriptNode, NodeKind


class MiniscriptType(str, Enum):
    """B pushes a non-zero element on success; V leaves nothing behind."""

    B = "B"
    V = "V"


def _require(node: MiniscriptNode, expected: MiniscriptType) -> MiniscriptType:
    actual = type_check(node)
    if actual != expected:
        raise MiniscriptTypeError(str(node), expected.value, actual.value)
    return actual


@cache
def type_check(node: MiniscriptNode) -> MiniscriptType:
    """
    Compute the type of a fragment, rejecting ill-typed compositions.

    Raises:
        MiniscriptTypeError: Naming the offending subterm and the expected type
    """
    if node.kind.is_leaf:
        return MiniscriptType.B

    if node.kind == NodeKind.VERIFY:
        _require(node.children[0], MiniscriptType.B)
        return MiniscriptType.V

    if node.kind == NodeKind.AND_V:
        x, y = node.children
        _require(x, MiniscriptType.V)
        return type_check(y)

    x, y, z = node.children
    _require(x, MiniscriptType.B)
    result = type_check(y)
    _require(z, result)
    return result
