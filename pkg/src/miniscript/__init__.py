"""
Miniscript fragment support for contract output scripts.

This package covers the fragment used by the checker's contracts:
- Parsing expression strings into an immutable AST
- Base/verify typing
- Compiling to (and lifting from) script opcodes
- Symbolic satisfaction and dissatisfaction witnesses
"""

from src.miniscript.ast import (
    MiniscriptNode,
    NodeKind,
    after,
    and_v,
    andor,
    older,
    parse_miniscript,
    pk,
    sha256,
    v,
)
from src.miniscript.script import (
    ScriptOpcode,
    compile_to_script,
    lift_script,
    render_script,
)
from src.miniscript.typecheck import MiniscriptType, type_check
from src.miniscript.witness import (
    After,
    ConstEq,
    ConstraintTerm,
    HashEq,
    Older,
    Sig,
    SizeEq,
    SymbolicWitness,
    dsat,
    sat,
)

__all__ = [
    "After",
    "ConstEq",
    "ConstraintTerm",
    "HashEq",
    "MiniscriptNode",
    "MiniscriptType",
    "NodeKind",
    "Older",
    "ScriptOpcode",
    "Sig",
    "SizeEq",
    "SymbolicWitness",
    "after",
    "and_v",
    "andor",
    "compile_to_script",
    "dsat",
    "lift_script",
    "older",
    "parse_miniscript",
    "pk",
    "render_script",
    "sat",
    "sha256",
    "type_check",
    "v",
]
