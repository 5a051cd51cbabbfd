"""Tests for script compilation and lifting."""

import pytest

from src.exceptions import LiftError, MiniscriptTypeError
from src.miniscript.ast import (
    MiniscriptNode,
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
    Opcode,
    ScriptOpcode,
    compile_to_script,
    lift_script,
    op,
    push,
    render_script,
)

EXAMPLE_SCRIPT = """\
<PK_A> OP_CHECKSIG
OP_NOTIF
  <PK_B> OP_CHECKSIGVERIFY
  <10> OP_CHECKSEQUENCEVERIFY
OP_ELSE
  OP_SIZE <32> OP_EQUALVERIFY
  OP_SHA256 <B_32> OP_EQUAL
OP_ENDIF"""

EXAMPLE_HTLC = andor(pk("PK_A"), sha256("B_32"), and_v(v(pk("PK_B")), older(10)))


class TestCompileToScript:
    """Tests for compile_to_script and render_script."""

    def test_pk(self) -> None:
        """Test the key template."""
        assert compile_to_script(pk("A")) == [push("A"), op(Opcode.CHECKSIG)]

    def test_sha256(self) -> None:
        """Test the hash template."""
        assert compile_to_script(sha256("B_32")) == [
            op(Opcode.SIZE),
            push(32),
            op(Opcode.EQUALVERIFY),
            op(Opcode.SHA256),
            push("B_32"),
            op(Opcode.EQUAL),
        ]

    def test_older_and_after(self) -> None:
        """Test the relative and absolute lock templates."""
        assert compile_to_script(older(10)) == [
            push(10),
            op(Opcode.CHECKSEQUENCEVERIFY),
        ]
        assert compile_to_script(after(50)) == [
            push(50),
            op(Opcode.CHECKLOCKTIMEVERIFY),
        ]

    def test_verify_fuses_checksig(self) -> None:
        """Test that v(pk) ends in CHECKSIGVERIFY rather than CHECKSIG VERIFY."""
        assert compile_to_script(v(pk("A"))) == [push("A"), op(Opcode.CHECKSIGVERIFY)]

    def test_verify_appends_verify(self) -> None:
        """Test that v of a non-signature fragment appends VERIFY."""
        assert compile_to_script(v(older(5))) == [
            push(5),
            op(Opcode.CHECKSEQUENCEVERIFY),
            op(Opcode.VERIFY),
        ]

    def test_renders_htlc_example(self) -> None:
        """Test that the HTLC renders as its eight-opcode-line script."""
        assert render_script(EXAMPLE_HTLC) == EXAMPLE_SCRIPT

    def test_opcode_rendering(self) -> None:
        """Test mnemonic and push spelling."""
        assert str(op(Opcode.NOTIF)) == "OP_NOTIF"
        assert str(push(32)) == "<32>"
        assert str(ScriptOpcode(Opcode.PUSH, "PK_A")) == "<PK_A>"

    def test_rejects_ill_typed(self) -> None:
        """Test that compilation type-checks first."""
        with pytest.raises(MiniscriptTypeError):
            compile_to_script(and_v(pk("A"), pk("B")))


class TestLiftScript:
    """Tests for lift_script."""

    def test_lifts_htlc(self) -> None:
        """Test that the HTLC script lifts back to its expression."""
        lifted = lift_script(compile_to_script(EXAMPLE_HTLC))

        assert lifted == EXAMPLE_HTLC
        assert str(lifted) == (
            "andor(pk(PK_A),sha256(B_32),and_v(v(pk(PK_B)),older(10)))"
        )

    def test_lifts_single_template(self) -> None:
        """Test the inverse of the key template."""
        assert lift_script([push("A"), op(Opcode.CHECKSIG)]) == pk("A")

    def test_trailing_opcode_fails(self) -> None:
        """Test that an unmatched trailing opcode names its position."""
        with pytest.raises(LiftError) as exc_info:
            lift_script([push("A"), op(Opcode.CHECKSIG), op(Opcode.CHECKSIG)])

        assert exc_info.value.position == 2

    def test_unknown_start_fails(self) -> None:
        """Test that a script starting mid-template is rejected at position 0."""
        with pytest.raises(LiftError) as exc_info:
            lift_script([op(Opcode.EQUAL)])

        assert exc_info.value.position == 0

    def test_unterminated_branch_fails(self) -> None:
        """Test that a NOTIF without ELSE is rejected."""
        script = compile_to_script(EXAMPLE_HTLC)[:-1]

        with pytest.raises(LiftError):
            lift_script(script)

    def test_empty_script_fails(self) -> None:
        """Test that an empty opcode list cannot be lifted."""
        with pytest.raises(LiftError):
            lift_script([])

    def test_verify_chains_nest_right(self) -> None:
        """Test that consecutive verify fragments lift to right-nested and_v."""
        node = and_v(v(pk("A")), and_v(v(older(5)), pk("B")))

        assert lift_script(compile_to_script(node)) == node

    def test_nested_andor_condition(self) -> None:
        """Test that an andor used as a condition round-trips."""
        node = parse_miniscript(
            "andor(andor(pk(A),pk(B),older(3)),sha256(H),and_v(v(pk(C)),after(90)))"
        )

        assert lift_script(compile_to_script(node)) == node

    def test_verify_typed_branches(self) -> None:
        """Test that V-typed andor branches stop at ELSE and ENDIF."""
        node = and_v(andor(pk("A"), v(pk("B")), v(pk("C"))), pk("D"))

        assert lift_script(compile_to_script(node)) == node

    def test_round_trip_generated(
        self, generated_fragments: list[MiniscriptNode]
    ) -> None:
        """Test lift(compile(n)) == n over generated canonical fragments."""
        for node in generated_fragments:
            assert lift_script(compile_to_script(node)) == node, str(node)
