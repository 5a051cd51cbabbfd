"""Tests for the fragment parser and AST."""

import pytest

from src.exceptions import (
    MiniscriptArityError,
    MiniscriptPayloadError,
    MiniscriptSyntaxError,
)
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

HTLC_TEXT = "andor(pk(A),sha256(H1),and_v(v(pk(B)),older(10)))"
DIGEST = "AB" * 32


class TestParseMiniscript:
    """Tests for parse_miniscript."""

    def test_parses_htlc(self) -> None:
        """Test that the HTLC expression yields the expected tree."""
        node = parse_miniscript(HTLC_TEXT)

        assert node == andor(pk("A"), sha256("H1"), and_v(v(pk("B")), older(10)))
        assert node.kind == NodeKind.ANDOR
        assert len(node.children) == 3

    def test_parses_single_leaf(self) -> None:
        """Test that a bare key fragment parses to a pk leaf."""
        node = parse_miniscript("pk(A)")

        assert node.kind == NodeKind.PK
        assert node.payload == "A"
        assert node.children == ()

    def test_whitespace_insensitive(self) -> None:
        """Test that whitespace between tokens is ignored."""
        spaced = " andor( pk(A) ,\n sha256(H1), and_v( v(pk(B)), older( 10 ) ) ) "

        assert parse_miniscript(spaced) == parse_miniscript(HTLC_TEXT)

    def test_canonical_round_trip(self) -> None:
        """Test that str() is the canonical spelling and parses back."""
        node = parse_miniscript(HTLC_TEXT)

        assert str(node) == HTLC_TEXT
        assert parse_miniscript(str(node)) == node

    def test_after_leaf(self) -> None:
        """Test that absolute locks are admitted."""
        assert parse_miniscript("after(500)") == after(500)

    def test_hex_digest_is_lowercased(self) -> None:
        """Test that literal digests get a canonical spelling."""
        node = parse_miniscript(f"sha256({DIGEST})")

        assert node.payload == DIGEST.lower()

    def test_rejects_zero_lock(self) -> None:
        """Test that non-positive locks are payload errors."""
        with pytest.raises(MiniscriptPayloadError):
            parse_miniscript("older(0)")

    def test_rejects_short_hex_digest(self) -> None:
        """Test that a hex digest must be exactly 32 bytes."""
        with pytest.raises(MiniscriptPayloadError, match="32 bytes"):
            parse_miniscript("sha256(abcd)")

    def test_rejects_non_numeric_lock(self) -> None:
        """Test that lock payloads must be decimal."""
        with pytest.raises(MiniscriptPayloadError):
            parse_miniscript("after(ten)")

    def test_unknown_fragment_reports_position(self) -> None:
        """Test that an unknown fragment name is a syntax error at its offset."""
        with pytest.raises(MiniscriptSyntaxError) as exc_info:
            parse_miniscript("and_v(v(pk(A)),multi(B))")

        assert exc_info.value.position == 15
        assert exc_info.value.found == "multi"

    def test_missing_parenthesis(self) -> None:
        """Test that a truncated expression reports the expected token."""
        with pytest.raises(MiniscriptSyntaxError) as exc_info:
            parse_miniscript("pk(A")

        assert exc_info.value.expected == "')'"
        assert exc_info.value.position == 4

    def test_trailing_input(self) -> None:
        """Test that text after a complete expression is rejected."""
        with pytest.raises(MiniscriptSyntaxError, match="end of input"):
            parse_miniscript("pk(A) pk(B)")

    def test_empty_text(self) -> None:
        """Test that an empty expression is a syntax error."""
        with pytest.raises(MiniscriptSyntaxError):
            parse_miniscript("   ")

    def test_wrong_arity(self) -> None:
        """Test that combinators check their argument count."""
        with pytest.raises(MiniscriptArityError):
            parse_miniscript("and_v(v(pk(A)))")

    def test_leaf_with_two_arguments(self) -> None:
        """Test that leaves take exactly one argument."""
        with pytest.raises(MiniscriptArityError):
            parse_miniscript("pk(A,B)")


class TestMiniscriptNode:
    """Tests for direct node construction."""

    def test_arity_enforced(self) -> None:
        """Test that constructing with wrong children fails."""
        with pytest.raises(MiniscriptArityError):
            MiniscriptNode(NodeKind.VERIFY, (pk("A"), pk("B")))

    def test_lock_upper_bound(self) -> None:
        """Test that locks beyond the 31-bit range are rejected."""
        with pytest.raises(MiniscriptPayloadError):
            older(2**31)

    def test_nodes_are_hashable_values(self) -> None:
        """Test that structurally equal nodes compare and hash equal."""
        assert {pk("A"), pk("A"), pk("B")} == {pk("A"), pk("B")}

    def test_walk_is_pre_order(self) -> None:
        """Test that walk visits parents before children, left to right."""
        node = and_v(v(pk("A")), older(3))

        assert node.walk() == [node, v(pk("A")), pk("A"), older(3)]
