"""Tests for transaction templates."""

import pytest

from src.exceptions import TransactionError
from src.miniscript.ast import older, pk
from src.txmodel.template import OutputRef, TxInput, TxOutput, TxTemplate

COIN_A = OutputRef("coin_A", 0)


def _spend(label: str = "spend", **changes: object) -> TxTemplate:
    fields: dict[str, object] = {
        "ins": (TxInput(COIN_A),),
        "outs": (TxOutput(100, pk("B")),),
        "after": 0,
    }
    fields.update(changes)
    return TxTemplate(label, **fields)  # type: ignore[arg-type]


class TestTxTemplate:
    """Tests for TxTemplate construction and identity."""

    def test_id_is_content_digest(self) -> None:
        """Test that equal content yields equal ids regardless of label."""
        first = _spend("first")
        second = _spend("second")

        assert first.id == second.id
        assert first == second
        assert len(first.id) == 64

    @pytest.mark.parametrize(
        "changes",
        [
            {"after": 5},
            {"ins": (TxInput(COIN_A, older=3),)},
            {"ins": (TxInput(COIN_A, path=0),)},
            {"ins": (TxInput(OutputRef("coin_A", 1)),)},
            {"outs": (TxOutput(99, pk("B")),)},
            {"outs": (TxOutput(100, pk("C")),)},
        ],
    )
    def test_any_field_change_changes_id(self, changes: dict[str, object]) -> None:
        """Test that the digest covers every structural field."""
        assert _spend(**changes).id != _spend().id

    def test_requires_inputs_and_outputs(self) -> None:
        """Test the non-empty invariant."""
        with pytest.raises(TransactionError):
            _spend(ins=())
        with pytest.raises(TransactionError):
            _spend(outs=())

    def test_rejects_duplicate_prevouts(self) -> None:
        """Test that two inputs cannot spend the same output."""
        with pytest.raises(TransactionError, match="same prevout"):
            _spend(ins=(TxInput(COIN_A), TxInput(COIN_A, older=1)))

    def test_rejects_negative_values(self) -> None:
        """Test lock and value bounds."""
        with pytest.raises(TransactionError):
            TxOutput(-1, pk("A"))
        with pytest.raises(TransactionError):
            TxInput(COIN_A, older=-1)
        with pytest.raises(TransactionError):
            _spend(after=-1)

    def test_output_refs(self) -> None:
        """Test references to the template's own outputs."""
        tx = _spend(outs=(TxOutput(50, pk("A")), TxOutput(50, older(3))))

        assert tx.output_refs == (OutputRef(tx.id, 0), OutputRef(tx.id, 1))
        assert tx.prevouts == (COIN_A,)
        assert tx.total_out == 100
        assert str(OutputRef("coin_A", 0)) == "coin_A:0"
