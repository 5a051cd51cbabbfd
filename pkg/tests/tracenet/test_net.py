"""Tests for trace net construction."""

from collections import Counter

import pytest

from src.exceptions import NetConstructionError
from src.knowledge.context import ContractContext
from src.knowledge.objects import Actor
from src.miniscript.ast import pk
from src.services.commands import Session
from src.tracenet.net import build_tracenet, required_tokens
from src.txmodel.template import OutputRef, TxInput, TxOutput, TxTemplate
from tests.conftest import COOP_CLOSE, SessionFactory


class TestBuildTracenet:
    """Tests for build_tracenet on the hash-lock swap."""

    def test_places(self, htlc_session: Session) -> None:
        """Test funding, HTLC and sink places of the swap."""
        assert sorted(htlc_session.net.places) == [
            "abort_A:0",
            "abort_B:0",
            "coin_A:0",
            "coin_B:0",
            "fund_A:0",
            "fund_B:0",
            "swap_A:0",
            "swap_B:0",
            "sweep(coin_A:0#0):0",
            "sweep(coin_B:0#0):0",
        ]

    def test_transitions(self, htlc_session: Session) -> None:
        """Test one transition per template, each with a single permutation."""
        assert sorted(htlc_session.net.transitions) == [
            "abort_A",
            "abort_B",
            "fund_A",
            "fund_B",
            "swap_A",
            "swap_B",
            "sweep(coin_A:0#0)",
            "sweep(coin_B:0#0)",
        ]

    def test_htlc_place_feeds_swap_and_abort(self, htlc_session: Session) -> None:
        """Test that the initiator's HTLC output is a choice between two spenders."""
        spenders = {t.id for t in htlc_session.net.spenders("fund_A:0")}

        assert spenders == {"swap_B", "abort_A"}

    def test_intervals(self, htlc_session: Session) -> None:
        """Test that arcs carry the relative locks of the chosen paths."""
        transitions = htlc_session.net.transitions

        assert [arc.older for arc in transitions["abort_A"].inputs] == [15]
        assert [arc.older for arc in transitions["abort_B"].inputs] == [10]
        assert [arc.older for arc in transitions["swap_A"].inputs] == [0]
        assert transitions["swap_A"].after == 0
        assert sorted(htlc_session.net.older_bounds) == [0, 0, 0, 0, 0, 0, 10, 15]

    def test_initial_marking(self, htlc_session: Session) -> None:
        """Test that only the confirmed funding outputs start marked."""
        net = htlc_session.net

        assert net.m0 == frozenset({"coin_A:0", "coin_B:0"})
        assert dict(net.arrivals0) == {"coin_A:0": 0, "coin_B:0": 0}
        assert net.b0 == 0

    def test_sinks(self, htlc_session: Session) -> None:
        """Test that sweep destinations are never spent."""
        assert htlc_session.net.spenders("swap_A:0") == ()

    def test_multi_permutation_suffixes(self, session: SessionFactory) -> None:
        """Test that two 2-path inputs give four transitions on the same two places."""
        net = session(COOP_CLOSE).net
        closes = sorted(t for t in net.transitions if t.startswith("coop_close"))

        assert closes == [f"coop_close/{k}" for k in range(4)]
        for t_id in closes:
            assert net.transitions[t_id].input_places == ("fund_A:0", "fund_B:0")

    def test_deterministic(self, htlc_session: Session) -> None:
        """Test that rebuilding gives the same ids in the same order."""
        net = htlc_session.net
        confirmations = {OutputRef("coin_A", 0): 0, OutputRef("coin_B", 0): 0}
        templates = [t.tx for t in net.transitions.values()]

        again = build_tracenet(net.context, templates, confirmations, 0)

        assert list(again.places) == list(net.places)
        assert list(again.transitions) == list(net.transitions)

    def test_place_collision(self) -> None:
        """Test that two outputs with the same display name are rejected."""
        coin = OutputRef("lock", 0)
        lock = TxTemplate("lock", (TxInput(coin),), (TxOutput(1, pk("A")),))
        context = ContractContext.build(
            [lock], {coin: TxOutput(1, pk("A"))}, {"A": Actor.INT}
        )

        with pytest.raises(NetConstructionError):
            build_tracenet(context, [lock.id], {coin: 0}, 0)

    def test_minimal_net(self) -> None:
        """Test that one spend of one funding output gives two places and a transition."""
        coin = OutputRef("coin", 0)
        spend = TxTemplate("spend", (TxInput(coin),), (TxOutput(1, pk("B")),))
        owners = {"A": Actor.INT, "B": Actor.EXT}
        context = ContractContext.build([spend], {coin: TxOutput(1, pk("A"))}, owners)

        net = build_tracenet(context, [spend.id], {coin: 0}, 0)

        assert len(net.places) == 2
        assert list(net.transitions) == ["spend"]


class TestRequiredTokens:
    """Tests for required_tokens."""

    def test_single_input(self, htlc_session: Session) -> None:
        """Test the swap transition's demand."""
        demand = required_tokens(htlc_session.net.transitions["swap_A"])

        assert demand == Counter({"fund_B:0": 1})

    def test_unconnected_place(self, htlc_session: Session) -> None:
        """Test that places the transition does not read count zero."""
        assert required_tokens(htlc_session.net.transitions["swap_A"])["fund_A:0"] == 0

    def test_two_inputs(self, session: SessionFactory) -> None:
        """Test that a two-input transition needs both places."""
        demand = required_tokens(session(COOP_CLOSE).net.transitions["coop_close/0"])

        assert demand == Counter({"fund_A:0": 1, "fund_B:0": 1})
