"""Seeded random firing walks checking the state invariants on the bundled contracts."""

import random

import pytest

from src.semantics.firing import replay_marking
from src.semantics.state import EdgeKind, FiredTransition, TraceNetState
from src.services.commands import Session
from tests.conftest import ADAPTOR, COOP_CLOSE, HTLC, HTLC_RESPONDER, open_session

WALKS_PER_CONTRACT = 250
WALK_LENGTH = 14


def _moves(session: Session, z: TraceNetState) -> list[tuple[FiredTransition, TraceNetState]]:
    semantics = session.semantics
    moves = semantics.successors(z)
    for depth in range(1, semantics.params.reorg_depth + 1):
        moves.append(
            (
                FiredTransition(EdgeKind.REORG, blocks=depth),
                semantics.fire_reorg(z, depth),
            )
        )
    return moves


def _check_state(session: Session, z: TraceNetState) -> None:
    places = [place for place, _ in z.arrivals]
    assert len(places) == len(set(places)), "a place holds two tokens"
    assert z.marking == frozenset(places)
    assert z.marking <= frozenset(session.net.places)
    assert replay_marking(session.net, z.chain) == z.arrival_map
    for place in session.net.places:
        if place not in z.marking:
            assert z.older_clock(place) == 0
        else:
            assert z.older_clock(place) >= 0
    heights = [height for _, height in z.chain]
    assert heights == sorted(heights)
    assert all(height <= z.height for height in heights)
    assert z.height >= session.net.b0


def _check_step(
    session: Session, before: TraceNetState, step: FiredTransition, after: TraceNetState
) -> None:
    assert before.k_int.objects <= after.k_int.objects
    assert before.k_ext.objects <= after.k_ext.objects
    if step.kind is EdgeKind.ONCHAIN:
        assert step.actor is not None and step.transition is not None
        t = session.net.transitions[step.transition]
        if session.semantics.reveals(before, t, step.actor):
            assert before.pooled(t.id) is not None, f"{t.id} confirmed without broadcast"
        consumed = len(before.marking - after.marking)
        produced = len(after.marking - before.marking)
        assert consumed == len(t.inputs)
        assert produced == len(t.outputs)


@pytest.mark.parametrize(
    ("contract", "reorg_depth", "seed"),
    [
        (HTLC, 0, 1),
        (HTLC_RESPONDER, 1, 2),
        (ADAPTOR, 1, 3),
        (COOP_CLOSE, 0, 4),
    ],
)
class TestRandomWalks:
    """Invariants after every step of seeded random walks."""

    def test_invariants_hold(self, contract: str, reorg_depth: int, seed: int) -> None:
        """Test safeness, history replay, clocks, monotone knowledge and broadcast order."""
        session = open_session(contract, reorg_depth=reorg_depth)
        rng = random.Random(seed)
        steps = 0
        for _ in range(WALKS_PER_CONTRACT):
            z = session.root
            _check_state(session, z)
            for _ in range(WALK_LENGTH):
                moves = _moves(session, z)
                if not moves:
                    break
                step, successor = rng.choice(moves)
                _check_step(session, z, step, successor)
                _check_state(session, successor)
                z = successor
                steps += 1

        assert steps > WALKS_PER_CONTRACT
