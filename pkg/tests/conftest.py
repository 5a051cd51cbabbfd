"""Test configuration and fixtures."""

from collections import deque
from collections.abc import Callable, Sequence
from pathlib import Path

import pytest

from src.explorer.build import build_rg
from src.explorer.graph import ReachabilityGraph
from src.semantics.state import EdgeKind, FiredTransition, TraceNetState
from src.services.commands import Overrides, Session
from src.services.contract_loader import ContractDescription, load_contract

CONTRACTS_DIR = Path(__file__).resolve().parents[1] / "contracts"

HTLC = "atomic_swap_htlc"
HTLC_RESPONDER = "atomic_swap_equal_delay_responder"
ADAPTOR = "atomic_swap_adaptor"
ADAPTOR_RESPONDER = "atomic_swap_adaptor_equal_delay_responder"
COOP_CLOSE = "update_coop_close"
DROP_ABORT = "update_drop_abort"

BUNDLED = (HTLC, HTLC_RESPONDER, ADAPTOR, ADAPTOR_RESPONDER, COOP_CLOSE, DROP_ABORT)

SessionFactory = Callable[..., Session]


def contract_path(name: str) -> Path:
    return CONTRACTS_DIR / f"{name}.json"


def open_session(
    name: str,
    snapshot: Sequence[str] | None = None,
    reorg_depth: int | None = None,
    conf_delay_int: int | None = None,
    conf_delay_ext: int | None = None,
) -> Session:
    """Session over a bundled contract with command-line style overrides."""
    overrides = Overrides(
        conf_delay_int=conf_delay_int,
        conf_delay_ext=conf_delay_ext,
        reorg_depth=reorg_depth,
        snapshot=tuple(snapshot) if snapshot is not None else None,
    )
    return Session.open(load_contract(contract_path(name)), overrides)


def find_projected_trace(
    rg: ReachabilityGraph,
    labels: Sequence[str],
    start: TraceNetState | None = None,
) -> list[FiredTransition] | None:
    """
    Path whose on-chain and delay steps are exactly ``labels``.

    Messages and broadcasts may interleave freely; reorg edges are not followed.
    """
    origin = rg.root if start is None else start
    parents: dict[
        tuple[TraceNetState, int], tuple[tuple[TraceNetState, int], FiredTransition] | None
    ] = {(origin, 0): None}
    queue = deque([(origin, 0)])
    while queue:
        node = queue.popleft()
        state, matched = node
        if matched == len(labels):
            trace: list[FiredTransition] = []
            cursor = node
            while (parent := parents[cursor]) is not None:
                cursor, step = parent
                trace.append(step)
            return trace[::-1]
        for step, target in rg.out_edges(state):
            if step.kind in (EdgeKind.MESSAGE, EdgeKind.BROADCAST):
                successor = (target, matched)
            elif step.kind in (EdgeKind.ONCHAIN, EdgeKind.DELAY) and (
                step.label == labels[matched]
            ):
                successor = (target, matched + 1)
            else:
                continue
            if successor not in parents:
                parents[successor] = (node, step)
                queue.append(successor)
    return None


@pytest.fixture(scope="session")
def contracts_dir() -> Path:
    """Directory of the bundled contract descriptions."""
    return CONTRACTS_DIR


@pytest.fixture
def bundled() -> Callable[[str], ContractDescription]:
    """Loader for bundled contracts by name."""

    def load(name: str) -> ContractDescription:
        return load_contract(contract_path(name))

    return load


@pytest.fixture
def session() -> SessionFactory:
    """Factory for sessions over bundled contracts."""
    return open_session


@pytest.fixture(scope="session")
def htlc_session() -> Session:
    """Hash-lock swap from the initiator's side, before funding."""
    return open_session(HTLC)


@pytest.fixture(scope="session")
def htlc_rg(htlc_session: Session) -> ReachabilityGraph:
    """Reachability graph of the hash-lock swap at zero delays and no reorgs."""
    return build_rg(htlc_session.semantics, htlc_session.root)


@pytest.fixture(scope="session")
def responder_session() -> Session:
    """Equal-delay hash-lock swap from the responder's side, after both fundings."""
    return open_session(HTLC_RESPONDER)


@pytest.fixture(scope="session")
def responder_rg(responder_session: Session) -> ReachabilityGraph:
    """Reachability graph of the equal-delay swap from the funded snapshot."""
    return build_rg(responder_session.semantics, responder_session.root)


@pytest.fixture(scope="session")
def adaptor_session() -> Session:
    """Adaptor-signature swap from the initiator's side, before funding."""
    return open_session(ADAPTOR)
