"""Safety of a contract update: the new graph must keep every safe outcome of the old."""

import logging
from dataclasses import dataclass

from src.exceptions import UpdateProjectionError
from src.explorer.graph import ReachabilityGraph
from src.properties.game import Verdict, is_settled, trustless_execution
from src.properties.policies import SafetyPolicy
from src.semantics.state import TraceNetState

logger = logging.getLogger(__name__)

Projection = frozenset[str]


@dataclass(frozen=True)
class UpdateReport:
    safe: bool
    verdict: Verdict
    shared_places: frozenset[str]
    lost: tuple[Projection, ...] = ()

    def render(self) -> str:
        lines = [
            f"update: {'safe' if self.safe else 'unsafe'}",
            f"updated contract: trustless execution {'holds' if self.verdict.holds else 'fails'}",
            f"shared places: {len(self.shared_places)}",
        ]
        for projection in self.lost:
            lines.append(f"  lost safe outcome: {{{', '.join(sorted(projection))}}}")
        return "\n".join(lines) + "\n"


def _project(state: TraceNetState, shared: frozenset[str]) -> Projection:
    return frozenset(state.marking & shared)


def safe_outcomes(
    rg: ReachabilityGraph, verdict: Verdict, policy: SafetyPolicy, shared: frozenset[str]
) -> set[Projection]:
    """Projected markings of the passing settled states inside the safe set."""
    return {
        _project(state, shared)
        for state in verdict.safe_states
        if is_settled(rg, state) and policy.holds(state, rg.net)
    }


def update_safety(
    rg_old: ReachabilityGraph, rg_new: ReachabilityGraph, policy: SafetyPolicy
) -> UpdateReport:
    """
    Check that switching from the old contract to the new one is safe.

    Both graphs are compared on the places they share. The update is safe when
    trustless execution holds for the new contract and every safe outcome of the old
    contract, projected on shared places, is still a safe outcome of the new one.

    Raises:
        UpdateProjectionError: If the two roots disagree on the shared places
    """
    shared = frozenset(rg_old.net.places) & frozenset(rg_new.net.places)
    dropped = sorted(frozenset(rg_old.net.places) - shared)
    if dropped:
        logger.warning("Update drops places %s", dropped)
    old_root, new_root = rg_old.root, rg_new.root
    if _project(old_root, shared) != _project(new_root, shared):
        raise UpdateProjectionError(
            f"current states differ: {old_root.describe()} before the update, "
            f"{new_root.describe()} after"
        )
    old_verdict = trustless_execution(rg_old, policy)
    new_verdict = trustless_execution(rg_new, policy)
    kept = safe_outcomes(rg_new, new_verdict, policy, shared)
    lost = sorted(
        (p for p in safe_outcomes(rg_old, old_verdict, policy, shared) if p not in kept),
        key=sorted,
    )
    safe = new_verdict.holds and not lost
    logger.info(
        "Update is %s (%d old safe outcomes lost)", "safe" if safe else "unsafe", len(lost)
    )
    return UpdateReport(safe, new_verdict, shared, tuple(lost))
