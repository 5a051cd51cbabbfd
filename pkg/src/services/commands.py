"""
Command orchestration behind the CLI.

Each command loads its contract files, explores and returns an exit code together
with the report text. Output files are replaced atomically.
"""

import logging
import os
import tempfile
from dataclasses import dataclass
from enum import IntEnum
from pathlib import Path

from src.exceptions import PolicyError
from src.explorer.build import build_rg
from src.explorer.dot import export_dot
from src.explorer.graph import ReachabilityGraph
from src.knowledge.deduction import Deducer
from src.knowledge.objects import Template
from src.properties.game import trustless_execution
from src.properties.policies import SafetyPolicy, parse_policy
from src.properties.stability import state_stability
from src.properties.update import update_safety
from src.semantics.firing import TraceNetSemantics
from src.semantics.replay import render_trace, replay
from src.semantics.state import ExecutionParams, FiredTransition, TraceNetState
from src.services.contract_loader import ContractDescription, load_contract
from src.settings import settings
from src.tracenet.dot import net_to_dot
from src.tracenet.net import TraceNet, build_tracenet

logger = logging.getLogger(__name__)


class ExitCode(IntEnum):
    HOLDS = 0
    FAILS = 1
    INPUT_ERROR = 2
    BUDGET = 3


@dataclass(frozen=True)
class Overrides:
    """Command-line values; None defers to the contract file, then to settings."""

    conf_delay_int: int | None = None
    conf_delay_ext: int | None = None
    reorg_depth: int | None = None
    policy: str | None = None
    budget: int | None = None
    snapshot: tuple[str, ...] | None = None


def _pick(flag: int | None, declared: int | None, default: int) -> int:
    if flag is not None:
        return flag
    if declared is not None:
        return declared
    return default


def resolve_params(description: ContractDescription, overrides: Overrides) -> ExecutionParams:
    """Execution parameters by precedence: flag, contract file, settings."""
    declared = description.document.parameters
    kinds = description.document.message_kinds
    return ExecutionParams(
        conf_delay_int=_pick(
            overrides.conf_delay_int, declared.conf_delay_int, settings.conf_delay_int
        ),
        conf_delay_ext=_pick(
            overrides.conf_delay_ext, declared.conf_delay_ext, settings.conf_delay_ext
        ),
        reorg_depth=_pick(overrides.reorg_depth, declared.reorg_depth, settings.reorg_depth),
        message_kinds=frozenset(kinds if kinds is not None else settings.message_kinds),
    )


@dataclass(frozen=True)
class Session:
    """A loaded contract with its net, semantics and current state."""

    description: ContractDescription
    semantics: TraceNetSemantics
    root: TraceNetState
    snapshot: tuple[FiredTransition, ...]
    budget: int

    @classmethod
    def open(cls, description: ContractDescription, overrides: Overrides) -> "Session":
        """
        Build the net over every template either actor can deduce at setup and
        replay the snapshot.

        Raises:
            ReplayError: If a snapshot step cannot fire
        """
        deducer = Deducer(description.context, description.rules)
        known: set[str] = set()
        for knowledge in description.knowledge.values():
            known.update(
                obj.tx for obj in deducer.closure(knowledge).objects if isinstance(obj, Template)
            )
        ordered = [tx_id for tx_id in description.context.templates if tx_id in known]
        net = build_tracenet(
            description.context, ordered, description.confirmations, description.initial_height
        )
        semantics = TraceNetSemantics(net, deducer, resolve_params(description, overrides))
        initial = semantics.initial_state(description.knowledge)
        steps = overrides.snapshot
        if steps is None:
            steps = tuple(description.document.snapshot)
        root, fired = replay(semantics, initial, steps)
        budget = overrides.budget if overrides.budget is not None else settings.state_budget
        return cls(description, semantics, root, tuple(fired), budget)

    @property
    def net(self) -> TraceNet:
        return self.semantics.net

    def explore(self, shuffle_seed: int | None = None) -> ReachabilityGraph:
        return build_rg(self.semantics, self.root, budget=self.budget, shuffle_seed=shuffle_seed)

    def policy(self, overrides: Overrides) -> SafetyPolicy:
        """
        Raises:
            PolicyError: If neither the flag nor the contract names a policy
        """
        text = overrides.policy or self.description.document.policy
        if text is None:
            raise PolicyError(f"contract {self.description.name} declares no policy")
        return parse_policy(text, self.description.context)

    def header(self) -> str:
        params = self.semantics.params
        lines = [
            f"contract: {self.description.name}",
            f"parameters: conf_delay_int={params.conf_delay_int} "
            f"conf_delay_ext={params.conf_delay_ext} reorg_depth={params.reorg_depth}",
            f"net: {len(self.net.places)} places, {len(self.net.transitions)} transitions",
        ]
        if self.snapshot:
            lines.append(f"snapshot: {render_trace(self.snapshot)}")
        return "\n".join(lines) + "\n"


def write_atomic(path: str | Path, text: str) -> None:
    """Write through a temporary file in the target directory, then rename over."""
    target = Path(path)
    fd, temp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(temp, target)
    except BaseException:
        Path(temp).unlink(missing_ok=True)
        raise
    logger.info("Wrote %s", target)


def cmd_verify(
    contract: str | Path,
    overrides: Overrides,
    report: str | Path | None = None,
    dot: str | Path | None = None,
) -> tuple[ExitCode, str]:
    """Check trustless execution from the contract's current state."""
    session = Session.open(load_contract(contract), overrides)
    policy = session.policy(overrides)
    rg = session.explore()
    verdict = trustless_execution(rg, policy)
    text = session.header() + verdict.render(rg)
    if report is not None:
        write_atomic(report, text)
    if dot is not None:
        write_atomic(dot, export_dot(rg))
    return (ExitCode.HOLDS if verdict.holds else ExitCode.FAILS), text


def cmd_graph(
    contract: str | Path,
    overrides: Overrides,
    dot: str | Path | None = None,
    net_only: bool = False,
) -> tuple[ExitCode, str]:
    """
    Export the reachability graph, or the net skeleton with ``net_only``.

    Returns the DOT text, or graph statistics when the DOT went to a file.
    """
    session = Session.open(load_contract(contract), overrides)
    if net_only:
        text = net_to_dot(session.net)
        summary = session.header()
    else:
        rg = session.explore()
        text = export_dot(rg)
        summary = session.header() + rg.stats().render() + "\n"
    if dot is None:
        return ExitCode.HOLDS, text
    write_atomic(dot, text)
    return ExitCode.HOLDS, summary


def cmd_stability(
    contract: str | Path, overrides: Overrides, report: str | Path | None = None
) -> tuple[ExitCode, str]:
    """Check whether the contract's current state can be left waiting indefinitely."""
    session = Session.open(load_contract(contract), overrides)
    result = state_stability(session.semantics, session.root, budget=session.budget)
    text = session.header() + result.render()
    if report is not None:
        write_atomic(report, text)
    return (ExitCode.HOLDS if result.stable else ExitCode.FAILS), text


def cmd_update(
    old: str | Path,
    new: str | Path,
    overrides: Overrides,
    report: str | Path | None = None,
) -> tuple[ExitCode, str]:
    """Check that replacing the old contract by the new one at its current state is safe."""
    before = Session.open(load_contract(old), overrides)
    after = Session.open(load_contract(new), overrides)
    policy = before.policy(overrides)
    result = update_safety(before.explore(), after.explore(), policy)
    text = before.header() + after.header() + f"policy: {policy.description}\n" + result.render()
    if report is not None:
        write_atomic(report, text)
    return (ExitCode.HOLDS if result.safe else ExitCode.FAILS), text
