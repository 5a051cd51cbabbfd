"""Tests for command orchestration."""

from pathlib import Path

import pytest

from src.exceptions import BudgetExceededError, PolicyError, ReplayError
from src.knowledge.objects import Actor
from src.properties.policies import BalancePolicy
from src.schemas.contract import ExplorationParameters
from src.services.commands import (
    ExitCode,
    Overrides,
    Session,
    cmd_graph,
    cmd_stability,
    cmd_update,
    cmd_verify,
    resolve_params,
    write_atomic,
)
from src.services.contract_loader import build_contract, load_contract
from src.settings import DEFAULT_MESSAGE_KINDS, settings
from tests.conftest import (
    COOP_CLOSE,
    DROP_ABORT,
    HTLC,
    HTLC_RESPONDER,
    contract_path,
)


class TestResolveParams:
    """Tests for parameter precedence."""

    def test_file_values(self) -> None:
        """Test that the contract file's parameters apply without flags."""
        params = resolve_params(load_contract(contract_path(HTLC)), Overrides())

        assert (params.conf_delay_int, params.conf_delay_ext, params.reorg_depth) == (0, 0, 0)
        assert params.message_kinds == frozenset()

    def test_flags_win(self) -> None:
        """Test that flags override the contract file."""
        params = resolve_params(
            load_contract(contract_path(HTLC)),
            Overrides(conf_delay_int=3, conf_delay_ext=1, reorg_depth=2),
        )

        assert (params.conf_delay_int, params.conf_delay_ext, params.reorg_depth) == (3, 1, 2)

    def test_settings_fallback(self) -> None:
        """Test that unset file values fall back to settings."""
        document = load_contract(contract_path(HTLC)).document.model_copy(
            update={
                "parameters": ExplorationParameters(conf_delay_ext=4),
                "message_kinds": None,
            }
        )

        params = resolve_params(build_contract(document), Overrides())

        assert params.conf_delay_int == settings.conf_delay_int
        assert params.conf_delay_ext == 4
        assert params.reorg_depth == settings.reorg_depth
        assert params.message_kinds == frozenset(DEFAULT_MESSAGE_KINDS)


class TestSession:
    """Tests for Session."""

    def test_file_snapshot(self, responder_session: Session) -> None:
        """Test that the contract's snapshot is replayed."""
        assert responder_session.root.marking == frozenset({"fund_A:0", "fund_B:0"})
        assert [step.label for step in responder_session.snapshot] == [
            "tb(fund_A)",
            "fund_A",
            "tb(fund_B)",
            "fund_B",
        ]

    def test_snapshot_override(self) -> None:
        """Test that a snapshot flag replaces the file's snapshot."""
        opened = Session.open(
            load_contract(contract_path(HTLC_RESPONDER)), Overrides(snapshot=())
        )

        assert opened.root.marking == frozenset({"coin_A:0", "coin_B:0"})
        assert opened.snapshot == ()

    def test_bad_snapshot(self) -> None:
        """Test that an unreplayable snapshot is an input error."""
        with pytest.raises(ReplayError):
            Session.open(load_contract(contract_path(HTLC)), Overrides(snapshot=("swap_A",)))

    def test_policy(self, htlc_session: Session) -> None:
        """Test that the policy flag overrides the contract's policy."""
        assert htlc_session.policy(Overrides()) == BalancePolicy(Actor.INT, 100)
        assert htlc_session.policy(Overrides(policy="balance:ext:5")) == BalancePolicy(
            Actor.EXT, 5
        )

    def test_missing_policy(self) -> None:
        """Test that a contract without policy needs the flag."""
        description = load_contract(contract_path(HTLC))
        document = description.document.model_copy(update={"policy": None})
        opened = Session.open(build_contract(document), Overrides())

        with pytest.raises(PolicyError, match="declares no policy"):
            opened.policy(Overrides())

    def test_header(self, htlc_session: Session, responder_session: Session) -> None:
        """Test that the header names contract, parameters, net and snapshot."""
        assert htlc_session.header() == (
            "contract: atomic_swap_htlc\n"
            "parameters: conf_delay_int=0 conf_delay_ext=0 reorg_depth=0\n"
            "net: 10 places, 8 transitions\n"
        )
        assert "snapshot: --tb(fund_A)-->" in responder_session.header()

    def test_budget(self) -> None:
        """Test that the budget flag bounds exploration."""
        opened = Session.open(load_contract(contract_path(HTLC)), Overrides(budget=3))

        with pytest.raises(BudgetExceededError):
            opened.explore()


class TestWriteAtomic:
    """Tests for write_atomic."""

    def test_writes(self, tmp_path: Path) -> None:
        """Test that the text lands in the target and no temporary file remains."""
        target = tmp_path / "report.txt"

        write_atomic(target, "first\n")
        write_atomic(target, "second\n")

        assert target.read_text(encoding="utf-8") == "second\n"
        assert [p.name for p in tmp_path.iterdir()] == ["report.txt"]

    def test_missing_directory(self, tmp_path: Path) -> None:
        """Test that an unwritable target raises OSError."""
        with pytest.raises(OSError):
            write_atomic(tmp_path / "absent" / "report.txt", "text")


class TestCommands:
    """Tests for the command functions."""

    def test_verify_holds(self, tmp_path: Path) -> None:
        """Test that verify writes its report and graph and exits with success."""
        report, dot = tmp_path / "report.txt", tmp_path / "rg.dot"

        code, text = cmd_verify(contract_path(HTLC), Overrides(), report=report, dot=dot)

        assert code is ExitCode.HOLDS
        assert "trustless execution: holds" in text
        assert report.read_text(encoding="utf-8") == text
        assert dot.read_text(encoding="utf-8").startswith("digraph reachability {")

    def test_verify_fails(self) -> None:
        """Test that a failing check exits with FAILS and a counterexample."""
        code, text = cmd_verify(contract_path(HTLC_RESPONDER), Overrides())

        assert code is ExitCode.FAILS
        assert "counterexample:" in text

    def test_verify_policy_flag(self) -> None:
        """Test that the policy flag replaces the contract's policy."""
        code, text = cmd_verify(contract_path(HTLC), Overrides(policy="balance:int:201"))

        assert code is ExitCode.FAILS
        assert "policy: balance:int:201" in text

    def test_graph_stdout(self) -> None:
        """Test that graph returns DOT text without an output file."""
        code, text = cmd_graph(contract_path(HTLC), Overrides())

        assert code is ExitCode.HOLDS
        assert text.startswith("digraph reachability {")

    def test_graph_net(self) -> None:
        """Test that graph can export the net skeleton."""
        _, text = cmd_graph(contract_path(HTLC), Overrides(), net_only=True)

        assert text.startswith("digraph tracenet {")

    def test_graph_file(self, tmp_path: Path) -> None:
        """Test that writing the graph to a file returns statistics instead."""
        dot = tmp_path / "rg.dot"

        _, text = cmd_graph(contract_path(HTLC), Overrides(), dot=dot)

        assert text.startswith("contract: atomic_swap_htlc\n")
        assert "nodes: " in text
        assert dot.read_text(encoding="utf-8").startswith("digraph reachability {")

    def test_stability(self) -> None:
        """Test that stability exits by the outcome."""
        stable, _ = cmd_stability(contract_path(HTLC), Overrides())
        unstable, text = cmd_stability(contract_path(HTLC_RESPONDER), Overrides())

        assert stable is ExitCode.HOLDS
        assert unstable is ExitCode.FAILS
        assert "state stability: unstable" in text

    @pytest.mark.parametrize("new, expected", [(COOP_CLOSE, ExitCode.HOLDS), (DROP_ABORT, ExitCode.FAILS)])
    def test_update(self, new: str, expected: ExitCode) -> None:
        """Test that update exits by the safety of the replacement."""
        code, text = cmd_update(contract_path(HTLC), contract_path(new), Overrides())

        assert code is expected
        assert "policy: balance:int:100\n" in text

    def test_graph_matches_verify(self, tmp_path: Path) -> None:
        """Test that graph and verify report the same exploration."""
        _, verify_text = cmd_verify(contract_path(HTLC), Overrides())
        _, graph_text = cmd_graph(contract_path(HTLC), Overrides(), dot=tmp_path / "rg.dot")

        nodes = [line for line in verify_text.splitlines() if line.startswith("nodes: ")]
        assert nodes
        assert nodes[0] in graph_text.splitlines()
