"""Trace-Net checker command-line entry point (``python -m src.main``)."""

import argparse
import logging
import sys
from collections.abc import Callable, Sequence

from pydantic import ValidationError

from src.exceptions import BudgetExceededError, TraceNetError
from src.services.commands import (
    ExitCode,
    Overrides,
    cmd_graph,
    cmd_stability,
    cmd_update,
    cmd_verify,
)
from src.settings import settings

logger = logging.getLogger(__name__)


def _non_negative(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a value >= 0, got {value}")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a value >= 1, got {value}")
    return value


def _add_exploration_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--conf-delay-int", type=_non_negative, help="Internal confirmation delay")
    parser.add_argument("--conf-delay-ext", type=_non_negative, help="External confirmation delay")
    parser.add_argument("--reorg-depth", type=_non_negative, help="Deepest reorg the adversary fires")
    parser.add_argument("--budget", type=_positive, help="Maximum number of explored states")
    parser.add_argument(
        "--snapshot",
        action="append",
        metavar="STEP",
        help="Replay step from the initial state, repeatable (replaces the file's snapshot)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tracenet",
        description="Model check Bitcoin contract protocols over their reachability graph",
    )
    parser.add_argument("--log-level", default=None, help="Overrides TRACENET_LOG_LEVEL")
    commands = parser.add_subparsers(dest="command", required=True)

    verify = commands.add_parser("verify", help="Check trustless execution")
    verify.add_argument("contract", help="Contract description file")
    _add_exploration_flags(verify)
    verify.add_argument("--policy", help="balance:<actor>:<min> or secret:<actor>:<object>")
    verify.add_argument("--report", help="Write the report to this file")
    verify.add_argument("--dot", help="Write the reachability graph as DOT")

    graph = commands.add_parser("graph", help="Export the reachability graph as DOT")
    graph.add_argument("contract", help="Contract description file")
    _add_exploration_flags(graph)
    graph.add_argument("--dot", help="Output file, stdout if omitted")
    graph.add_argument("--net", action="store_true", help="Export the net skeleton instead")

    stability = commands.add_parser("stability", help="Check state stability")
    stability.add_argument("contract", help="Contract description file")
    _add_exploration_flags(stability)
    stability.add_argument("--report", help="Write the report to this file")

    update = commands.add_parser("update", help="Check the safety of a contract update")
    update.add_argument("old", help="Contract before the update")
    update.add_argument("new", help="Contract after the update")
    _add_exploration_flags(update)
    update.add_argument("--policy", help="balance:<actor>:<min> or secret:<actor>:<object>")
    update.add_argument("--report", help="Write the report to this file")
    return parser


def _overrides(args: argparse.Namespace) -> Overrides:
    return Overrides(
        conf_delay_int=args.conf_delay_int,
        conf_delay_ext=args.conf_delay_ext,
        reorg_depth=args.reorg_depth,
        policy=getattr(args, "policy", None),
        budget=args.budget,
        snapshot=tuple(args.snapshot) if args.snapshot is not None else None,
    )


def _dispatch(args: argparse.Namespace) -> tuple[ExitCode, str]:
    overrides = _overrides(args)
    match args.command:
        case "verify":
            return cmd_verify(args.contract, overrides, report=args.report, dot=args.dot)
        case "graph":
            return cmd_graph(args.contract, overrides, dot=args.dot, net_only=args.net)
        case "stability":
            return cmd_stability(args.contract, overrides, report=args.report)
        case _:
            return cmd_update(args.old, args.new, overrides, report=args.report)


def _input_error(exc: Exception) -> ExitCode:
    logger.error("%s", exc)
    return ExitCode.INPUT_ERROR


def _budget_error(exc: Exception) -> ExitCode:
    logger.error("%s", exc)
    return ExitCode.BUDGET


# First match wins, so subclasses go before their bases.
EXCEPTION_HANDLERS: tuple[tuple[type[Exception], Callable[[Exception], ExitCode]], ...] = (
    (BudgetExceededError, _budget_error),
    (ValidationError, _input_error),
    (TraceNetError, _input_error),
    (OSError, _input_error),
)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=(args.log_level or settings.log_level).upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        code, text = _dispatch(args)
    except Exception as exc:
        for exc_type, handler in EXCEPTION_HANDLERS:
            if isinstance(exc, exc_type):
                return int(handler(exc))
        raise
    sys.stdout.write(text)
    return int(code)


if __name__ == "__main__":
    sys.exit(main())
