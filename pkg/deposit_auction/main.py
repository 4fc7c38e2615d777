"""Command-line entry point."""

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from dotenv import dotenv_values
from pydantic import ValidationError

from deposit_auction import __version__
from deposit_auction.commands import deviation_scan, simulate, solve, verify
from deposit_auction.core.exceptions import ConfigurationError, DepositAuctionError
from deposit_auction.core.logging import get_logger, setup_logging
from deposit_auction.models.schemas import RunConfig

logger = get_logger(__name__)

COMMANDS = (solve, verify, simulate, deviation_scan)

# flags that take "key=value" arguments
ASSIGNMENTS = {
    "mutate": ("scale", "mutate_scale"),
    "response": ("d1", "response_d1"),
    "deviation_scan": ("v1", "v1"),
}

RENAMED = {"u": "marginal_u"}

RUNTIME_KEYS = {"config", "log_level", "log_json", "handler", "command"}


def _common_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    parser.add_argument("--regime", help="simultaneous | sequential | sequential-sqrt | sequential-uniform | pooling")
    parser.add_argument("--dist", help="sqrt | uniform | quadratic | power:<alpha>")
    parser.add_argument("--cost", type=float, help="Marginal deposit cost c")
    parser.add_argument("--seed", type=int, help="Root seed")
    parser.add_argument("--out", type=Path, help="Output file; stdout when absent")
    parser.add_argument("--config", type=Path, help="key=value file of flag defaults")
    parser.add_argument("--eps", type=float, help="Deviation gain tolerance")
    parser.add_argument("--step", type=float, help="ODE step")
    parser.add_argument("--dbar", type=float, help="Maximum deposit")
    parser.add_argument("--u", type=float, help="Evaluate the pooling profile at this marginal type")
    parser.add_argument("--log-level", dest="log_level", help="DEBUG | INFO | WARNING | ERROR")
    parser.add_argument("--log-json", dest="log_json", action="store_true", help="Emit JSON log records")
    return parser


def create_parser() -> argparse.ArgumentParser:
    """Build the top-level parser with one subparser per command."""
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="deposit-auction",
        description="Equilibria of second-price auctions with costly, visible deposits.",
        parents=[common],
        argument_default=argparse.SUPPRESS,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for command in COMMANDS:
        command.register(subparsers, [common])
    return parser


def _parse_assignment(flag: str, text: Any) -> Any:
    key, field = ASSIGNMENTS[flag]
    if not isinstance(text, str):
        return text
    name, sep, value = text.partition("=")
    if not sep:
        # a bare number is accepted too
        name, value = key, text
    if name.strip() != key:
        raise ConfigurationError(f"--{flag.replace('_', '-')} expects {key}=<x>", details={"value": text})
    try:
        return float(value)
    except ValueError as e:
        raise ConfigurationError(f"Invalid number in --{flag.replace('_', '-')}", details={"value": text}) from e


def _normalize(values: Dict[str, Any]) -> Dict[str, Any]:
    out: Dict[str, Any] = {}
    for raw_key, value in values.items():
        key = raw_key.strip().lower().lstrip("-").replace("-", "_")
        if key in ASSIGNMENTS:
            out[ASSIGNMENTS[key][1]] = _parse_assignment(key, value)
        else:
            out[RENAMED.get(key, key)] = value
    return out


def load_config_file(path: Path) -> Dict[str, Any]:
    """Read a flat key=value file whose keys mirror long flag names."""
    if not path.is_file():
        raise ConfigurationError("Config file not found", details={"path": str(path)})
    return _normalize({k: v for k, v in dotenv_values(path).items() if v is not None})


def build_config(args: argparse.Namespace) -> RunConfig:
    """Merge the config file with explicit flags; flags win."""
    given = vars(args)
    values: Dict[str, Any] = {}
    if given.get("config") is not None:
        values.update(load_config_file(given["config"]))
    values.update(_normalize({k: v for k, v in given.items() if k not in RUNTIME_KEYS}))
    for key in RUNTIME_KEYS:
        values.pop(key, None)

    unknown = sorted(set(values) - set(RunConfig.model_fields))
    if unknown:
        raise ConfigurationError("Unknown configuration keys", details={"keys": unknown})
    return RunConfig(**values)


def _fail(message: str, details: Dict[str, Any], code: int) -> int:
    sys.stderr.write(json.dumps({"error": message, "details": details}, default=str) + "\n")
    return code


def main(argv: Optional[List[str]] = None) -> int:
    """Run one command and return its exit code: 0 pass, 1 fail, 2 usage error."""
    parser = create_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    file_values: Dict[str, Any] = {}
    try:
        if getattr(args, "config", None) is not None:
            file_values = load_config_file(args.config)
    except ConfigurationError as e:
        return _fail(e.message, e.details, e.exit_code)

    level = getattr(args, "log_level", None) or file_values.get("log_level")
    json_logs = getattr(args, "log_json", None)
    if json_logs is None and "log_json" in file_values:
        json_logs = str(file_values["log_json"]).lower() in ("1", "true", "yes")
    setup_logging(level, json_logs)

    try:
        config = build_config(args)
        logger.info(
            "Running command",
            extra={"command": args.command, "regime": config.regime.value, "dist": config.dist, "c": config.cost},
        )
        return args.handler(config)
    except ValidationError as e:
        errors = [{"field": ".".join(str(p) for p in err["loc"]), "message": err["msg"]} for err in e.errors()]
        return _fail("Invalid configuration", {"errors": errors}, 2)
    except DepositAuctionError as e:
        logger.error(e.message, extra={"details": e.details})
        return _fail(e.message, e.details, e.exit_code)


if __name__ == "__main__":
    sys.exit(main())
