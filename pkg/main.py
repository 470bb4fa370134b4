import argparse
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from config_loader import load_config
from qwalk.errors import QWalkError
from qwalk.handlers import coin_handler, compile_handler, gadget_handler, pst_handler, simulate_handler, verify_handler
from qwalk.schemas import RunConfig

HANDLERS = {
    "coin": coin_handler,
    "gadget": gadget_handler,
    "compile": compile_handler,
    "simulate": simulate_handler,
    "verify": verify_handler,
    "pst": pst_handler,
}

# 子命令的位置參數，其餘參數放進 RunConfig.options
_POSITIONAL = {
    "coin": "label",
    "gadget": "name",
    "compile": "circuit",
    "simulate": "graph",
    "verify": "circuit",
}
_GLOBAL = {"subcommand", "handler", "tol", "format", "out", "max_steps", "seed", "log_level"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qwalk",
        description="Discrete-time coined quantum walk engine and gate gadget compiler",
    )
    parser.add_argument("--tol", type=float, default=None, help="tolerance override")
    parser.add_argument("--format", choices=["json", "csv", "pretty"], default=None)
    parser.add_argument("--out", "-o", default=None, help="output path (stdout when omitted)")
    parser.add_argument("--max-steps", type=int, default=None, help="upper bound on walk steps")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING, ...")
    subparsers = parser.add_subparsers(dest="subcommand", required=True)
    for module in HANDLERS.values():
        module.register(subparsers)
    return parser


def to_run_config(args: argparse.Namespace, config: dict) -> RunConfig:
    values = vars(args)
    positional = _POSITIONAL.get(args.subcommand)
    inputs = [values[positional]] if positional and values.get(positional) else []
    options = {k: v for k, v in values.items() if k not in _GLOBAL and k != positional}
    return RunConfig(
        subcommand=args.subcommand,
        inputs=inputs,
        out=args.out,
        tol=args.tol,
        format=args.format or config["output"]["format"],
        max_steps=args.max_steps,
        seed=args.seed if args.seed is not None else config["scan"]["random_seed"],
        options=options,
    )


def run(run_config: RunConfig, config: dict) -> int:
    """Dispatch one subcommand; returns the process exit code."""
    try:
        return HANDLERS[run_config.subcommand].handle(run_config, config)
    except FileNotFoundError as e:
        logging.error(f"找不到檔案: {e.filename}")
        return 3
    except QWalkError as e:
        logging.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    except ValidationError as e:
        logging.error(f"設定錯誤: {e}")
        return 2
    except Exception as e:
        logging.exception(f"未預期的錯誤: {e}")
        return 1


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config()
    except ValidationError as e:
        logging.basicConfig(level=logging.INFO)
        logging.error(f"設定錯誤: {e}")
        return 2

    level = (args.log_level or config["output"]["log_level"]).upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        run_config = to_run_config(args, config)
    except ValidationError as e:
        logging.error(f"參數錯誤: {e}")
        return 2
    return run(run_config, config)


if __name__ == '__main__':
    sys.exit(main())
