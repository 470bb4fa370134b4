"""
子命令共用的輸出工具
"""

import logging
from pathlib import Path
from typing import Any, Callable, Iterable, Optional, Sequence

from ..errors import UsageError
from ..schemas import RunConfig
from ..utils.serialization import csv_text, dumps, sidecar, write_text

logger = logging.getLogger(__name__)


def emit(run: RunConfig, payload: Any, header: Optional[Sequence[str]] = None,
         rows: Optional[Iterable[Sequence[Any]]] = None,
         pretty: Optional[Callable[[], str]] = None) -> None:
    """Write one result in the requested format to --out or stdout."""
    if run.format == "json":
        text = dumps(payload)
    elif run.format == "csv":
        if header is None:
            raise UsageError("this subcommand has no CSV output", subcommand=run.subcommand)
        text = csv_text(header, rows or [])
    else:
        text = pretty() if pretty else dumps(payload)
        if not text.endswith("\n"):
            text += "\n"
    write_text(text, run.out)
    if run.out:
        logger.info(f"輸出已寫入 {run.out}")


def write_sidecar(run: RunConfig, suffix: str, payload: Any) -> Optional[Path]:
    """graph.json -> graph.<suffix>.json next to --out; nothing when writing to stdout."""
    if not run.out:
        return None
    path = sidecar(run.out, suffix)
    write_text(dumps(payload), path)
    logger.info(f"附帶檔案已寫入 {path}")
    return path


def require_input(run: RunConfig, what: str) -> str:
    if not run.inputs:
        raise UsageError(f"missing {what}", subcommand=run.subcommand)
    return run.inputs[0]


def check_steps(run: RunConfig, steps: int) -> int:
    if steps < 0:
        raise UsageError("step count must be non-negative", steps=steps)
    if run.max_steps is not None and steps > run.max_steps:
        raise UsageError("step count exceeds --max-steps", steps=steps, max_steps=run.max_steps)
    return steps


def format_complex(z: complex) -> str:
    return f"{z.real:+.6f}{z.imag:+.6f}i"


def format_matrix(matrix) -> str:
    return "\n".join("  ".join(format_complex(complex(z)) for z in row) for row in matrix)
