"""
`pst` 子命令：掃描環上偏置係數的週期與完美態傳輸
"""

import logging
import math

from ..errors import UsageError
from ..schemas import RunConfig
from ..services.analysis import find_target, grid, pst_scan
from .common import emit

logger = logging.getLogger(__name__)

# 8-cycle setting reported with period 24 and transfer at 12; parameters unknown.
EXPLORATORY_TARGET = (8, 24, 12)


def register(subparsers) -> None:
    p = subparsers.add_parser("pst", help="periodicity / perfect state transfer scan on cycles")
    p.add_argument("--sizes", default="2,3,4,5,6,8,10", help="comma separated cycle sizes")
    p.add_argument("--delta-steps", type=int, default=11, help="bias grid points on [0, 1]")
    p.add_argument("--phase-steps", type=int, default=8, help="phase grid points on [0, 2π)")
    p.add_argument("--phase-mode", choices=["scalar", "relative"], default="scalar")
    p.add_argument("--t-max", type=int, default=None, help="default 4·N² per cycle")
    p.set_defaults(handler=handle)


def parse_sizes(text: str):
    try:
        sizes = sorted({int(s) for s in text.split(",") if s.strip()})
    except ValueError:
        raise UsageError("cycle sizes must be integers", sizes=text) from None
    if not sizes or sizes[0] < 1:
        raise UsageError("cycle sizes must be positive", sizes=text)
    return sizes


def handle(run: RunConfig, config: dict) -> int:
    opts = run.options
    sizes = parse_sizes(opts.get("sizes", "2,3,4,5,6,8,10"))
    t_max = opts.get("t_max")
    if run.max_steps is not None:
        t_max = min(t_max or run.max_steps, run.max_steps)

    deltas = grid(0.0, 1.0, opts.get("delta_steps", 11))
    phases = grid(0.0, 2 * math.pi, opts.get("phase_steps", 8), endpoint=False)
    reports = pst_scan(
        sizes, deltas, phases,
        t_max=t_max,
        tol=run.tol or config["tolerances"]["period"],
        phase_mode=opts.get("phase_mode", "scalar"),
        workers=config["scan"]["workers"],
    )
    if EXPLORATORY_TARGET[0] in sizes:
        find_target(reports, *EXPLORATORY_TARGET)

    rows = [r.to_row() for r in reports]
    header = list(rows[0]) if rows else ["cycle_size"]
    emit(run, rows, header=header, rows=[list(r.values()) for r in rows],
         pretty=lambda: "\n".join(
             f"N={r.cycle_size:<3} δ={r.delta:.4f} phase={r.phase:.4f} "
             f"period={r.period} transfer={r.transfer_step}" for r in reports))
    return 0
