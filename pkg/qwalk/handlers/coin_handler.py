"""
`coin` 子命令：輸出指定係數矩陣
"""

import logging

from ..core.coins import (
    biased_coin,
    check_unitary,
    g8_from_tensor,
    known_labels,
    phased_biased_coin,
    resolve_coin,
)
from ..errors import UsageError
from ..schemas import RunConfig
from ..utils.serialization import coin_dump
from .common import emit, format_matrix, require_input

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    p = subparsers.add_parser("coin", help="dump a coin matrix as [re, im] pairs")
    p.add_argument("label", help=f"coin label: {', '.join(known_labels())}, BIAS, G8_TENSOR")
    p.add_argument("--phi", type=float, default=None, help="phase for *_phased labels")
    p.add_argument("--delta", type=float, default=None, help="bias for BIAS")
    p.add_argument("--theta", type=float, default=0.0, help="coin phase for BIAS")
    p.add_argument("--phase-mode", choices=["scalar", "relative"], default="scalar")
    p.set_defaults(handler=handle)


def handle(run: RunConfig, config: dict) -> int:
    label = require_input(run, "coin label")
    opts = run.options
    if label.upper() == "BIAS":
        if opts.get("delta") is None:
            raise UsageError("BIAS needs --delta")
        if opts.get("theta"):
            coin = phased_biased_coin(opts["delta"], opts["theta"], opts.get("phase_mode", "scalar"))
        else:
            coin = biased_coin(opts["delta"])
    elif label.upper() == "G8_TENSOR":
        coin = g8_from_tensor()
    else:
        phi = opts.get("phi")
        if phi is None and label.endswith("_phased"):
            phi = config["walk"]["phase"]
        coin = resolve_coin(label, phi)

    tol = run.tol or config["tolerances"]["unitary"]
    if not check_unitary(coin, tol):
        logger.warning(f"硬幣 {coin.label} 在容差 {tol} 內不是么正矩陣")

    dump = coin_dump(coin)
    rows = [
        (i, j, z.real, z.imag)
        for i, row in enumerate(coin.operator)
        for j, z in enumerate(row)
    ]
    emit(run, dump, header=("row", "col", "re", "im"), rows=rows,
         pretty=lambda: f"{coin.label} (degree {coin.degree}, phase {coin.phase})\n"
                        f"{format_matrix(coin.operator)}")
    return 0
