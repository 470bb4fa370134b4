"""
`gadget` 子命令：輸出單一結構的圖檔與埠描述
"""

import logging

from ..core.gadgets import make_cnot, make_hadamard_gate, make_phase_gate, make_wire
from ..errors import UsageError
from ..schemas import RunConfig
from ..utils.serialization import graph_data, ports_data
from .common import emit, require_input, write_sidecar

logger = logging.getLogger(__name__)

GADGETS = ("wire", "cnot", "phase", "hadamard")


def register(subparsers) -> None:
    p = subparsers.add_parser("gadget", help="emit a gadget graph and its ports sidecar")
    p.add_argument("name", choices=GADGETS)
    p.add_argument("--length", type=int, default=None, help="wire or crossing length")
    p.add_argument("--no-trim", action="store_true",
                   help="Hadamard gadget with four plain phase sections")
    p.set_defaults(handler=handle)


def build(name: str, options: dict, config: dict):
    phi = config["walk"]["phase"]
    length = options.get("length")
    if name == "wire":
        return make_wire(length or 4, phi)
    if name == "cnot":
        return make_cnot(length or config["compiler"]["cnot_length"], phi)
    if name == "phase":
        return make_phase_gate(phi)
    if name == "hadamard":
        trim = config["compiler"]["hadamard_trim_global_phase"] and not options.get("no_trim")
        return make_hadamard_gate(trim, phi)
    raise UsageError("unknown gadget", name=name, choices=list(GADGETS))


def handle(run: RunConfig, config: dict) -> int:
    name = require_input(run, "gadget name")
    gadget = build(name, run.options, config)
    logger.info(f"結構 {name}: depth {gadget.depth}, {gadget.graph.summary()}")

    ports = ports_data(gadget)
    if run.out:
        emit(run, graph_data(gadget.graph))
        write_sidecar(run, "ports", ports)
    else:
        emit(run, {"graph": graph_data(gadget.graph), "ports": ports},
             pretty=lambda: f"{name}: depth {gadget.depth}, {gadget.graph.summary()}")
    return 0
