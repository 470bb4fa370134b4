"""
`compile` 子命令：電路檔 -> 圖檔、埠描述與放置報告
"""

import logging
from pathlib import Path

from ..schemas import RunConfig
from ..services.compiler import CompiledGraph, lower, parse_circuit
from ..utils.serialization import graph_data, placement_data, ports_data
from .common import emit, require_input, write_sidecar

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    p = subparsers.add_parser("compile", help="lower a circuit file to a walk graph")
    p.add_argument("circuit", help="circuit text file")
    p.add_argument("--no-trim", action="store_true",
                   help="Hadamard gadgets with four plain phase sections")
    p.set_defaults(handler=handle)


def load_circuit(path: str):
    return parse_circuit(Path(path).read_text(encoding="utf-8"))


def compile_file(path: str, options: dict, config: dict) -> CompiledGraph:
    compiler = config["compiler"]
    return lower(
        load_circuit(path),
        phi=config["walk"]["phase"],
        trim_global_phase=compiler["hadamard_trim_global_phase"] and not options.get("no_trim"),
        cnot_length=compiler["cnot_length"],
        max_qubits=compiler["max_qubits"],
    )


def _pretty(compiled: CompiledGraph) -> str:
    lines = [f"{compiled.n} qubits, {compiled.dim} wires, depth {compiled.depth}",
             compiled.graph.summary()]
    for p in compiled.placements:
        pairs = ", ".join(f"{a}-{b}" for a, b in p.pairs)
        lines.append(f"  gate {p.index} {p.kind} {list(p.qubits)}: "
                     f"{p.instances} instances, columns {p.columns[0]}..{p.columns[1]} [{pairs}]")
    return "\n".join(lines)


def handle(run: RunConfig, config: dict) -> int:
    compiled = compile_file(require_input(run, "circuit file"), run.options, config)
    placement = placement_data(compiled.placements)
    if run.out:
        emit(run, graph_data(compiled.graph))
        write_sidecar(run, "ports", ports_data(compiled))
        write_sidecar(run, "placement", placement)
    else:
        emit(run, {"graph": graph_data(compiled.graph), "ports": ports_data(compiled),
                   "placement": placement},
             header=("index", "kind", "qubits", "instances", "column_start", "column_end"),
             rows=[(p.index, p.kind, " ".join(map(str, p.qubits)), p.instances, *p.columns)
                   for p in compiled.placements],
             pretty=lambda: _pretty(compiled))
    return 0
