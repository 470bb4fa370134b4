"""
`simulate` 子命令：執行漫步並輸出每步各頂點機率
"""

import logging

from ..core.engine import line_walk, simulate
from ..errors import UsageError
from ..schemas import RunConfig
from ..utils.serialization import load_graph, load_state, state_data
from .common import check_steps, emit, write_sidecar

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    p = subparsers.add_parser("simulate", help="evolve a state and emit per-step probabilities")
    p.add_argument("graph", nargs="?", help="graph JSON file")
    p.add_argument("--line", type=int, default=None, metavar="T",
                   help="Hadamard walk on a line for T steps from |0,0>")
    p.add_argument("--state", help="state JSON file ([vertex, slot, re, im] rows)")
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--amplitudes", action="store_true", help="also dump final amplitudes")
    p.set_defaults(handler=handle)


def handle(run: RunConfig, config: dict) -> int:
    opts = run.options
    tolerances = config["tolerances"]
    if opts.get("line") is not None:
        trace = line_walk(check_steps(run, opts["line"]))
    else:
        if not run.inputs:
            raise UsageError("simulate needs a graph file or --line")
        if not opts.get("state"):
            raise UsageError("simulate on a graph file needs --state")
        steps = opts.get("steps")
        if steps is None:
            if run.max_steps is None:
                raise UsageError("simulate needs --steps")
            steps = run.max_steps
        graph = load_graph(run.inputs[0])
        initial = load_state(graph, opts["state"])
        trace = simulate(graph, initial, check_steps(run, steps),
                         initial_tol=run.tol or tolerances["initial_norm"],
                         norm_tol=tolerances["state_norm"])

    rows = [(t, vid, p) for t, vid, p in trace.rows() if p > 0.0]
    payload = {
        "steps": trace.steps,
        "probabilities": [{"step": t, "vertex": vid, "probability": p} for t, vid, p in rows],
    }
    columns = trace.final.graph.columns()
    if set(columns) != {None}:
        # 結構圖依到達欄位彙總最終機率
        by_column = trace.final.probability_by_column()
        payload["columns"] = [
            {"column": c, "vertices": len(columns[c]), "probability": by_column[c]}
            for c in sorted(columns, key=lambda c: (c is None, c or 0))
        ]
    amplitudes = state_data(trace.final) if opts.get("amplitudes") else None
    if amplitudes is not None and not write_sidecar(run, "amplitudes", amplitudes):
        payload["amplitudes"] = amplitudes

    final = {vid: p for t, vid, p in rows if t == trace.steps}
    emit(run, payload, header=("step", "vertex", "probability"), rows=rows,
         pretty=lambda: "\n".join(f"{vid:>8}  {p:.12f}" for vid, p in final.items()))
    logger.info(f"模擬完成: {trace.steps} steps, final norm {trace.final.norm():.15f}")
    return 0
