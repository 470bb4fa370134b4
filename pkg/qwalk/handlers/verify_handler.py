"""
`verify` 子命令：比對編譯後圖的有效么正矩陣與電路模型
"""

import logging

import numpy as np

from ..errors import UsageError, VerificationError
from ..schemas import RunConfig
from ..services.analysis import verify_circuit
from ..utils.random_graphs import random_circuit
from ..utils.serialization import dumps, write_text
from .common import emit
from .compile_handler import load_circuit

logger = logging.getLogger(__name__)

_HEADER = ("circuit", "n", "depth", "fidelity", "global_phase", "leakage", "passed")


def register(subparsers) -> None:
    p = subparsers.add_parser("verify", help="check a compiled circuit against its oracle")
    p.add_argument("circuit", nargs="?", help="circuit text file")
    p.add_argument("--no-trim", action="store_true")
    p.add_argument("--random", type=int, default=0, metavar="K",
                   help="also verify K random circuits drawn with --seed")
    p.add_argument("--qubits", type=int, default=3, help="qubit count of the random circuits")
    p.add_argument("--gates", type=int, default=6, help="gate count of the random circuits")
    p.set_defaults(handler=handle)


def _pretty(name: str, report) -> str:
    verdict = "PASS" if report.passed else "FAIL"
    return (f"{verdict}  {name} n={report.n} depth={report.depth}\n"
            f"fidelity      {report.fidelity:.15f}\n"
            f"global phase  {report.global_phase:+.12f}\n"
            f"leakage       {report.leakage:.3e}")


def _circuits(run: RunConfig):
    opts = run.options
    if run.inputs:
        yield run.inputs[0], load_circuit(run.inputs[0])
    count = opts.get("random") or 0
    if count:
        rng = np.random.default_rng(run.seed)
        for k in range(count):
            yield f"random{k}", random_circuit(rng, opts.get("qubits", 3), opts.get("gates", 6))


def handle(run: RunConfig, config: dict) -> int:
    if not run.inputs and not run.options.get("random"):
        raise UsageError("verify needs a circuit file or --random", subcommand=run.subcommand)
    compiler = config["compiler"]
    tol = run.tol or config["tolerances"]["verify"]

    results = []
    for name, circuit in _circuits(run):
        try:
            report = verify_circuit(
                circuit,
                tol=tol,
                max_qubits=compiler["verify_max_qubits"],
                phi=config["walk"]["phase"],
                trim_global_phase=compiler["hadamard_trim_global_phase"]
                and not run.options.get("no_trim"),
                cnot_length=compiler["cnot_length"],
            )
        except VerificationError as e:
            # 失敗時仍輸出報告，再交給 main 轉成結束碼
            if e.report is not None:
                failed = dict(e.report.to_dict(), circuit=name,
                              gates=[str(g) for g in circuit.gates])
                write_text(dumps(failed), run.out)
            raise
        results.append((name, report))

    rows = [dict(r.to_dict(), circuit=name) for name, r in results]
    payload = rows[0] if len(rows) == 1 else rows
    emit(run, payload,
         header=_HEADER,
         rows=[[row[k] for k in _HEADER] for row in rows],
         pretty=lambda: "\n".join(_pretty(name, r) for name, r in results))
    return 0
