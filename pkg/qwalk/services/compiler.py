"""
電路編譯服務

Parses circuits over {H, CNOT, P(π/8)} and lowers them to one synchronized
walk graph with a wire per computational basis label. Labels are n-bit
strings with qubit 1 as the most significant bit.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray

from ..core.coins import WIRE_PHASE
from ..core.engine import WalkState
from ..core.gadgets import PHASE_GATE_DEPTH, Gadget, RailAssembler, hadamard_depth
from ..errors import (
    CircuitError,
    ControlTargetError,
    DimensionMismatchError,
    NormalizationError,
    QubitIndexError,
    SynchronizationError,
    UnknownGateError,
)

logger = logging.getLogger(__name__)

MAX_QUBITS = 10
LEAKAGE_TOL = 1e-8

_ARITY = {"H": 1, "P": 1, "CNOT": 2}


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: Tuple[int, ...]
    line: Optional[int] = None

    def __str__(self) -> str:
        return f"{self.kind.lower()} {' '.join(map(str, self.qubits))}"


@dataclass
class CircuitIR:
    n: int
    gates: List[Gate] = field(default_factory=list)

    def __post_init__(self):
        if self.n < 1:
            raise QubitIndexError("circuit needs at least one qubit", n=self.n)
        for index, gate in enumerate(self.gates):
            _check_gate(gate, self.n, index)

    @property
    def labels(self) -> List[str]:
        return [format(i, f"0{self.n}b") for i in range(2 ** self.n)]


def _check_gate(gate: Gate, n: Optional[int], index: int) -> None:
    if gate.kind not in _ARITY:
        raise UnknownGateError("unknown gate", gate=gate.kind, index=index, line=gate.line)
    if len(gate.qubits) != _ARITY[gate.kind]:
        raise CircuitError("wrong number of qubit operands", gate=gate.kind,
                           index=index, line=gate.line)
    if gate.kind == "CNOT" and gate.qubits[0] == gate.qubits[1]:
        raise ControlTargetError("control and target must differ", qubit=gate.qubits[0],
                                 index=index, line=gate.line)
    if n is None:
        raise CircuitError("gate before the qubits declaration", index=index, line=gate.line)
    for q in gate.qubits:
        if not 1 <= q <= n:
            raise QubitIndexError("qubit index out of range", qubit=q, n=n,
                                  index=index, line=gate.line)


def parse_circuit(text: str) -> CircuitIR:
    """
    Parse the circuit text format.

    One instruction per line: `qubits <n>`, `h <q>`, `p <q>`,
    `cnot <control> <target>`. `#` starts a comment.
    """
    n: Optional[int] = None
    gates: List[Gate] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        tokens = raw.split("#", 1)[0].split()
        if not tokens:
            continue
        op, args = tokens[0].lower(), tokens[1:]
        try:
            values = tuple(int(a) for a in args)
        except ValueError:
            raise CircuitError("operands must be integers", line=lineno, text=raw.strip()) from None
        if op == "qubits":
            if n is not None:
                raise CircuitError("qubits declared twice", line=lineno)
            if len(values) != 1 or values[0] < 1:
                raise QubitIndexError("qubits needs one positive count", line=lineno)
            n = values[0]
            continue
        kind = op.upper()
        if kind not in _ARITY:
            raise UnknownGateError("unknown gate", gate=op, line=lineno)
        gate = Gate(kind, values, lineno)
        _check_gate(gate, n, len(gates))
        gates.append(gate)
    if n is None:
        raise CircuitError("missing qubits declaration")
    return CircuitIR(n, gates)


@dataclass
class Placement:
    index: int
    kind: str
    qubits: Tuple[int, ...]
    pairs: List[Tuple[str, str]]
    columns: Tuple[int, int]

    @property
    def instances(self) -> int:
        return len(self.pairs)

    def to_dict(self) -> Dict:
        return {
            "index": self.index,
            "kind": self.kind,
            "qubits": list(self.qubits),
            "instances": self.instances,
            "pairs": [list(p) for p in self.pairs],
            "columns": list(self.columns),
        }


@dataclass(eq=False)
class CompiledGraph(Gadget):
    n: int = 0
    placements: List[Placement] = field(default_factory=list)

    @property
    def max_degree(self) -> int:
        return self.graph.max_degree


def _bit(label: str, q: int) -> str:
    return label[q - 1]


def _flip(label: str, q: int) -> str:
    i = q - 1
    return label[:i] + ("1" if label[i] == "0" else "0") + label[i + 1:]


def gate_pairs(labels: Sequence[str], gate: Gate) -> List[Tuple[str, str]]:
    """
    Wire pairs a gate acts on.

    Single-qubit gate on q: (label, label with q set) for every label with q
    clear. CNOT: the same over bit `target`, restricted to control = 1.
    """
    if gate.kind == "CNOT":
        control, target = gate.qubits
        return [(w, _flip(w, target)) for w in labels
                if _bit(w, control) == "1" and _bit(w, target) == "0"]
    (q,) = gate.qubits
    return [(w, _flip(w, q)) for w in labels if _bit(w, q) == "0"]


def lower(circuit: CircuitIR, phi: float = WIRE_PHASE, trim_global_phase: bool = True,
          cnot_length: int = 1, max_qubits: int = MAX_QUBITS) -> CompiledGraph:
    """
    One column per gate. Every wire not covered by the column's gadgets is
    padded with plain wire of the column depth, so all paths take T steps.
    """
    if circuit.n > max_qubits:
        raise QubitIndexError("too many qubits for the wire encoding", n=circuit.n, limit=max_qubits)
    labels = circuit.labels
    asm = RailAssembler(phi)
    asm.open(labels)

    t = 0
    placements: List[Placement] = []
    for index, gate in enumerate(circuit.gates):
        pairs = gate_pairs(labels, gate)
        covered = {w for pair in pairs for w in pair}
        if gate.kind == "H":
            depth = hadamard_depth(trim_global_phase)
            for w0, w1 in pairs:
                asm.hadamard(w0, w1, t, trim_global_phase)
        elif gate.kind == "P":
            depth = PHASE_GATE_DEPTH
            for w0, w1 in pairs:
                asm.phase_section(w0, w1, t)
        else:
            depth = cnot_length
            mapping = {}
            for w0, w1 in pairs:
                mapping[w0], mapping[w1] = w1, w0
            asm.cross(mapping, cnot_length, t)
        for w in labels:
            if w not in covered:
                asm.segment(w, depth, t)
        placements.append(Placement(index, gate.kind, gate.qubits, pairs, (t, t + depth)))
        logger.debug(f"閘 {index} {gate}: {len(pairs)} 個實例, 欄 {t}..{t + depth}")
        t += depth

    gadget = asm.gadget(t, "circuit")
    compiled = CompiledGraph(gadget.graph, gadget.inputs, gadget.outputs, t,
                             gadget.phase_per_column, "circuit", circuit.n, placements)
    logger.info(f"電路編譯完成: {circuit.n} qubits, {len(labels)} wires, depth {t}, "
                f"{compiled.graph.summary()}")
    return compiled


# --- injection and readout ---

def _rail_indices(g: Gadget, ports) -> Tuple[NDArray[np.int64], NDArray[np.int64]]:
    a = np.array([g.graph.flat(*p.rails[0]) for p in ports], dtype=np.int64)
    b = np.array([g.graph.flat(*p.rails[1]) for p in ports], dtype=np.int64)
    return a, b


def basis_injections(g: Gadget) -> NDArray[np.complex128]:
    """(n_slots, dim) array; column w is basis wire w split over its input rails."""
    a, b = _rail_indices(g, g.inputs)
    amps = np.zeros((g.graph.n_slots, g.dim), dtype=np.complex128)
    cols = np.arange(g.dim)
    amps[a, cols] = np.sqrt(0.5)
    amps[b, cols] = np.sqrt(0.5)
    return amps


def inject(compiled: Gadget, logical: Sequence[complex], tol: float = 1e-8) -> WalkState:
    """c_w/√2 on each of wire w's input rails."""
    logical = np.asarray(logical, dtype=np.complex128)
    if logical.shape != (compiled.dim,):
        raise DimensionMismatchError("logical vector does not match the wire count",
                                     expected=compiled.dim, got=logical.shape)
    norm = float(np.linalg.norm(logical))
    if abs(norm - 1.0) > tol:
        raise NormalizationError("logical input is not normalized", norm=norm)
    return WalkState(compiled.graph, basis_injections(compiled) @ logical)


@dataclass
class Readout:
    labels: List[str]
    amplitudes: NDArray[np.complex128]
    corrected: NDArray[np.complex128]
    leakage: float
    rail_mismatch: Dict[str, float]
    stray_by_column: Dict[int, float]
    depth: int

    def probabilities(self) -> NDArray[np.float64]:
        return np.abs(self.amplitudes) ** 2

    def worst_column(self) -> Optional[int]:
        if not self.stray_by_column:
            return None
        return max(self.stray_by_column, key=self.stray_by_column.get)


def stray_by_column(g: Gadget, amps: NDArray[np.complex128]) -> Dict[int, float]:
    """Probability off the output rails, summed per vertex column."""
    a, b = _rail_indices(g, g.outputs)
    p = np.abs(amps) ** 2
    p[a] = 0.0
    p[b] = 0.0
    per_vertex = np.bincount(g.graph.slot_owner, weights=p, minlength=len(g.graph.vertices))
    out: Dict[int, float] = {}
    for v, q in zip(g.graph.vertices, per_vertex):
        if q > 0.0:
            column = -1 if v.column is None else v.column
            out[column] = out.get(column, 0.0) + float(q)
    return dict(sorted(out.items()))


def read_amplitudes(g: Gadget, amps: NDArray[np.complex128]):
    """
    Logical amplitudes √2·(rail a), leakage and rail mismatch for raw
    amplitudes of shape (n_slots,) or (n_slots, k).
    """
    a, b = _rail_indices(g, g.outputs)
    rail_a, rail_b = amps[a], amps[b]
    on_rails = np.sum(np.abs(rail_a) ** 2 + np.abs(rail_b) ** 2, axis=0)
    total = np.sum(np.abs(amps) ** 2, axis=0)
    leakage = np.maximum(total - on_rails, 0.0)
    return np.sqrt(2.0) * rail_a, leakage, np.abs(rail_a - rail_b)


def readout(final: WalkState, compiled: Gadget, tol: float = LEAKAGE_TOL) -> Readout:
    """
    Raises
    ------
    SynchronizationError
        Leakage or rail mismatch above tol; names the column holding the
        most stray probability.
    """
    values, leakage, mismatch = read_amplitudes(compiled, final.amplitudes)
    labels = [p.label for p in compiled.outputs]
    result = Readout(
        labels=labels,
        amplitudes=values,
        corrected=values * np.conj(compiled.wire_phase()),
        leakage=float(leakage),
        rail_mismatch={w: float(m) for w, m in zip(labels, mismatch)},
        stray_by_column=stray_by_column(compiled, final.amplitudes),
        depth=compiled.depth,
    )
    worst = max(result.rail_mismatch.values(), default=0.0)
    if result.leakage > tol or worst > tol:
        column = result.worst_column()
        raise SynchronizationError(
            "probability off the output rails at the readout step",
            column=column, leakage=result.leakage, rail_mismatch=worst,
        )
    return result
