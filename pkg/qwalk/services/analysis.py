"""
分析服務

Effective logical unitaries of gadgets and compiled circuits, comparison up
to global phase, the circuit-model oracle, and periodicity / perfect state
transfer on cycles.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray

from ..core.coins import phased_biased_coin
from ..core.engine import WalkState, propagate
from ..core.gadgets import Gadget
from ..core.graph import WalkGraph, cycle_graph
from ..errors import (
    CircuitError,
    DimensionMismatchError,
    InvariantError,
    NormalizationError,
    SynchronizationError,
    VerificationError,
)
from .compiler import (
    LEAKAGE_TOL,
    CircuitIR,
    basis_injections,
    lower,
    read_amplitudes,
    stray_by_column,
)

logger = logging.getLogger(__name__)

VERIFY_TOL = 1e-9
PERIOD_TOL = 1e-6
MAX_VERIFY_QUBITS = 6

_R = np.sqrt(0.5)
HADAMARD = np.array([[_R, _R], [_R, -_R]], dtype=np.complex128)
PHASE = np.diag([1.0, np.exp(1j * np.pi / 4)]).astype(np.complex128)

# Coin states tried per cycle setting by pst_scan.
SCAN_COIN_STATES: Tuple[Tuple[complex, complex], ...] = (
    (1.0, 0.0),
    (0.0, 1.0),
    (_R, 1j * _R),
    (_R, _R),
)


# === 有效么正矩陣 ===

@dataclass
class EffectiveUnitary:
    matrix: NDArray[np.complex128]
    corrected: NDArray[np.complex128]
    leakage: float
    leakage_by_input: Dict[str, float]
    stray_by_column: Dict[int, float]
    source: Gadget = field(repr=False)

    @property
    def labels(self) -> List[str]:
        return self.source.labels


def effective_unitary(gadget: Gadget, leakage_tol: float = LEAKAGE_TOL) -> EffectiveUnitary:
    """
    Column w is the readout after injecting basis wire w and running exactly
    `depth` steps; all injections evolve as one batch.

    Raises
    ------
    SynchronizationError
        Leakage above leakage_tol for some input.
    """
    amps = propagate(gadget.graph, basis_injections(gadget), gadget.depth)
    values, leakage, _ = read_amplitudes(gadget, amps)
    labels = gadget.labels

    stray: Dict[int, float] = {}
    for k in range(gadget.dim):
        for column, p in stray_by_column(gadget, amps[:, k]).items():
            stray[column] = max(stray.get(column, 0.0), p)

    worst = float(np.max(leakage)) if leakage.size else 0.0
    if worst > leakage_tol:
        column = max(stray, key=stray.get) if stray else None
        raise SynchronizationError(
            "basis injection leaks off the output rails",
            column=column, leakage=worst, input=labels[int(np.argmax(leakage))],
        )
    result = EffectiveUnitary(
        matrix=values,
        corrected=values * np.conj(gadget.wire_phase()),
        leakage=worst,
        leakage_by_input={w: float(x) for w, x in zip(labels, leakage)},
        stray_by_column=dict(sorted(stray.items())),
        source=gadget,
    )
    if worst <= 1e-10:
        error = float(np.max(np.abs(values.conj().T @ values - np.eye(gadget.dim))))
        if error > 1e-8:
            raise InvariantError("effective operator is not unitary", error=error,
                                 gadget=gadget.name)
    return result


def compare_up_to_global_phase(u, v) -> Tuple[float, float]:
    """(|tr(u†v)|/dim, arg tr(u†v)); fidelity is 1 iff v = e^{iθ}u."""
    u = np.asarray(u, dtype=np.complex128)
    v = np.asarray(v, dtype=np.complex128)
    if u.shape != v.shape or u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise DimensionMismatchError("operators must be square with equal shape",
                                     u=u.shape, v=v.shape)
    overlap = np.trace(u.conj().T @ v)
    return float(abs(overlap) / u.shape[0]), float(np.angle(overlap))


# === 電路模型 oracle ===

def embed_single(gate: NDArray[np.complex128], q: int, n: int) -> NDArray[np.complex128]:
    """gate on qubit q (1 = most significant) of n."""
    return np.kron(np.kron(np.eye(2 ** (q - 1)), gate), np.eye(2 ** (n - q)))


def cnot_permutation(control: int, target: int, n: int) -> NDArray[np.complex128]:
    dim = 2 ** n
    c_bit, t_bit = 1 << (n - control), 1 << (n - target)
    out = np.zeros((dim, dim), dtype=np.complex128)
    for i in range(dim):
        j = i ^ t_bit if i & c_bit else i
        out[j, i] = 1.0
    return out


def circuit_oracle(circuit: CircuitIR) -> NDArray[np.complex128]:
    """Ordered product of the gates' 2ⁿ×2ⁿ embeddings (first gate applied first)."""
    n = circuit.n
    u = np.eye(2 ** n, dtype=np.complex128)
    for gate in circuit.gates:
        if gate.kind == "H":
            g = embed_single(HADAMARD, gate.qubits[0], n)
        elif gate.kind == "P":
            g = embed_single(PHASE, gate.qubits[0], n)
        else:
            g = cnot_permutation(*gate.qubits, n)
        u = g @ u
    return u


@dataclass
class VerificationReport:
    n: int
    depth: int
    fidelity: float
    global_phase: float
    leakage: float
    stray_by_column: Dict[int, float]
    tol: float

    @property
    def passed(self) -> bool:
        return self.fidelity >= 1.0 - self.tol

    def to_dict(self) -> Dict:
        return {
            "n": self.n,
            "depth": self.depth,
            "fidelity": self.fidelity,
            "global_phase": self.global_phase,
            "leakage": self.leakage,
            "passed": self.passed,
            "stray_by_column": {str(k): v for k, v in self.stray_by_column.items()},
        }


def verify_circuit(circuit: CircuitIR, tol: float = VERIFY_TOL,
                   max_qubits: int = MAX_VERIFY_QUBITS, **lower_options) -> VerificationReport:
    """
    Lower, extract the effective unitary, compare with the oracle.

    Raises
    ------
    VerificationError
        Fidelity below 1 - tol; the report rides along on the exception.
    """
    if circuit.n > max_qubits:
        raise CircuitError("circuit too large to verify", n=circuit.n, limit=max_qubits)
    compiled = lower(circuit, **lower_options)
    effective = effective_unitary(compiled)
    fidelity, phase = compare_up_to_global_phase(circuit_oracle(circuit), effective.matrix)
    report = VerificationReport(circuit.n, compiled.depth, fidelity, phase, effective.leakage,
                                effective.stray_by_column, tol)
    if not report.passed:
        raise VerificationError("compiled graph does not implement the circuit",
                                report=report, fidelity=fidelity, tol=tol)
    logger.info(f"驗證通過: fidelity={fidelity:.15f}, phase={phase:.6f}, depth={compiled.depth}")
    return report


# === 週期與完美態傳輸 ===

def localized_state(graph: WalkGraph, vertex, coin_state: Sequence[complex],
                    tol: float = 1e-8) -> WalkState:
    coin_state = np.asarray(coin_state, dtype=np.complex128)
    v = graph.vertex(vertex)
    if coin_state.shape != (v.slots,):
        raise DimensionMismatchError("coin state does not match the vertex degree",
                                     vertex=v.id, slots=v.slots, got=coin_state.shape)
    if abs(np.linalg.norm(coin_state) - 1.0) > tol:
        raise NormalizationError("coin state is not normalized", vertex=v.id)
    state = WalkState.zeros(graph)
    state.amplitudes[list(graph.slot_range(v.id))] = coin_state
    return state


def _evolve(graph: WalkGraph, state: WalkState, t_max: int) -> NDArray[np.complex128]:
    """(t_max + 1, n_slots) amplitudes."""
    out = np.empty((t_max + 1, graph.n_slots), dtype=np.complex128)
    amps = state.amplitudes
    out[0] = amps
    for t in range(1, t_max + 1):
        amps = propagate(graph, amps, 1)
        out[t] = amps
    return out


def return_fidelity_trace(graph: WalkGraph, start_vertex, initial_coin_state: Sequence[complex],
                          t_max: int) -> List[float]:
    """f(t) = |⟨ψ₀|ψ_t⟩|² over the full (vertex, slot) state, t = 0..t_max."""
    psi0 = localized_state(graph, start_vertex, initial_coin_state)
    history = _evolve(graph, psi0, t_max)
    return [float(x) for x in np.abs(history @ psi0.amplitudes.conj()) ** 2]


def opposite_vertex(graph: WalkGraph, start_vertex) -> Optional[str]:
    """Vertex half way around a cycle built by cycle_graph; None for odd cycles."""
    n = len(graph.vertices)
    if n % 2:
        return None
    return str((int(start_vertex) + n // 2) % n)


def opposite_transfer_trace(graph: WalkGraph, start_vertex, initial_coin_state: Sequence[complex],
                            t_max: int, target=None) -> List[float]:
    """Probability at the target vertex (the opposite one by default), t = 0..t_max."""
    target = opposite_vertex(graph, start_vertex) if target is None else str(target)
    if target is None:
        raise DimensionMismatchError("odd cycles have no opposite vertex",
                                     size=len(graph.vertices))
    psi0 = localized_state(graph, start_vertex, initial_coin_state)
    history = _evolve(graph, psi0, t_max)
    slots = list(graph.slot_range(target))
    return [float(x) for x in np.sum(np.abs(history[:, slots]) ** 2, axis=1)]


def find_period(trace: Sequence[float], tol: float = PERIOD_TOL) -> Optional[int]:
    for t in range(1, len(trace)):
        if trace[t] >= 1.0 - tol:
            return t
    return None


@dataclass
class PeriodReport:
    cycle_size: int
    delta: float
    phase: float
    coin_state: Tuple[complex, ...]
    period: Optional[int]
    transfer_step: Optional[int]
    t_max: int

    @property
    def consistent(self) -> Optional[bool]:
        """2·transfer_step == period, when both exist."""
        if self.period is None or self.transfer_step is None:
            return None
        return 2 * self.transfer_step == self.period

    def to_row(self) -> Dict:
        return {
            "cycle_size": self.cycle_size,
            "delta": self.delta,
            "phase": self.phase,
            "coin_state": " ".join(f"{complex(c):.6g}" for c in self.coin_state),
            "period": "" if self.period is None else self.period,
            "transfer_step": "" if self.transfer_step is None else self.transfer_step,
            "consistent": "" if self.consistent is None else self.consistent,
            "t_max": self.t_max,
        }


def period_report(n: int, delta: float, phase: float, coin_state: Sequence[complex],
                  t_max: Optional[int] = None, tol: float = PERIOD_TOL,
                  phase_mode: str = "scalar") -> PeriodReport:
    t_max = 4 * n * n if t_max is None else t_max
    graph = cycle_graph(n, phased_biased_coin(delta, phase, phase_mode))
    psi0 = localized_state(graph, "0", coin_state)
    history = _evolve(graph, psi0, t_max)
    fidelity = np.abs(history @ psi0.amplitudes.conj()) ** 2
    period = find_period(fidelity, tol)

    transfer = None
    target = opposite_vertex(graph, "0")
    if target is not None:
        slots = list(graph.slot_range(target))
        arrival = np.sum(np.abs(history[:, slots]) ** 2, axis=1)
        transfer = find_period(arrival, tol)
    return PeriodReport(n, delta, phase, tuple(complex(c) for c in coin_state),
                        period, transfer, t_max)


def _best(reports: Iterable[PeriodReport]) -> PeriodReport:
    def key(r: PeriodReport):
        return (r.period is None, r.period or 0, r.transfer_step is None)
    return min(reports, key=key)


def _scan_one(args) -> PeriodReport:
    n, delta, phase, t_max, tol, phase_mode = args
    return _best(period_report(n, delta, phase, c, t_max, tol, phase_mode)
                 for c in SCAN_COIN_STATES)


def pst_scan(cycle_sizes: Iterable[int], delta_grid: Sequence[float], phase_grid: Sequence[float],
             t_max: Optional[int] = None, tol: float = PERIOD_TOL, phase_mode: str = "scalar",
             workers: int = 1) -> List[PeriodReport]:
    """
    Best PeriodReport per (cycle size, δ, phase) over a few initial coin
    states; periodic settings first, by period.
    """
    if not delta_grid or not phase_grid:
        raise ValueError("parameter grids must be non-empty")
    jobs = [(n, float(d), float(p), t_max, tol, phase_mode)
            for n, d, p in product(sorted(set(cycle_sizes)), delta_grid, phase_grid)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(_scan_one, jobs))
    else:
        reports = [_scan_one(job) for job in jobs]
    reports.sort(key=lambda r: (r.period is None, r.period or 0, r.cycle_size, r.delta, r.phase))

    periodic = sum(r.period is not None for r in reports)
    inconsistent = [r for r in reports if r.consistent is False]
    logger.info(f"PST 掃描完成: {len(reports)} settings, {periodic} periodic")
    if inconsistent:
        logger.warning(f"{len(inconsistent)} 組週期設定的傳輸步數不等於半週期")
    return reports


def find_target(reports: Iterable[PeriodReport], cycle_size: int, period: int,
                transfer_step: int) -> Optional[PeriodReport]:
    """Exploratory lookup; logs whether a matching setting turned up."""
    for r in reports:
        if (r.cycle_size, r.period, r.transfer_step) == (cycle_size, period, transfer_step):
            logger.info(f"找到目標設定: N={cycle_size}, δ={r.delta}, phase={r.phase}")
            return r
    logger.warning(f"找不到目標設定: N={cycle_size}, period {period}, transfer {transfer_step}")
    return None


def grid(lo: float, hi: float, steps: int, endpoint: bool = True) -> List[float]:
    """`steps` evenly spaced values from lo; hi is included when endpoint is set."""
    if steps < 1:
        raise ValueError("grid needs at least one step")
    if steps == 1:
        return [float(lo)]
    return [float(x) for x in np.linspace(lo, hi, steps, endpoint=endpoint)]
