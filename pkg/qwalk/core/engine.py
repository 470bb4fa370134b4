"""
Discrete-time coined walk evolution: coin on every vertex, then flip-flop shift.

Amplitudes are stored densely, one complex number per flat (vertex, slot)
index of a WalkGraph. The functions below also accept a 2-D array of shape
(n_slots, k) and evolve the k columns together.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray

from ..errors import DimensionMismatchError, NormalizationError
from .graph import WalkGraph, line_graph

logger = logging.getLogger(__name__)

STATE_NORM_TOL = 1e-10
INITIAL_NORM_TOL = 1e-8


@dataclass(eq=False)
class WalkState:
    """Amplitude vector bound to one graph."""

    graph: WalkGraph
    amplitudes: NDArray[np.complex128]

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (self.graph.n_slots,):
            raise DimensionMismatchError(
                "amplitude vector does not match the graph",
                expected=self.graph.n_slots,
                got=self.amplitudes.shape,
            )

    @classmethod
    def zeros(cls, graph: WalkGraph) -> "WalkState":
        return cls(graph, np.zeros(graph.n_slots, dtype=np.complex128))

    @classmethod
    def basis(cls, graph: WalkGraph, vid, slot: int) -> "WalkState":
        state = cls.zeros(graph)
        state.amplitudes[graph.flat(vid, slot)] = 1.0
        return state

    @classmethod
    def from_entries(cls, graph: WalkGraph,
                     entries: Iterable[Tuple[str, int, complex]]) -> "WalkState":
        """Sparse construction from (vertex, slot, amplitude); repeated slots add up."""
        state = cls.zeros(graph)
        for vid, slot, amp in entries:
            state.amplitudes[graph.flat(vid, int(slot))] += complex(amp)
        return state

    def entries(self, cutoff: float = 0.0) -> List[Tuple[str, int, complex]]:
        out = []
        for v in self.graph.vertices:
            for slot, j in enumerate(self.graph.slot_range(v.id)):
                amp = self.amplitudes[j]
                if abs(amp) > cutoff:
                    out.append((v.id, slot, complex(amp)))
        return out

    def amplitude(self, vid, slot: int) -> complex:
        return complex(self.amplitudes[self.graph.flat(vid, slot)])

    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def norm(self) -> float:
        return float(np.sqrt(self.norm_squared()))

    def vertex_probabilities(self) -> NDArray[np.float64]:
        """Probability per vertex, in graph.vertices order."""
        p = np.abs(self.amplitudes) ** 2
        return np.bincount(self.graph.slot_owner, weights=p, minlength=len(self.graph.vertices))

    def probability_by_vertex(self) -> Dict[str, float]:
        p = self.vertex_probabilities()
        return {v.id: float(p[i]) for i, v in enumerate(self.graph.vertices)}

    def probability_by_column(self) -> Dict[Optional[int], float]:
        out: Dict[Optional[int], float] = {}
        for v, p in zip(self.graph.vertices, self.vertex_probabilities()):
            out[v.column] = out.get(v.column, 0.0) + float(p)
        return out

    def overlap(self, other: "WalkState") -> complex:
        """⟨self|other⟩."""
        if other.graph is not self.graph:
            raise DimensionMismatchError("states live on different graphs")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def copy(self) -> "WalkState":
        return WalkState(self.graph, self.amplitudes.copy())


def coin_amplitudes(graph: WalkGraph, amps: NDArray[np.complex128]) -> NDArray[np.complex128]:
    out = np.empty_like(amps)
    for operator, idx in graph.coin_blocks:
        # idx is (m, d); amps[idx] is (m, d) or (m, d, k)
        out[idx] = np.einsum("ij,mj...->mi...", operator, amps[idx])
    return out


def shift_amplitudes(graph: WalkGraph, amps: NDArray[np.complex128]) -> NDArray[np.complex128]:
    # partner is an involution, so gathering equals scattering
    return amps[graph.partner]


def apply_coin(state: WalkState) -> WalkState:
    return WalkState(state.graph, coin_amplitudes(state.graph, state.amplitudes))


def apply_shift(state: WalkState) -> WalkState:
    return WalkState(state.graph, shift_amplitudes(state.graph, state.amplitudes))


def step(state: WalkState) -> WalkState:
    """One walk step: coin, then shift."""
    graph = state.graph
    return WalkState(graph, shift_amplitudes(graph, coin_amplitudes(graph, state.amplitudes)))


def propagate(graph: WalkGraph, amps: NDArray[np.complex128], t: int) -> NDArray[np.complex128]:
    """
    Evolve raw amplitudes for t steps.

    `amps` may be (n_slots,) or (n_slots, k); batched columns are independent
    walks on the same graph.
    """
    amps = np.asarray(amps, dtype=np.complex128)
    if amps.shape[0] != graph.n_slots:
        raise DimensionMismatchError("amplitude array does not match the graph",
                                     expected=graph.n_slots, got=amps.shape)
    for _ in range(t):
        amps = shift_amplitudes(graph, coin_amplitudes(graph, amps))
    return amps


@dataclass
class SimulationTrace:
    graph: WalkGraph
    steps: int
    snapshots: List[WalkState] = field(default_factory=list)

    @property
    def initial(self) -> WalkState:
        return self.snapshots[0]

    @property
    def final(self) -> WalkState:
        return self.snapshots[-1]

    def vertex_probabilities(self) -> NDArray[np.float64]:
        """(steps + 1, n_vertices) array."""
        return np.array([s.vertex_probabilities() for s in self.snapshots])

    def rows(self) -> List[Tuple[int, str, float]]:
        """(step, vertex, probability) in step then vertex order."""
        ids = [v.id for v in self.graph.vertices]
        return [
            (t, vid, float(p))
            for t, probs in enumerate(self.vertex_probabilities())
            for vid, p in zip(ids, probs)
        ]


def simulate(graph: WalkGraph, initial: WalkState, t: int,
             initial_tol: float = INITIAL_NORM_TOL,
             norm_tol: float = STATE_NORM_TOL) -> SimulationTrace:
    """
    Run t steps and keep every intermediate state.

    Raises
    ------
    NormalizationError
        If the initial norm is off by more than initial_tol, or any later
        state drifts by more than norm_tol.
    """
    if t < 0:
        raise ValueError(f"step count must be non-negative, got {t}")
    if initial.graph is not graph:
        raise DimensionMismatchError("initial state belongs to another graph")
    deviation = abs(initial.norm() - 1.0)
    if deviation > initial_tol:
        raise NormalizationError("initial state is not normalized",
                                 norm=initial.norm(), tol=initial_tol)

    state = WalkState(graph, initial.amplitudes.copy())
    trace = SimulationTrace(graph, t, [state])
    for k in range(1, t + 1):
        state = step(state)
        drift = abs(state.norm() - 1.0)
        if drift > norm_tol + deviation:
            raise NormalizationError("norm drifted during evolution", step=k, norm=state.norm())
        trace.snapshots.append(state)
    logger.debug(f"已模擬 {t} 步: {graph.summary()}")
    return trace


def step_matrix(graph: WalkGraph) -> NDArray[np.complex128]:
    """
    Dense one-step operator S·C, assembled from the coin table and the edge
    list without going through coin_amplitudes/shift_amplitudes.
    """
    n = graph.n_slots
    coin = np.zeros((n, n), dtype=np.complex128)
    for i, v in enumerate(graph.vertices):
        start = int(graph.offsets[i])
        block = graph.coins[v.coin].operator
        coin[start:start + v.slots, start:start + v.slots] = block

    shift = np.eye(n, dtype=np.complex128)
    for a, b in graph.edges:
        i, j = graph.flat(*a), graph.flat(*b)
        shift[[i, j], :] = 0
        shift[i, j] = 1
        shift[j, i] = 1
    return shift @ coin


# --- the walk on a line ---------------------------------------------------
#
# The line is a path graph whose vertex ids are the positions. A walker at
# rest at position x with coin label c sits in slot 1 - c (it arrived through
# the edge on the opposite side), and HAD_FF turns the Hadamard toss into
# that convention.

def line_slot(coin_label: int) -> int:
    return 1 - coin_label


def line_state(graph: WalkGraph, initial_coin: Sequence[complex] = (1, 0),
               position: int = 0) -> WalkState:
    alpha, beta = (complex(c) for c in initial_coin)
    return WalkState.from_entries(graph, [
        (str(position), line_slot(0), alpha),
        (str(position), line_slot(1), beta),
    ])


def line_walk(t: int, initial_coin: Sequence[complex] = (1, 0)) -> SimulationTrace:
    """
    Hadamard walk on the line for t steps, starting at position 0.

    The path spans positions -(t+1)..t+1 so the walker never reaches a stub.
    """
    if t < 0:
        raise ValueError(f"step count must be non-negative, got {t}")
    graph = line_graph(t + 1)
    return simulate(graph, line_state(graph, initial_coin), t)


def line_amplitudes(state: WalkState, cutoff: float = 1e-15) -> Dict[Tuple[int, int], complex]:
    """Amplitudes keyed by (position, coin label) of the line walk."""
    out = {}
    for vid, slot, amp in state.entries(cutoff):
        out[(int(vid), 1 - slot)] = amp
    return dict(sorted(out.items()))


def position_distribution(state: WalkState, cutoff: float = 0.0) -> Dict[int, float]:
    return {int(vid): p for vid, p in state.probability_by_vertex().items() if p > cutoff}


def position_std(state: WalkState) -> float:
    probs = state.probability_by_vertex()
    x = np.array([int(v) for v in probs], dtype=np.float64)
    p = np.array(list(probs.values()))
    mean = float(np.dot(p, x))
    return float(np.sqrt(max(np.dot(p, x ** 2) - mean ** 2, 0.0)))
