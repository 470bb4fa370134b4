"""
Random walk graphs, states and circuits for property checks.
"""

from typing import Optional

import numpy as np

from ..core.coins import unitary_coin
from ..core.engine import WalkState
from ..core.graph import GraphBuilder, WalkGraph
from ..services.compiler import CircuitIR, Gate


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random n×n unitary: QR of a Ginibre matrix, R's diagonal phases folded into Q."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_graph(rng: np.random.Generator, max_slots: int = 64, max_vertices: int = 10,
                 max_degree: int = 4, stub_fraction: float = 0.2) -> WalkGraph:
    """
    Random multigraph (self-loops allowed) with a Haar-random coin per degree.

    Slots are paired at random; a share of them, plus any odd one out,
    become stubs.
    """
    builder = GraphBuilder()
    degrees = []
    for _ in range(int(rng.integers(1, max_vertices + 1))):
        d = int(rng.integers(1, max_degree + 1))
        if sum(degrees) + d > max_slots:
            break
        degrees.append(d)
    for d in sorted(set(degrees)):
        builder.coins[f"U{d}"] = unitary_coin(haar_unitary(d, rng), f"U{d}")
    slots = []
    for i, d in enumerate(degrees):
        builder.add_vertex(i, f"U{d}", d)
        slots.extend((str(i), s) for s in range(d))

    order = rng.permutation(len(slots))
    shuffled = [slots[k] for k in order]
    n_stubs = int(round(stub_fraction * len(shuffled)))
    if (len(shuffled) - n_stubs) % 2:
        n_stubs += 1
    for ref in shuffled[:n_stubs]:
        builder.stub(ref)
    paired = shuffled[n_stubs:]
    for a, b in zip(paired[::2], paired[1::2]):
        builder.connect(a, b)
    return builder.build()


def random_state(graph: WalkGraph, rng: np.random.Generator,
                 scale: Optional[float] = None) -> WalkState:
    """Random normalized state, or with norm `scale` when given."""
    v = rng.standard_normal(graph.n_slots) + 1j * rng.standard_normal(graph.n_slots)
    v /= np.linalg.norm(v)
    if scale is not None:
        v *= scale
    return WalkState(graph, v)


def random_circuit(rng: np.random.Generator, n: int, length: int) -> CircuitIR:
    """`length` gates drawn uniformly from H, P and (for n > 1) CNOT."""
    kinds = ["H", "P", "CNOT"] if n > 1 else ["H", "P"]
    gates = []
    for _ in range(length):
        kind = kinds[int(rng.integers(len(kinds)))]
        if kind == "CNOT":
            control, target = rng.choice(np.arange(1, n + 1), size=2, replace=False)
            gates.append(Gate(kind, (int(control), int(target))))
        else:
            gates.append(Gate(kind, (int(rng.integers(1, n + 1)),)))
    return CircuitIR(n, gates)
