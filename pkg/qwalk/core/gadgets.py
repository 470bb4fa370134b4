"""
Double-rail graph gadgets: wire, C-NOT crossing, phase gate, Hadamard gate.

Layout conventions
------------------
- A degree-4 vertex has slots (in_a, in_b, out_a, out_b) = (0, 1, 2, 3) and
  carries the phased Grover coin. Rail a runs 2 -> 0, rail b runs 3 -> 1.
- A gadget's input vertex holds stubs on slots 0 and 1 (the input rails); its
  output vertex holds stubs on 2 and 3 and its output rails are the arrival
  slots 0 and 1.
- A vertex is traversed in one step. The input vertex and every intermediate
  vertex count toward depth; the output vertex does not, so chaining merges
  one gadget's output vertex with the next one's input vertex.
- Column metadata is the step at which the walker arrives at a vertex.
- A degree-2 detour replaces one degree-4 vertex by a pair of unphased G2
  vertices, one per rail, and keeps the timing.
"""

import logging
import re
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..errors import GraphError
from .coins import WIRE_PHASE, CoinSpec, g8_coin, grover_coin, phased_grover_coin
from .graph import GraphBuilder, SlotRef, WalkGraph, build_graph, graph_to_description

logger = logging.getLogger(__name__)

PHASE_GATE_DEPTH = 5
MIXER_DEPTH = 2
# Section C of the trimmed Hadamard gadget: unphased detours on each wire.
HADAMARD_TRIM = (7, 1)
HADAMARD_TRIM_DEPTH = 8


@dataclass(frozen=True)
class Port:
    label: str
    rails: Tuple[SlotRef, SlotRef]

    def __post_init__(self):
        if len(self.rails) != 2 or self.rails[0] == self.rails[1]:
            raise GraphError("a port needs two distinct rails", port=self.label)

    @property
    def vertex(self) -> str:
        return self.rails[0][0]

    def to_dict(self) -> Dict:
        return {"label": self.label, "rails": [list(r) for r in self.rails]}


@dataclass(eq=False)
class Gadget:
    graph: WalkGraph
    inputs: List[Port]
    outputs: List[Port]
    depth: int
    phase_per_column: complex = field(default=complex(np.exp(1j * WIRE_PHASE)))
    name: str = "gadget"

    @property
    def labels(self) -> List[str]:
        return [p.label for p in self.inputs]

    @property
    def dim(self) -> int:
        return len(self.inputs)

    def input_port(self, label: str) -> Port:
        return _find(self.inputs, label)

    def output_port(self, label: str) -> Port:
        return _find(self.outputs, label)

    def wire_phase(self) -> complex:
        """Phase a plain wire of the same depth would pick up."""
        return complex(self.phase_per_column ** self.depth)

    def ports_dict(self) -> Dict:
        return {
            "inputs": [p.to_dict() for p in self.inputs],
            "outputs": [p.to_dict() for p in self.outputs],
            "depth": self.depth,
        }


def _find(ports: Iterable[Port], label: str) -> Port:
    for p in ports:
        if p.label == label:
            return p
    raise GraphError("no port with this label", label=label)


def detour_plan(depth: int, detours: int) -> List[str]:
    """
    Kinds of the depth-1 intermediate vertices of one segment.

    Detours sit next to each other, one column after the input vertex when
    there is room, otherwise starting right at it.
    """
    if depth < 1:
        raise GraphError("segment depth must be at least 1", depth=depth)
    room = depth - 1
    if not 0 <= detours <= room:
        raise GraphError("too many detours for this segment", depth=depth, detours=detours)
    kinds = ["G4"] * room
    start = 1 if detours <= room - 1 else 0
    kinds[start:start + detours] = ["G2"] * detours
    return kinds


class RailAssembler:
    """
    Lays double-rail structure into one GraphBuilder.

    `frontier` maps each wire label to its current boundary vertex. Every
    layout method takes the column of that boundary vertex and returns the
    depth it added; the caller keeps the columns of all wires aligned.
    """

    def __init__(self, phi: float = WIRE_PHASE):
        self.phi = phi
        g4 = phased_grover_coin(4, phi) if phi else grover_coin(4)
        self.g4_label = g4.label
        self.coins: Dict[str, CoinSpec] = {g4.label: g4, "G2": grover_coin(2), "G8": g8_coin()}
        self.builder = GraphBuilder(self.coins)
        self.frontier: Dict[str, str] = {}
        self.inputs: List[Port] = []

    # --- vertices ---

    def _boundary(self, wire: str, column: int) -> str:
        return self.builder.add_vertex(f"w{wire}:t{column}", self.g4_label, 4, column, wire)

    def open(self, labels: Sequence[str], column: int = 0) -> None:
        for label in labels:
            vid = self._boundary(label, column)
            self.builder.stub((vid, 0))
            self.builder.stub((vid, 1))
            self.frontier[label] = vid
            self.inputs.append(Port(label, ((vid, 0), (vid, 1))))

    def close(self) -> List[Port]:
        outputs = []
        for label in sorted(self.frontier):
            vid = self.frontier[label]
            self.builder.stub((vid, 2))
            self.builder.stub((vid, 3))
            outputs.append(Port(label, ((vid, 0), (vid, 1))))
        return outputs

    def _lay(self, start: str, kinds: Sequence[str], wire: str, t0: int,
             end_wire: Optional[str] = None) -> str:
        """Intermediates after `start` (column t0), then a new boundary vertex."""
        b = self.builder
        rail_a, rail_b = (start, 2), (start, 3)
        for k, kind in enumerate(kinds, 1):
            column = t0 + k
            if kind == "G4":
                v = self._boundary(wire, column)
                b.connect(rail_a, (v, 0))
                b.connect(rail_b, (v, 1))
                rail_a, rail_b = (v, 2), (v, 3)
            elif kind == "G2":
                va = b.add_vertex(f"w{wire}:t{column}a", "G2", 2, column, wire)
                vb = b.add_vertex(f"w{wire}:t{column}b", "G2", 2, column, wire)
                b.connect(rail_a, (va, 0))
                b.connect(rail_b, (vb, 0))
                rail_a, rail_b = (va, 1), (vb, 1)
            else:
                raise GraphError("unknown segment vertex kind", kind=kind)
        end = self._boundary(end_wire or wire, t0 + len(kinds) + 1)
        b.connect(rail_a, (end, 0))
        b.connect(rail_b, (end, 1))
        return end

    # --- structures ---

    def segment(self, wire: str, depth: int, t0: int, detours: int = 0) -> int:
        self.frontier[wire] = self._lay(self.frontier[wire], detour_plan(depth, detours), wire, t0)
        return depth

    def cross(self, mapping: Mapping[str, str], length: int, t0: int) -> int:
        """Route wire src into the place of wire dst for every src -> dst."""
        if sorted(mapping) != sorted(mapping.values()):
            raise GraphError("a crossing must permute its wires", mapping=dict(mapping))
        ends = {
            dst: self._lay(self.frontier[src], ["G4"] * (length - 1), src, t0, end_wire=dst)
            for src, dst in mapping.items()
        }
        self.frontier.update(ends)
        return length

    def phase_section(self, w0: str, w1: str, t0: int, detours0: int = 0,
                      detours1: int = 1, depth: int = PHASE_GATE_DEPTH) -> int:
        self.segment(w0, depth, t0, detours0)
        self.segment(w1, depth, t0, detours1)
        return depth

    def mix(self, w0: str, w1: str, t0: int) -> int:
        """Both wires' rails meet at one G8 vertex and split onto two new wires."""
        b = self.builder
        v0, v1 = self.frontier[w0], self.frontier[w1]
        g = b.add_vertex(f"g8:{w0}:{w1}:t{t0 + 1}", "G8", 8, t0 + 1)
        for k, ref in enumerate([(v0, 2), (v0, 3), (v1, 2), (v1, 3)]):
            b.connect(ref, (g, k))
        e0 = self._boundary(w0, t0 + 2)
        e1 = self._boundary(w1, t0 + 2)
        for k, ref in enumerate([(e0, 0), (e0, 1), (e1, 0), (e1, 1)], 4):
            b.connect((g, k), ref)
        self.frontier[w0], self.frontier[w1] = e0, e1
        return MIXER_DEPTH

    def hadamard(self, w0: str, w1: str, t0: int, trim_global_phase: bool = True) -> int:
        """
        Section A (two phase sections), the G8 mixer, then section C.

        Relative to an equal-depth wire: A is diag(1, i), the mixer is
        (1/√2)[[-1, i], [i, -1]]. Two more phase sections for C give -H; the
        trimmed C, diag(e^{i7π/4}, e^{iπ/4}), gives e^{i3π/4}·H.
        """
        d = self.phase_section(w0, w1, t0)
        d += self.phase_section(w0, w1, t0 + d)
        d += self.mix(w0, w1, t0 + d)
        if trim_global_phase:
            d += self.phase_section(w0, w1, t0 + d, *HADAMARD_TRIM, depth=HADAMARD_TRIM_DEPTH)
        else:
            d += self.phase_section(w0, w1, t0 + d)
            d += self.phase_section(w0, w1, t0 + d)
        return d

    def gadget(self, depth: int, name: str) -> Gadget:
        outputs = self.close()
        graph = self.builder.build()
        logger.debug(f"結構 {name}: depth {depth}, {graph.summary()}")
        return Gadget(graph, sorted(self.inputs, key=lambda p: p.label), outputs, depth,
                      complex(np.exp(1j * self.phi)), name)


def hadamard_depth(trim_global_phase: bool = True) -> int:
    tail = HADAMARD_TRIM_DEPTH if trim_global_phase else 2 * PHASE_GATE_DEPTH
    return 2 * PHASE_GATE_DEPTH + MIXER_DEPTH + tail


def make_wire(length: int, phi: float = WIRE_PHASE, labels: Sequence[str] = ("0",)) -> Gadget:
    """Plain double-rail wire(s); each label gets its own parallel wire."""
    if length < 1:
        raise GraphError("wire length must be at least 1", length=length)
    asm = RailAssembler(phi)
    asm.open(labels)
    for label in labels:
        asm.segment(label, length, 0)
    return asm.gadget(length, f"wire{length}")


def make_cnot(length: int = 1, phi: float = WIRE_PHASE) -> Gadget:
    """
    Four wires labelled control-target; the two control=1 wires cross over.

    The crossing shares no vertex between wires.
    """
    if length < 1:
        raise GraphError("crossing length must be at least 1", length=length)
    labels = ["00", "01", "10", "11"]
    asm = RailAssembler(phi)
    asm.open(labels)
    asm.cross({"10": "11", "11": "10"}, length, 0)
    for label in ("00", "01"):
        asm.segment(label, length, 0)
    return asm.gadget(length, "cnot")


def make_phase_section(detours0: int, detours1: int, depth: int,
                       phi: float = WIRE_PHASE) -> Gadget:
    asm = RailAssembler(phi)
    asm.open(["0", "1"])
    asm.phase_section("0", "1", 0, detours0, detours1, depth)
    return asm.gadget(depth, f"phase_section{depth}")


def make_phase_gate(phi: float = WIRE_PHASE) -> Gadget:
    """P(π/8): the |1⟩ wire carries one degree-2 detour, |0⟩ none."""
    return make_phase_section(0, 1, PHASE_GATE_DEPTH, phi)


def make_hadamard_gate(trim_global_phase: bool = True, phi: float = WIRE_PHASE) -> Gadget:
    asm = RailAssembler(phi)
    asm.open(["0", "1"])
    depth = asm.hadamard("0", "1", 0, trim_global_phase)
    return asm.gadget(depth, "hadamard")


def gadget_depth(g: Gadget) -> int:
    return g.depth


_COLUMN = re.compile(r":t(\d+)")


def _shift_id(vid: str, offset: int) -> str:
    return _COLUMN.sub(lambda m: f":t{int(m.group(1)) + offset}", vid)


def compose(first: Gadget, second: Gadget) -> Gadget:
    """
    Chain two gadgets: each output vertex of `first` becomes the input vertex
    of the same-labelled port of `second`.
    """
    if sorted(p.label for p in first.outputs) != sorted(p.label for p in second.inputs):
        raise GraphError("port labels do not match", first=first.name, second=second.name)
    coins = dict(first.graph.coins)
    for label, coin in second.graph.coins.items():
        if label in coins and not coins[label].same_as(coin):
            raise GraphError("gadgets use different coins under one label", label=label)
        coins[label] = coin

    offset = first.depth
    rename = {p.vertex: first.output_port(p.label).vertex for p in second.inputs}

    def ref(r) -> List:
        vid = r[0]
        return [rename.get(vid, _shift_id(vid, offset)), r[1]]

    a = graph_to_description(first.graph, with_coins=False)
    b = graph_to_description(second.graph, with_coins=False)
    out_stubs = {(p.vertex, s) for p in first.outputs for s in (2, 3)}
    in_stubs = {(p.vertex, s) for p in second.inputs for s in (0, 1)}

    vertices = list(a["vertices"])
    for v in b["vertices"]:
        if v["id"] in rename:
            continue
        v = dict(v, id=_shift_id(v["id"], offset))
        if v.get("column") is not None:
            v["column"] += offset
        vertices.append(v)
    description = {
        "vertices": vertices,
        "edges": a["edges"] + [[ref(x), ref(y)] for x, y in b["edges"]],
        "stubs": [s for s in a["stubs"] if tuple(s) not in out_stubs]
        + [ref(s) for s in b["stubs"] if tuple(s) not in in_stubs],
    }
    graph = build_graph(description, coins=coins)
    outputs = [Port(p.label, tuple((ref(r)[0], r[1]) for r in p.rails)) for p in second.outputs]
    return Gadget(graph, list(first.inputs), outputs, first.depth + second.depth,
                  first.phase_per_column, f"{first.name}+{second.name}")
