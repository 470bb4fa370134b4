"""
Walk graphs: undirected multigraphs with ordered slots per vertex.

A slot is one incident half-edge position at a vertex. Every slot belongs to
exactly one edge or is a terminal stub. Coin rows/columns index the slots of
a vertex in slot order.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from types import MappingProxyType
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

import numpy as np
from numpy.typing import NDArray

from ..errors import (
    CoinDegreeError,
    DuplicateVertexError,
    GraphError,
    SlotAssignmentError,
    UnknownCoinError,
    UnknownVertexError,
)
from .coins import CoinSpec, resolve_coin

logger = logging.getLogger(__name__)

SlotRef = Tuple[str, int]
Edge = Tuple[SlotRef, SlotRef]


@dataclass(frozen=True)
class Vertex:
    id: str
    coin: str
    slots: int
    column: Optional[int] = None
    wire: Optional[str] = None


@dataclass(frozen=True, eq=False)
class WalkGraph:
    """
    Validated, immutable walk graph.

    Use build_graph() or GraphBuilder.build(); the constructor does not check
    invariants.
    """

    vertices: Tuple[Vertex, ...]
    edges: Tuple[Edge, ...]
    stubs: Tuple[SlotRef, ...]
    coins: Mapping[str, CoinSpec] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "stubs", tuple(self.stubs))
        object.__setattr__(self, "coins", MappingProxyType(dict(self.coins)))

    @cached_property
    def index(self) -> Dict[str, int]:
        return {v.id: i for i, v in enumerate(self.vertices)}

    @cached_property
    def offsets(self) -> NDArray[np.int64]:
        """offsets[i] is the flat index of slot 0 of vertex i; offsets[-1] is n_slots."""
        sizes = np.array([v.slots for v in self.vertices], dtype=np.int64)
        return np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64)

    @property
    def n_slots(self) -> int:
        return int(self.offsets[-1])

    def vertex(self, vid) -> Vertex:
        try:
            return self.vertices[self.index[str(vid)]]
        except KeyError:
            raise UnknownVertexError("no such vertex", vertex=str(vid)) from None

    def flat(self, vid, slot: int) -> int:
        """Flat amplitude index of (vertex, slot)."""
        v = self.vertex(vid)
        if not 0 <= slot < v.slots:
            raise SlotAssignmentError("slot out of range", vertex=v.id, slot=slot, slots=v.slots)
        return int(self.offsets[self.index[v.id]] + slot)

    def slot_range(self, vid) -> range:
        i = self.index[str(vid)]
        return range(int(self.offsets[i]), int(self.offsets[i + 1]))

    @cached_property
    def slot_owner(self) -> NDArray[np.int64]:
        """Vertex index for every flat slot."""
        return np.repeat(np.arange(len(self.vertices)), [v.slots for v in self.vertices])

    @cached_property
    def partner(self) -> NDArray[np.int64]:
        """
        Flip-flop shift as an index involution: amplitude at flat index j
        moves to partner[j]. Stubs are fixed points.
        """
        partner = np.arange(self.n_slots, dtype=np.int64)
        for a, b in self.edges:
            i, j = self.flat(*a), self.flat(*b)
            partner[i] = j
            partner[j] = i
        return partner

    @cached_property
    def coin_blocks(self) -> List[Tuple[NDArray[np.complex128], NDArray[np.int64]]]:
        """
        (operator, slot index array of shape (m, d)) for each coin label, so
        that a whole class of vertices is updated in one einsum.
        """
        groups: Dict[str, List[int]] = {}
        for i, v in enumerate(self.vertices):
            groups.setdefault(v.coin, []).append(i)
        blocks = []
        for label in sorted(groups):
            members = groups[label]
            d = self.vertices[members[0]].slots
            starts = self.offsets[members]
            idx = starts[:, None] + np.arange(d)[None, :]
            blocks.append((self.coins[label].operator, idx))
        return blocks

    @cached_property
    def max_degree(self) -> int:
        return max((v.slots for v in self.vertices), default=0)

    def columns(self) -> Dict[Optional[int], List[str]]:
        out: Dict[Optional[int], List[str]] = {}
        for v in self.vertices:
            out.setdefault(v.column, []).append(v.id)
        return out

    def summary(self) -> str:
        return (f"{len(self.vertices)} vertices, {len(self.edges)} edges, "
                f"{len(self.stubs)} stubs, {self.n_slots} slots")


def _as_ref(raw) -> SlotRef:
    try:
        vid, slot = raw
    except (TypeError, ValueError):
        raise GraphError("slot reference must be a [vertex, slot] pair", value=raw) from None
    if isinstance(slot, bool) or not isinstance(slot, (int, np.integer)):
        raise GraphError("slot index must be an integer", value=raw)
    return str(vid), int(slot)


def build_graph(description: Union[Mapping[str, Any], Any],
                coins: Optional[Mapping[str, CoinSpec]] = None) -> WalkGraph:
    """
    Validate a graph description and return a WalkGraph.

    `description` is a mapping in the graph file layout
    ({"vertices": [...], "edges": [...], "stubs": [...]}) or a GraphFile
    model. `coins` overrides the label registry.

    Raises
    ------
    DuplicateVertexError, UnknownVertexError
    SlotAssignmentError  a slot is out of range, uncovered or covered twice
    UnknownCoinError     a coin label resolves to nothing
    CoinDegreeError      coin degree differs from the vertex slot count
    """
    if hasattr(description, "model_dump"):
        description = description.model_dump()
    table: Dict[str, CoinSpec] = dict(coins or {})

    vertices: List[Vertex] = []
    seen = set()
    for raw in description.get("vertices", []):
        vid = str(raw["id"])
        if vid in seen:
            raise DuplicateVertexError("vertex id used twice", vertex=vid)
        seen.add(vid)
        slots = int(raw["slots"])
        if slots < 1:
            raise SlotAssignmentError("vertex needs at least one slot", vertex=vid, slots=slots)
        vertices.append(Vertex(vid, str(raw["coin"]), slots, raw.get("column"), raw.get("wire")))

    by_id = {v.id: v for v in vertices}
    cover: Dict[SlotRef, str] = {}

    def claim(ref: SlotRef, what: str) -> None:
        vid, slot = ref
        if vid not in by_id:
            raise UnknownVertexError(f"{what} refers to an unknown vertex", vertex=vid)
        if not 0 <= slot < by_id[vid].slots:
            raise SlotAssignmentError(f"{what} uses a slot out of range",
                                      vertex=vid, slot=slot, slots=by_id[vid].slots)
        if ref in cover:
            raise SlotAssignmentError("slot covered twice", vertex=vid, slot=slot,
                                      first=cover[ref], second=what)
        cover[ref] = what

    edges: List[Edge] = []
    for k, raw in enumerate(description.get("edges", [])):
        if len(raw) != 2:
            raise GraphError("edge must join exactly two slots", edge=k)
        a, b = _as_ref(raw[0]), _as_ref(raw[1])
        claim(a, f"edge {k}")
        claim(b, f"edge {k}")
        edges.append((a, b))

    stubs: List[SlotRef] = []
    for k, raw in enumerate(description.get("stubs", [])):
        ref = _as_ref(raw)
        claim(ref, f"stub {k}")
        stubs.append(ref)

    for v in vertices:
        for slot in range(v.slots):
            if (v.id, slot) not in cover:
                raise SlotAssignmentError("dangling slot: neither edge nor stub",
                                          vertex=v.id, slot=slot)

    for v in vertices:
        if v.coin not in table:
            try:
                table[v.coin] = resolve_coin(v.coin)
            except UnknownCoinError:
                raise UnknownCoinError("unknown coin label", label=v.coin, vertex=v.id) from None
        if table[v.coin].degree != v.slots:
            raise CoinDegreeError("coin degree does not match slot count", vertex=v.id,
                                  coin=v.coin, degree=table[v.coin].degree, slots=v.slots)

    used = {v.coin for v in vertices}
    graph = WalkGraph(tuple(vertices), tuple(edges), tuple(stubs),
                      {label: table[label] for label in sorted(used)})
    logger.debug(f"圖建立完成: {graph.summary()}")
    return graph


class GraphBuilder:
    """Incremental construction, validated by build_graph() at the end."""

    def __init__(self, coins: Optional[Mapping[str, CoinSpec]] = None):
        self.coins: Dict[str, CoinSpec] = dict(coins or {})
        self._vertices: Dict[str, Dict[str, Any]] = {}
        self._edges: List[Edge] = []
        self._stubs: List[SlotRef] = []

    def add_vertex(self, vid, coin: str, slots: int, column: Optional[int] = None,
                   wire: Optional[str] = None) -> str:
        vid = str(vid)
        if vid in self._vertices:
            raise DuplicateVertexError("vertex id used twice", vertex=vid)
        self._vertices[vid] = {"id": vid, "coin": coin, "slots": slots,
                               "column": column, "wire": wire}
        return vid

    def connect(self, a: SlotRef, b: SlotRef) -> None:
        self._edges.append((a, b))

    def stub(self, ref: SlotRef) -> None:
        self._stubs.append(ref)

    def describe(self) -> Dict[str, Any]:
        return {
            "vertices": list(self._vertices.values()),
            "edges": [[list(a), list(b)] for a, b in self._edges],
            "stubs": [list(s) for s in self._stubs],
        }

    def build(self) -> WalkGraph:
        return build_graph(self.describe(), coins=self.coins)


def cycle_graph(n: int, coin: Union[str, CoinSpec] = "HAD") -> WalkGraph:
    """
    N-cycle with vertices "0".."n-1". Slot 0 points to i-1, slot 1 to i+1.
    n=1 is a single self-loop, n=2 a doubled edge.
    """
    if n < 1:
        raise GraphError("cycle needs at least one vertex", n=n)
    if isinstance(coin, CoinSpec):
        builder, label = GraphBuilder({coin.label: coin}), coin.label
    else:
        builder, label = GraphBuilder(), coin
    for i in range(n):
        builder.add_vertex(i, label, 2, column=i)
    for i in range(n):
        builder.connect((str(i), 1), (str((i + 1) % n), 0))
    return builder.build()


def line_graph(half_width: int, coin: str = "HAD_FF") -> WalkGraph:
    """
    Path over positions -half_width..half_width; vertex id is the position.

    Slot 0 points left, slot 1 points right; the two outermost slots are stubs.
    """
    if half_width < 0:
        raise GraphError("half width must be non-negative", half_width=half_width)
    builder = GraphBuilder()
    positions = range(-half_width, half_width + 1)
    for x in positions:
        builder.add_vertex(x, coin, 2, column=x)
    for x in positions[:-1]:
        builder.connect((str(x), 1), (str(x + 1), 0))
    builder.stub((str(-half_width), 0))
    builder.stub((str(half_width), 1))
    return builder.build()


def graph_to_description(graph: WalkGraph, with_coins: bool = True) -> Dict[str, Any]:
    """Inverse of build_graph; coins that the registry would not reproduce are embedded."""
    description: Dict[str, Any] = {
        "vertices": [
            {k: val for k, val in (("id", v.id), ("coin", v.coin), ("slots", v.slots),
                                   ("column", v.column), ("wire", v.wire)) if val is not None}
            for v in graph.vertices
        ],
        "edges": [[list(a), list(b)] for a, b in graph.edges],
        "stubs": [list(s) for s in graph.stubs],
    }
    if with_coins:
        custom = {}
        for label, coin in graph.coins.items():
            try:
                if resolve_coin(label).same_as(coin):
                    continue
            except UnknownCoinError:
                pass
            custom[label] = coin
        if custom:
            description["coins"] = custom
    return description
