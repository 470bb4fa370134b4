"""
Reading and writing graph, state, port and report files.

JSON floats are written with repr (shortest round-trip form), keys in
insertion order, so equal inputs give byte-identical files.
"""

import csv
import io
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, TextIO, Union

import numpy as np
from pydantic import ValidationError

from ..core.coins import CoinSpec, unitary_coin
from ..core.engine import WalkState
from ..core.graph import WalkGraph, build_graph, graph_to_description
from ..errors import GraphError, ParseError
from ..schemas import CoinDump, GraphFile, PlacementRecord, PortsFile, StateFile

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def complex_pair(z: complex) -> List[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def matrix_pairs(matrix) -> List[List[List[float]]]:
    return [[complex_pair(z) for z in row] for row in np.asarray(matrix)]


def _default(obj: Any):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return complex_pair(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, CoinSpec):
        return {"matrix": matrix_pairs(obj.matrix), "phase": obj.phase}
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def dumps(obj: Any) -> str:
    return json.dumps(obj, default=_default, ensure_ascii=False, indent=2) + "\n"


def write_text(text: str, path: Optional[PathLike] = None, stream: Optional[TextIO] = None) -> None:
    """Write to `path`, else to `stream`, else to stdout."""
    if path is None:
        (stream or sys.stdout).write(text)
        return
    Path(path).write_text(text, encoding="utf-8")
    logger.debug(f"已寫入 {path}")


def csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(x) if isinstance(x, float) else x for x in row])
    return buffer.getvalue()


def read_json(path: PathLike) -> Any:
    text = Path(path).read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError("invalid JSON", path=str(path), line=e.lineno) from None


# === 圖檔 ===

def coin_dump(coin: CoinSpec) -> Dict:
    return CoinDump(label=coin.label, degree=coin.degree, phase=coin.phase,
                    matrix=matrix_pairs(coin.operator)).model_dump()


def graph_from_data(data: Any) -> WalkGraph:
    try:
        model = GraphFile.model_validate(data)
    except ValidationError as e:
        raise GraphError("graph file does not match the format", detail=str(e.errors()[0])) from None
    coins = {
        label: unitary_coin(
            np.array([[complex(re, im) for re, im in row] for row in record.matrix]),
            label, phase=record.phase,
        )
        for label, record in model.coins.items()
    }
    return build_graph(model.model_dump(exclude={"coins"}), coins=coins)


def load_graph(path: PathLike) -> WalkGraph:
    graph = graph_from_data(read_json(path))
    logger.info(f"載入圖檔 {path}: {graph.summary()}")
    return graph


def graph_data(graph: WalkGraph) -> Dict:
    return graph_to_description(graph)


# === 狀態檔 ===

def state_from_data(graph: WalkGraph, data: Any) -> WalkState:
    try:
        rows = StateFile.model_validate(data).root
    except ValidationError as e:
        raise ParseError("state file does not match the format", detail=str(e.errors()[0])) from None
    return WalkState.from_entries(graph, [(str(v), s, complex(re, im)) for v, s, re, im in rows])


def load_state(graph: WalkGraph, path: PathLike) -> WalkState:
    return state_from_data(graph, read_json(path))


def state_data(state: WalkState, cutoff: float = 0.0) -> List[List]:
    return [[vid, slot, amp.real, amp.imag] for vid, slot, amp in state.entries(cutoff)]


def sidecar(path: PathLike, suffix: str) -> Path:
    """graph.json -> graph.<suffix>.json"""
    p = Path(path)
    return p.with_name(f"{p.stem}.{suffix}.json")


# === 埠描述與放置報告 ===

def ports_data(gadget) -> Dict:
    """Ports sidecar payload, checked against PortsFile."""
    return PortsFile.model_validate(gadget.ports_dict()).model_dump(mode="json")


def placement_data(placements: Iterable[Any]) -> List[Dict]:
    return [PlacementRecord.model_validate(p.to_dict()).model_dump(mode="json") for p in placements]


def load_ports(path: PathLike) -> PortsFile:
    try:
        return PortsFile.model_validate(read_json(path))
    except ValidationError as e:
        raise ParseError("ports file does not match the format", detail=str(e.errors()[0])) from None
