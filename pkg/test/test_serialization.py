"""
檔案格式與序列化測試
"""

import json

import numpy as np
import pytest

from conftest import R2
from qwalk.core.coins import unitary_coin
from qwalk.core.engine import WalkState
from qwalk.core.gadgets import make_phase_gate
from qwalk.core.graph import cycle_graph
from qwalk.errors import CoinConstructionError, GraphError, ParseError, UnknownVertexError
from qwalk.services.compiler import lower, parse_circuit
from qwalk.utils.serialization import (
    coin_dump,
    csv_text,
    dumps,
    graph_data,
    graph_from_data,
    load_graph,
    load_ports,
    load_state,
    placement_data,
    ports_data,
    read_json,
    sidecar,
    state_data,
    state_from_data,
)


def test_dumps_handles_numpy_and_complex():
    text = dumps({"a": np.int64(3), "b": np.float64(0.1), "z": 1 - 2j, "m": np.eye(2)})
    assert json.loads(text) == {"a": 3, "b": 0.1, "z": [1.0, -2.0], "m": [[1.0, 0.0], [0.0, 1.0]]}
    assert text.endswith("\n")


def test_dumps_keeps_full_precision():
    value = 1 / 3
    assert json.loads(dumps([value]))[0] == value


def test_csv_uses_round_trip_floats():
    text = csv_text(("step", "vertex", "probability"), [(0, "a", 0.1 + 0.2), (1, "b", 1.0)])
    assert text == "step,vertex,probability\n0,a,0.30000000000000004\n1,b,1.0\n"


def test_coin_dump():
    dump = coin_dump(unitary_coin([[0, 1j], [1j, 0]], "iSWAP"))
    assert dump == {"label": "iSWAP", "degree": 2, "phase": 0.0,
                    "matrix": [[[0.0, 0.0], [0.0, 1.0]], [[0.0, 1.0], [0.0, 0.0]]]}


def test_graph_file_round_trip_with_embedded_coin(tmp_path):
    coin = unitary_coin(np.array([[R2, 1j * R2], [1j * R2, R2]]), "MINE")
    g = cycle_graph(3, coin)
    path = tmp_path / "graph.json"
    path.write_text(dumps(graph_data(g)), encoding="utf-8")
    loaded = load_graph(path)
    assert loaded.edges == g.edges
    assert np.array_equal(loaded.coins["MINE"].matrix, coin.matrix)


def test_graph_file_rejects_non_unitary_coin():
    data = {"vertices": [{"id": "a", "coin": "BAD", "slots": 1}], "stubs": [["a", 0]],
            "coins": {"BAD": {"matrix": [[[2.0, 0.0]]]}}}
    with pytest.raises(CoinConstructionError):
        graph_from_data(data)


def test_graph_file_shape_errors():
    with pytest.raises(GraphError):
        graph_from_data({"vertices": [{"id": "a", "coin": "G1", "slots": 0}]})
    with pytest.raises(GraphError):
        graph_from_data({"edges": []})


def test_state_file(tmp_path):
    g = cycle_graph(2)
    path = tmp_path / "state.json"
    path.write_text(json.dumps([["0", 0, R2, 0.0], [1, 1, 0.0, R2]]), encoding="utf-8")
    state = load_state(g, path)
    assert state.amplitude("1", 1) == pytest.approx(1j * R2)
    assert state_data(state) == [["0", 0, R2, 0.0], ["1", 1, 0.0, R2]]


def test_state_file_errors():
    g = cycle_graph(2)
    with pytest.raises(ParseError):
        state_from_data(g, [["0", 0, 1.0]])
    with pytest.raises(UnknownVertexError):
        state_from_data(g, [["7", 0, 1.0, 0.0]])


def test_read_json_reports_line(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{\n  "vertices": [\n}', encoding="utf-8")
    with pytest.raises(ParseError) as excinfo:
        read_json(path)
    assert excinfo.value.context["line"] == 3


def test_ports_and_placement_payloads(tmp_path):
    ports = ports_data(make_phase_gate())
    assert ports["depth"] == 5
    assert ports["inputs"][0] == {"label": "0", "rails": [["w0:t0", 0], ["w0:t0", 1]]}
    path = tmp_path / "phase.ports.json"
    path.write_text(dumps(ports), encoding="utf-8")
    assert load_ports(path).outputs[1].label == "1"

    placement = placement_data(lower(parse_circuit("qubits 2\ncnot 2 1\n")).placements)
    assert placement == [{"index": 0, "kind": "CNOT", "qubits": [2, 1], "instances": 1,
                          "pairs": [["01", "11"]], "columns": [0, 1]}]


def test_sidecar_name():
    assert sidecar("out/graph.json", "ports").as_posix() == "out/graph.ports.json"


def test_state_data_cutoff():
    g = cycle_graph(2)
    state = WalkState(g, [1.0, 1e-20, 0.0, 0.0])
    assert state_data(state, cutoff=1e-15) == [["0", 0, 1.0, 0.0]]
