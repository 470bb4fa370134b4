"""
電路解析與編譯測試
"""

import numpy as np
import pytest

from conftest import QCIRCUIT, R2
from qwalk.core.engine import WalkState, propagate, simulate
from qwalk.services.compiler import (
    CircuitIR,
    Gate,
    gate_pairs,
    inject,
    lower,
    parse_circuit,
    readout,
)
from qwalk.errors import (
    CircuitError,
    ControlTargetError,
    DimensionMismatchError,
    NormalizationError,
    QubitIndexError,
    SynchronizationError,
    UnknownGateError,
)


class TestParse:

    def test_reference_circuit(self):
        circuit = parse_circuit(QCIRCUIT)
        assert circuit.n == 3
        assert [(g.kind, g.qubits) for g in circuit.gates] == [
            ("H", (3,)), ("CNOT", (1, 3)), ("CNOT", (2, 3)), ("P", (3,))]
        assert circuit.labels[:3] == ["000", "001", "010"]

    def test_comments_blank_lines_and_case(self):
        circuit = parse_circuit("# header\n\nQUBITS 2\nH 1   # first\n\ncnot 1 2\n")
        assert [str(g) for g in circuit.gates] == ["h 1", "cnot 1 2"]
        assert circuit.gates[1].line == 6

    def test_qubit_out_of_range_names_the_line(self):
        with pytest.raises(QubitIndexError) as excinfo:
            parse_circuit("qubits 2\nh 1\nh 3\n")
        assert excinfo.value.context["line"] == 3

    @pytest.mark.parametrize("text,error", [
        ("qubits 2\ncnot 1 1\n", ControlTargetError),
        ("qubits 2\nx 1\n", UnknownGateError),
        ("h 1\nqubits 1\n", CircuitError),
        ("", CircuitError),
        ("qubits 2\nh one\n", CircuitError),
        ("qubits 0\n", QubitIndexError),
        ("qubits 2\nqubits 2\n", CircuitError),
        ("qubits 2\nh 1 2\n", CircuitError),
        ("qubits 2\ncnot 1\n", CircuitError),
    ])
    def test_malformed(self, text, error):
        with pytest.raises(error):
            parse_circuit(text)

    def test_ir_validates_gates(self):
        with pytest.raises(QubitIndexError):
            CircuitIR(0)
        with pytest.raises(UnknownGateError):
            CircuitIR(1, [Gate("T", (1,))])
        with pytest.raises(ControlTargetError):
            CircuitIR(2, [Gate("CNOT", (2, 2))])


class TestGatePairs:

    def test_single_qubit_gate(self):
        labels = CircuitIR(2).labels
        assert gate_pairs(labels, Gate("H", (1,))) == [("00", "10"), ("01", "11")]
        assert gate_pairs(labels, Gate("P", (2,))) == [("00", "01"), ("10", "11")]

    def test_cnot(self):
        labels = CircuitIR(3).labels
        assert gate_pairs(labels, Gate("CNOT", (1, 3))) == [("100", "101"), ("110", "111")]
        assert gate_pairs(labels, Gate("CNOT", (3, 1))) == [("001", "101"), ("011", "111")]
        assert ("010", "011") in gate_pairs(labels, Gate("CNOT", (2, 3)))


class TestLower:

    def test_reference_circuit_layout(self):
        compiled = lower(parse_circuit(QCIRCUIT))
        assert compiled.dim == 8
        assert compiled.n == 3
        assert [p.instances for p in compiled.placements] == [4, 2, 2, 4]
        assert [p.columns for p in compiled.placements] == [(0, 20), (20, 21), (21, 22), (22, 27)]
        assert compiled.depth == 27
        assert compiled.max_degree == 8
        assert compiled.placements[1].to_dict()["pairs"] == [["100", "101"], ["110", "111"]]

    def test_every_wire_gets_a_vertex_per_column_boundary(self):
        compiled = lower(parse_circuit(QCIRCUIT))
        ends = {v.id for v in compiled.graph.vertices if v.column == compiled.depth}
        assert ends == {f"w{label}:t27" for label in compiled.labels}

    @pytest.mark.parametrize("n,instances", [
        (1, [1, 1]),
        (2, [2, 2, 1]),
        (3, [4, 4, 2]),
        (4, [8, 8, 4]),
    ])
    def test_replication_counts(self, n, instances):
        text = f"qubits {n}\nh 1\np {n}\n" + (f"cnot 1 {n}\n" if n > 1 else "")
        compiled = lower(parse_circuit(text))
        assert [p.instances for p in compiled.placements] == instances
        assert compiled.dim == 2 ** n

    def test_compiled_graph_uses_three_coins(self):
        compiled = lower(parse_circuit(QCIRCUIT))
        assert set(compiled.graph.coins) == {"G4_phased", "G2", "G8"}
        assert {v.coin for v in compiled.graph.vertices} == {"G4_phased", "G2", "G8"}
        assert set(lower(parse_circuit("qubits 2\ncnot 1 2\n")).graph.coins) == {"G4_phased"}

    def test_options(self):
        circuit = parse_circuit(QCIRCUIT)
        assert lower(circuit, trim_global_phase=False).depth == 22 + 1 + 1 + 5
        assert lower(circuit, cnot_length=3).depth == 20 + 3 + 3 + 5

    def test_too_many_qubits(self):
        with pytest.raises(QubitIndexError):
            lower(CircuitIR(3), max_qubits=2)

    def test_empty_circuit(self):
        compiled = lower(CircuitIR(2))
        assert compiled.depth == 0
        assert compiled.outputs[0].rails == compiled.inputs[0].rails


class TestInjectAndReadout:

    def test_reference_circuit_on_zero_input(self):
        compiled = lower(parse_circuit(QCIRCUIT))
        logical = np.zeros(8)
        logical[0] = 1.0
        trace = simulate(compiled.graph, inject(compiled, logical), compiled.depth)
        result = readout(trace.final, compiled)
        assert result.leakage <= 1e-10
        np.testing.assert_allclose(result.probabilities(), [0.5, 0.5, 0, 0, 0, 0, 0, 0], atol=1e-12)
        g = np.exp(3j * np.pi / 4)
        assert abs(result.corrected[0] - g * R2) <= 1e-12
        assert abs(result.corrected[1] + R2) <= 1e-12
        assert result.labels == compiled.labels

    def test_injection_splits_over_rails(self):
        compiled = lower(parse_circuit("qubits 1\np 1\n"))
        state = inject(compiled, [0.6, 0.8j])
        port = compiled.input_port("1")
        assert state.amplitude(*port.rails[0]) == pytest.approx(0.8j * R2)
        assert state.amplitude(*port.rails[1]) == pytest.approx(0.8j * R2)
        assert state.norm() == pytest.approx(1.0)

    def test_injection_checks_the_vector(self):
        compiled = lower(parse_circuit("qubits 1\np 1\n"))
        with pytest.raises(NormalizationError):
            inject(compiled, [1.0, 1.0])
        with pytest.raises(DimensionMismatchError):
            inject(compiled, [1.0, 0.0, 0.0])

    def test_early_readout_names_the_column(self):
        compiled = lower(parse_circuit("qubits 1\nh 1\n"))
        early = propagate(compiled.graph, inject(compiled, [1.0, 0.0]).amplitudes, compiled.depth - 1)
        with pytest.raises(SynchronizationError) as excinfo:
            readout(WalkState(compiled.graph, early), compiled)
        assert excinfo.value.column == compiled.depth - 1
