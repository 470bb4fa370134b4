"""
命令列介面測試
"""

import csv
import io
import json

import numpy as np
import pytest

from conftest import R2
from main import main
from qwalk.services import analysis
from qwalk.utils.serialization import load_ports


def run_json(capsys, argv):
    assert main(argv) == 0
    return json.loads(capsys.readouterr().out)


def run_csv(capsys, argv):
    assert main(["--format", "csv"] + argv) == 0
    return list(csv.DictReader(io.StringIO(capsys.readouterr().out)))


class TestCoin:

    def test_grover_four(self, capsys):
        dump = run_json(capsys, ["coin", "G4"])
        assert dump["label"] == "G4" and dump["degree"] == 4
        assert dump["matrix"][0][0] == [-0.5, 0.0]
        assert dump["matrix"][2][1] == [0.5, 0.0]

    def test_biased(self, capsys):
        dump = run_json(capsys, ["coin", "BIAS", "--delta", "1"])
        assert dump["matrix"] == [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [-1.0, 0.0]]]

    def test_tensor_built_g8(self, capsys):
        dump = run_json(capsys, ["coin", "G8_TENSOR"])
        assert dump["label"] == "G8" and dump["matrix"][0][4] == [0.5, 0.0]

    def test_csv_rows(self, capsys):
        rows = run_csv(capsys, ["coin", "HAD"])
        assert len(rows) == 4
        assert float(rows[3]["re"]) == pytest.approx(-R2)

    def test_usage_and_domain_errors(self):
        assert main(["coin", "BIAS"]) == 2
        assert main(["coin", "BIAS", "--delta", "2"]) == 4
        assert main(["coin", "NOPE"]) == 4


class TestSimulate:

    def test_line_walk_csv(self, capsys):
        rows = run_csv(capsys, ["simulate", "--line", "3"])
        final = {int(r["vertex"]): float(r["probability"]) for r in rows
                 if r["step"] == "3" and float(r["probability"]) > 1e-12}
        assert final == pytest.approx({-3: 1 / 8, -1: 5 / 8, 1: 1 / 8, 3: 1 / 8})

    def test_max_steps(self):
        assert main(["--max-steps", "5", "simulate", "--line", "10"]) == 2

    def test_gadget_file_round_trip(self, tmp_path, capsys):
        graph_path = tmp_path / "wire.json"
        assert main(["--out", str(graph_path), "gadget", "wire", "--length", "4"]) == 0
        ports = load_ports(tmp_path / "wire.ports.json")
        (vid, _), _ = ports.inputs[0].rails
        state_path = tmp_path / "state.json"
        state_path.write_text(json.dumps([[vid, 0, R2, 0.0], [vid, 1, R2, 0.0]]), encoding="utf-8")

        payload = run_json(capsys, ["simulate", str(graph_path), "--state", str(state_path),
                                    "--steps", str(ports.depth), "--amplitudes"])
        out_vertex = ports.outputs[0].rails[0][0]
        final = {r["vertex"]: r["probability"] for r in payload["probabilities"]
                 if r["step"] == ports.depth}
        assert final[out_vertex] == pytest.approx(1.0, abs=1e-10)
        assert {row[0] for row in payload["amplitudes"]} == {out_vertex}
        arrival = payload["columns"][-1]
        assert arrival["column"] == ports.depth and arrival["vertices"] == 1
        assert arrival["probability"] == pytest.approx(1.0, abs=1e-10)

    def test_line_walk_column_summary(self, capsys):
        payload = run_json(capsys, ["simulate", "--line", "3"])
        by_column = {c["column"]: c["probability"] for c in payload["columns"]}
        assert sorted(by_column) == list(range(-4, 5))
        assert {c: p for c, p in by_column.items() if p > 1e-12} == pytest.approx(
            {-3: 1 / 8, -1: 5 / 8, 1: 1 / 8, 3: 1 / 8})

    def test_unnormalized_state(self, tmp_path):
        graph_path = tmp_path / "wire.json"
        assert main(["--out", str(graph_path), "gadget", "wire"]) == 0
        state_path = tmp_path / "state.json"
        state_path.write_text(json.dumps([["w0:t0", 0, 1.0, 0.0], ["w0:t0", 1, 1.0, 0.0]]),
                              encoding="utf-8")
        assert main(["simulate", str(graph_path), "--state", str(state_path), "--steps", "2"]) == 5

    def test_missing_graph_file(self, tmp_path):
        state_path = tmp_path / "state.json"
        state_path.write_text("[]", encoding="utf-8")
        missing = str(tmp_path / "nope.json")
        assert main(["simulate", missing, "--state", str(state_path), "--steps", "1"]) == 3


class TestCompileAndVerify:

    def test_compile_writes_sidecars(self, qcircuit_path, tmp_path):
        out = tmp_path / "graph.json"
        assert main(["--out", str(out), "compile", str(qcircuit_path)]) == 0
        placement = json.loads((tmp_path / "graph.placement.json").read_text(encoding="utf-8"))
        assert [p["instances"] for p in placement] == [4, 2, 2, 4]
        ports = load_ports(tmp_path / "graph.ports.json")
        assert ports.depth == 27 and len(ports.inputs) == 8

    def test_compile_is_deterministic(self, qcircuit_path, capsys):
        assert main(["compile", str(qcircuit_path)]) == 0
        first = capsys.readouterr().out
        assert main(["compile", str(qcircuit_path)]) == 0
        assert capsys.readouterr().out == first

    def test_verify_reference_circuit(self, qcircuit_path, capsys):
        report = run_json(capsys, ["verify", str(qcircuit_path)])
        assert report["passed"] is True
        assert report["fidelity"] >= 1 - 1e-9
        assert report["depth"] == 27

    def test_verify_random_circuits(self, capsys):
        argv = ["--seed", "7", "verify", "--random", "3", "--qubits", "2", "--gates", "4"]
        reports = run_json(capsys, argv)
        assert [r["circuit"] for r in reports] == ["random0", "random1", "random2"]
        assert all(r["passed"] for r in reports)
        assert run_json(capsys, argv) == reports

    def test_verify_failure_exit_code(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setattr(analysis, "circuit_oracle", lambda circuit: np.eye(2 ** circuit.n))
        path = tmp_path / "h.txt"
        path.write_text("qubits 1\nh 1\n", encoding="utf-8")
        assert main(["verify", str(path)]) == 5
        assert json.loads(capsys.readouterr().out)["passed"] is False

    def test_bad_circuit_exit_code(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("qubits 2\ncnot 1 1\n", encoding="utf-8")
        assert main(["compile", str(path)]) == 4
        assert main(["verify", str(path)]) == 4

    def test_verify_needs_input(self):
        assert main(["verify"]) == 2


class TestPst:

    def test_directed_four_cycle(self, capsys):
        rows = run_csv(capsys, ["pst", "--sizes", "4", "--delta-steps", "1", "--phase-steps", "1"])
        assert len(rows) == 1
        assert rows[0]["period"] == "4" and rows[0]["transfer_step"] == "2"
        assert rows[0]["consistent"] == "True"

    def test_bad_sizes(self):
        assert main(["pst", "--sizes", "four"]) == 2


def test_format_from_environment(monkeypatch, capsys):
    monkeypatch.setenv("QWALK_OUTPUT_FORMAT", "pretty")
    assert main(["coin", "SX"]) == 0
    assert capsys.readouterr().out.startswith("SX (degree 2")


def test_bad_tolerance_flag():
    assert main(["--tol", "-1", "coin", "G4"]) == 2


def test_unknown_subcommand():
    with pytest.raises(SystemExit):
        main(["teleport"])
