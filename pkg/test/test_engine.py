"""
行走引擎測試
"""

import numpy as np
import pytest

from conftest import R2, single_vertex, two_vertices
from qwalk.core.coins import grover_coin
from qwalk.core.engine import (
    WalkState,
    apply_coin,
    apply_shift,
    line_amplitudes,
    line_walk,
    position_distribution,
    position_std,
    propagate,
    simulate,
    step,
    step_matrix,
)
from qwalk.core.graph import cycle_graph
from qwalk.errors import DimensionMismatchError, NormalizationError
from qwalk.utils.random_graphs import random_graph, random_state

R8 = 1 / np.sqrt(8)


class TestStep:

    def test_coin_then_shift(self):
        g = two_vertices()
        out = step(WalkState.basis(g, "u", 0))
        assert out.amplitude("u", 0) == pytest.approx(R2)
        assert out.amplitude("v", 0) == pytest.approx(R2)
        assert out.amplitude("u", 1) == 0 and out.amplitude("v", 1) == 0

    def test_step_is_shift_of_coin(self):
        g = two_vertices()
        state = WalkState(g, [0.5, 0.5j, -0.5, 0.5])
        np.testing.assert_array_equal(step(state).amplitudes, apply_shift(apply_coin(state)).amplitudes)

    def test_isolated_vertex_only_tosses(self):
        g = single_vertex("G4", 4)
        state = WalkState.basis(g, "v", 2)
        out = step(state)
        np.testing.assert_allclose(out.amplitudes, grover_coin(4).matrix[:, 2])
        # Grover coin is an involution and every slot is a stub
        np.testing.assert_allclose(step(out).amplitudes, state.amplitudes, atol=1e-15)

    def test_matches_dense_operator_on_random_graphs(self, rng):
        for _ in range(20):
            graph = random_graph(rng)
            state = random_state(graph, rng)
            dense = step_matrix(graph) @ state.amplitudes
            assert np.max(np.abs(step(state).amplitudes - dense)) <= 1e-13

    def test_dense_operator_is_unitary(self, rng):
        graph = random_graph(rng)
        u = step_matrix(graph)
        np.testing.assert_allclose(u.conj().T @ u, np.eye(graph.n_slots), atol=1e-12)

    def test_norm_is_preserved(self, rng):
        graph = random_graph(rng)
        state = random_state(graph, rng)
        for _ in range(25):
            state = step(state)
        assert state.norm() == pytest.approx(1.0, abs=1e-12)

    def test_batched_columns_evolve_independently(self, rng):
        graph = random_graph(rng)
        columns = [random_state(graph, rng).amplitudes for _ in range(3)]
        batch = propagate(graph, np.stack(columns, axis=1), 6)
        for k, column in enumerate(columns):
            np.testing.assert_allclose(batch[:, k], propagate(graph, column, 6), atol=1e-14)

    def test_step_is_linear(self, rng):
        graph = random_graph(rng)
        psi, phi = random_state(graph, rng), random_state(graph, rng)
        a, b = 0.6 - 0.3j, -1.2 + 0.5j
        mixed = step(WalkState(graph, a * psi.amplitudes + b * phi.amplitudes))
        expected = a * step(psi).amplitudes + b * step(phi).amplitudes
        assert np.max(np.abs(mixed.amplitudes - expected)) <= 1e-12

    def test_propagate_rejects_wrong_length(self):
        with pytest.raises(DimensionMismatchError):
            propagate(cycle_graph(3), np.zeros(5), 1)


class TestWalkState:

    def test_wrong_length(self):
        with pytest.raises(DimensionMismatchError):
            WalkState(cycle_graph(3), np.zeros(4))

    def test_from_entries_adds_repeats(self):
        g = cycle_graph(2)
        state = WalkState.from_entries(g, [("0", 1, 0.5), ("0", 1, 0.25j), ("1", 0, 1)])
        assert state.amplitude("0", 1) == 0.5 + 0.25j
        assert state.entries() == [("0", 1, 0.5 + 0.25j), ("1", 0, 1 + 0j)]

    def test_probabilities(self):
        g = cycle_graph(3)
        state = WalkState.from_entries(g, [("0", 0, 0.6), ("2", 1, 0.8j)])
        assert state.norm_squared() == pytest.approx(1.0)
        assert state.probability_by_vertex() == pytest.approx({"0": 0.36, "1": 0.0, "2": 0.64})
        assert state.probability_by_column() == pytest.approx({0: 0.36, 1: 0.0, 2: 0.64})

    def test_overlap(self):
        g = cycle_graph(2)
        a = WalkState.basis(g, "0", 0)
        b = WalkState.from_entries(g, [("0", 0, 1j)])
        assert a.overlap(b) == 1j
        assert b.overlap(a) == -1j

    def test_overlap_needs_the_same_graph(self):
        a = WalkState.basis(cycle_graph(2), "0", 0)
        b = WalkState.basis(cycle_graph(2), "0", 0)
        with pytest.raises(DimensionMismatchError):
            a.overlap(b)


class TestSimulate:

    def test_keeps_every_state(self):
        g = cycle_graph(4)
        trace = simulate(g, WalkState.basis(g, "0", 0), 5)
        assert len(trace.snapshots) == 6
        assert trace.initial.amplitude("0", 0) == 1
        assert trace.vertex_probabilities().shape == (6, 4)
        assert trace.rows()[:2] == [(0, "0", 1.0), (0, "1", 0.0)]

    def test_zero_steps(self):
        g = cycle_graph(4)
        trace = simulate(g, WalkState.basis(g, "1", 1), 0)
        assert trace.final is trace.initial

    def test_rejects_unnormalized_start(self):
        g = cycle_graph(4)
        state = WalkState.from_entries(g, [("0", 0, 0.9)])
        with pytest.raises(NormalizationError):
            simulate(g, state, 3)

    def test_small_deviation_is_tolerated(self):
        g = cycle_graph(4)
        state = WalkState.from_entries(g, [("0", 0, 1 + 1e-9)])
        assert len(simulate(g, state, 3).snapshots) == 4

    def test_rejects_state_of_another_graph(self):
        g = cycle_graph(4)
        with pytest.raises(DimensionMismatchError):
            simulate(g, WalkState.basis(cycle_graph(4), "0", 0), 2)

    def test_rejects_negative_steps(self):
        g = cycle_graph(4)
        with pytest.raises(ValueError):
            simulate(g, WalkState.basis(g, "0", 0), -1)


class TestLineWalk:

    def test_three_steps(self):
        final = line_walk(3).final
        got = line_amplitudes(final, cutoff=1e-14)
        expected = {(-3, 0): R8, (-1, 0): 2 * R8, (-1, 1): R8, (1, 0): -R8, (3, 1): R8}
        assert set(got) == set(expected)
        for key, value in expected.items():
            assert abs(got[key] - value) <= 1e-12, key
        assert position_distribution(final, cutoff=1e-14) == pytest.approx(
            {-3: 1 / 8, -1: 5 / 8, 1: 1 / 8, 3: 1 / 8})

    def test_one_step(self):
        got = line_amplitudes(line_walk(1).final, cutoff=1e-14)
        assert got == pytest.approx({(-1, 0): R2, (1, 1): R2})

    def test_parity(self):
        probs = position_distribution(line_walk(6).final, cutoff=1e-14)
        assert all(x % 2 == 0 for x in probs)

    def test_symmetric_start_gives_symmetric_distribution(self):
        probs = line_walk(20, initial_coin=(R2, 1j * R2)).final.probability_by_vertex()
        for x in range(1, 21):
            assert probs[str(x)] == pytest.approx(probs[str(-x)], abs=1e-12)

    def test_spreading_is_ballistic(self):
        trace = line_walk(50)
        ratios = [position_std(trace.snapshots[t]) / np.sqrt(t) for t in range(10, 51)]
        assert all(b > a for a, b in zip(ratios, ratios[1:]))

    def test_negative_steps(self):
        with pytest.raises(ValueError):
            line_walk(-1)
