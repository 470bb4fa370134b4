"""
共用測試設定
"""

import os
import sys

import numpy as np
import pytest

# 添加專案路徑到 Python 路徑
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from config_loader import reset_settings  # noqa: E402
from qwalk.core.graph import build_graph  # noqa: E402

R2 = 1 / np.sqrt(2)
OMEGA = np.exp(-1j * np.pi / 4)
QCIRCUIT = "qubits 3\nh 3\ncnot 1 3\ncnot 2 3\np 3\n"


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def qcircuit_path(tmp_path):
    path = tmp_path / "qcircuit.txt"
    path.write_text(QCIRCUIT, encoding="utf-8")
    return path


@pytest.fixture(autouse=True)
def fresh_settings(monkeypatch):
    for key in list(os.environ):
        if key.upper().startswith("QWALK_"):
            monkeypatch.delenv(key)
    reset_settings()
    yield
    reset_settings()


def single_vertex(coin: str, slots: int):
    """One vertex whose slots are all stubs."""
    return build_graph({
        "vertices": [{"id": "v", "coin": coin, "slots": slots}],
        "edges": [],
        "stubs": [["v", s] for s in range(slots)],
    })


def two_vertices():
    """u(2 slots) -- v(2 slots) by one edge (u,1)-(v,0); the other slots are stubs."""
    return build_graph({
        "vertices": [{"id": "u", "coin": "HAD", "slots": 2}, {"id": "v", "coin": "HAD", "slots": 2}],
        "edges": [[["u", 1], ["v", 0]]],
        "stubs": [["u", 0], ["v", 1]],
    })
