"""Shared fixtures: benchmark circuits, devices, and random generators."""
from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from qasmtrans import devicelib, gates, qasm
from qasmtrans.circuit import Circuit

FIXTURES = Path(__file__).parent / "fixtures"

FIXTURE_NAMES = ["bell", "ghz_n5", "adder_n4", "qec_n5", "bv_n14", "qaoa_n6"]


@pytest.fixture(scope="session")
def fixture_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def circuits() -> dict[str, Circuit]:
    return {name: qasm.parse_file(FIXTURES / f"{name}.qasm") for name in FIXTURE_NAMES}


@pytest.fixture(scope="session")
def toronto():
    return devicelib.toronto27(jitter_seed=11)


@pytest.fixture(scope="session")
def line5():
    return devicelib.line(5)


def random_unitary(n: int, rng) -> np.ndarray:
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def random_circuit(n: int, depth: int, rng, two_q_names=("cx",),
                   one_q_names=("h", "t", "s", "x", "rz", "rx"),
                   p_two: float = 0.4, measure: bool = False) -> Circuit:
    c = Circuit(n)
    for _ in range(depth):
        if n >= 2 and rng.random() < p_two:
            a, b = map(int, rng.choice(n, 2, replace=False))
            name = two_q_names[rng.integers(len(two_q_names))]
            npar = gates.GATE_INFO[name][1]
            c.add(name, [a, b], tuple(rng.uniform(-np.pi, np.pi, npar)))
        else:
            name = one_q_names[rng.integers(len(one_q_names))]
            npar = gates.GATE_INFO[name][1]
            c.add(name, [int(rng.integers(n))], tuple(rng.uniform(-np.pi, np.pi, npar)))
    if measure:
        for q in range(n):
            c.measure(q, q)
    return c


def phase_distance(a: np.ndarray, b: np.ndarray) -> float:
    idx = np.argmax(np.abs(b))
    ref = b.reshape(-1)[idx]
    phase = a.reshape(-1)[idx] / ref
    phase /= abs(phase)
    return float(np.max(np.abs(a - phase * b)))
