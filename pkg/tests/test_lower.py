"""Basis lowering tests: ZXZ Euler form, vendor rules, and idempotence."""
import math

import numpy as np
import pytest

import qasmtrans.lowering as lower
from qasmtrans import gates, oracle
from qasmtrans.circuit import Circuit
from qasmtrans.errors import NoRuleFor
from qasmtrans.lowering import VENDOR_BASES, lower_1q_zxz
from qasmtrans.pulsesim import avg_gate_fidelity

from conftest import phase_distance, random_circuit, random_unitary

ALL_BASES = ["ibmq", "rigetti", "ionq", "quantinuum", "rigetti_pulse"]


def _reconstruct_zxz(a, b, g):
    return gates.matrix("rz", (a,)) @ gates.matrix("rx", (b,)) @ gates.matrix("rz", (g,))


# ---------------------------------------------------------------------------
# lower_1q_zxz
# ---------------------------------------------------------------------------

def test_zxz_identity():
    a, b, g = lower_1q_zxz(np.eye(2))
    assert b == 0.0
    assert (a + g) % (2 * math.pi) == pytest.approx(0.0, abs=1e-12)


def test_zxz_rx_axis_case():
    a, b, g = lower_1q_zxz(gates.matrix("rx", (0.7,)))
    assert (a % (2 * math.pi), b, g % (2 * math.pi)) == pytest.approx((0.0, 0.7, 0.0), abs=1e-12)


def test_zxz_hadamard():
    angles = lower_1q_zxz(gates.matrix("h"))
    assert phase_distance(_reconstruct_zxz(*angles), gates.matrix("h")) < 1e-9


def test_zxz_random_su2_reconstruction_fidelity():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        u = random_unitary(2, rng)
        a, b, g = lower_1q_zxz(u)
        assert 0.0 <= b <= math.pi + 1e-12
        f = avg_gate_fidelity(_reconstruct_zxz(a, b, g), u)
        assert f >= 1 - 1e-12


# ---------------------------------------------------------------------------
# vendor rules
# ---------------------------------------------------------------------------

def test_rz_unchanged_under_ibmq():
    c = Circuit(1).add("rz", [0], (0.5,))
    out = lower.lower(c, "ibmq")
    assert [(g.name, g.params) for g in out.gates] == [("rz", (0.5,))]


def test_h_under_ibmq_is_rz_sx_rz():
    out = lower.lower(Circuit(1).add("h", [0]), "ibmq")
    assert [g.name for g in out.gates] == ["rz", "sx", "rz"]
    assert all(p == pytest.approx(math.pi / 2) for g in out.gates if g.params for p in g.params)
    u = oracle.circuit_unitary(out)
    assert phase_distance(u, gates.matrix("h")) < 1e-12


def test_cx_under_rigetti_is_cz_conjugation():
    out = lower.lower(Circuit(2).add("cx", [0, 1]), "rigetti")
    assert sum(1 for g in out.gates if g.name == "cz") == 1
    assert phase_distance(oracle.circuit_unitary(out), gates.matrix("cx")) < 1e-12


@pytest.mark.parametrize("basis", ALL_BASES)
def test_cx_matrix_pinned_per_basis(basis):
    out = lower.lower(Circuit(2).add("cx", [0, 1]), basis)
    assert phase_distance(oracle.circuit_unitary(out), gates.matrix("cx")) < 1e-10
    native = VENDOR_BASES[basis].gate_names()
    assert all(g.name in native for g in out.gates)


@pytest.mark.parametrize("basis", ALL_BASES)
def test_basis_closure_and_equivalence_random(basis):
    rng = np.random.default_rng(hash(basis) % 2**31)
    native = VENDOR_BASES[basis].gate_names()
    for _ in range(6):
        c = random_circuit(3, 25, rng,
                           two_q_names=("cx", "cz", "swap", "crz", "cu1", "rzz"),
                           one_q_names=("h", "t", "sdg", "x", "y", "rz", "rx", "ry", "u3", "u2"))
        out = lower.lower(c, basis)
        assert all(g.name in native for g in out.gates)
        ok, dev = oracle.equivalent(c, out, tol=1e-8)
        assert ok, (basis, dev)


@pytest.mark.parametrize("basis", ALL_BASES)
def test_lower_idempotent(basis):
    rng = np.random.default_rng(17)
    for _ in range(4):
        c = random_circuit(3, 20, rng)
        once = lower.lower(c, basis)
        twice = lower.lower(once, basis)
        assert twice.structurally_equal(once)


def test_lower_preserves_interaction_pairs(toronto):
    from qasmtrans import route
    rng = np.random.default_rng(23)
    c = random_circuit(6, 40, rng)
    routed = route.sabre_route(c, toronto, seed=1).circuit
    for basis in ALL_BASES:
        out = lower.lower(routed, basis)
        pairs_in = {tuple(sorted(g.qubits)) for g in routed.gates if g.num_qubits == 2}
        pairs_out = {tuple(sorted(g.qubits)) for g in out.gates if g.num_qubits == 2}
        assert pairs_out <= pairs_in


def test_rigetti_rx_quantization():
    out = lower.lower(Circuit(1).add("rx", [0], (math.pi / 2,)), "rigetti")
    assert [(g.name, g.params) for g in out.gates] == [("rx", (math.pi / 2,))]
    out = lower.lower(Circuit(1).add("rx", [0], (-math.pi / 2,)), "rigetti")
    assert [(g.name, g.params) for g in out.gates] == [("rx", (-math.pi / 2,))]
    out = lower.lower(Circuit(1).add("rx", [0], (0.3,)), "rigetti")
    assert all(g.params[0] == pytest.approx(math.pi / 2) for g in out.gates if g.name == "rx")
    assert phase_distance(oracle.circuit_unitary(out), gates.matrix("rx", (0.3,))) < 1e-9


def test_adjacent_rz_merging():
    c = Circuit(1).add("rz", [0], (0.3,)).add("rz", [0], (0.4,))
    out = lower.lower(c, "ibmq")
    assert [(g.name, g.params[0]) for g in out.gates] == [("rz", pytest.approx(0.7))]
    cancel = Circuit(1).add("rz", [0], (0.3,)).add("rz", [0], (-0.3,))
    assert lower.lower(cancel, "ibmq").gates == []


def test_rz_not_merged_across_barrier():
    c = Circuit(1).add("rz", [0], (0.3,)).add("barrier", [0]).add("rz", [0], (0.4,))
    out = lower.lower(c, "ibmq")
    assert [g.name for g in out.gates] == ["rz", "barrier", "rz"]


def test_id_dropped():
    assert lower.lower(Circuit(1).add("id", [0]), "ibmq").gates == []


def test_measurements_survive_lowering():
    c = Circuit(2).add("h", [0]).add("cx", [0, 1])
    c.measure(0, 0)
    c.measure(1, 1)
    out = lower.lower(c, "quantinuum")
    assert out.measurements == [(0, 0), (1, 1)]


def test_no_rule_for_unknown_basis():
    with pytest.raises(NoRuleFor):
        lower.lower(Circuit(1).add("h", [0]), "mystery_vendor")


def test_no_rule_for_foreign_entangler():
    # iswap has no rule under ibmq (2q resynthesis is out of scope)
    with pytest.raises(NoRuleFor):
        lower.lower(Circuit(2).add("iswap", [0, 1]), "ibmq")
