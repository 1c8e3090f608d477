"""Front-end tests: tokenizer, parser, emitter, and round-trip properties."""
import math

import numpy as np
import pytest

from qasmtrans import gates, ir, oracle, qasm
from qasmtrans.errors import (
    ArityMismatch,
    IllegalCharacter,
    QasmSyntaxError,
    UndeclaredRegister,
    UnknownGate,
    UnserializableGate,
    UnsupportedStatement,
)

from conftest import FIXTURE_NAMES


# ---------------------------------------------------------------------------
# tokenizer
# ---------------------------------------------------------------------------

def test_tokenize_empty():
    assert qasm.tokenize("") == []


def test_tokenize_gate_call():
    toks = qasm.tokenize("cx q[0],q[1];")
    assert [t.text for t in toks] == ["cx", "q", "[", "0", "]", ",", "q", "[", "1", "]", ";"]
    assert [t.kind for t in toks] == ["identifier", "identifier", "symbol", "number",
                                      "symbol", "symbol", "identifier", "symbol",
                                      "number", "symbol", "symbol"]
    assert len(toks) == 11


def test_tokenize_drops_comments():
    toks = qasm.tokenize('OPENQASM 2.0;\n// note\nqreg q[2];')
    assert all(t.line != 2 for t in toks)
    assert "note" not in [t.text for t in toks]


def test_tokenize_positions_monotonic():
    src = 'OPENQASM 2.0;\nqreg q[3];\nh q[0];  // x\ncx q[0],q[1];\n'
    toks = qasm.tokenize(src)
    pos = [(t.line, t.column) for t in toks]
    assert pos == sorted(pos)
    assert all(t.line >= 1 and t.column >= 1 for t in toks)


def test_tokenize_reconstructs_source_modulo_whitespace():
    src = 'qreg q[2]; h q[0] ; // c\ncx q[0],q[1];'
    stripped = "".join(src.split())
    stripped = stripped.replace("//c", "")
    joined = "".join(t.text for t in qasm.tokenize(src))
    assert joined == stripped


def test_tokenize_illegal_character():
    with pytest.raises(IllegalCharacter) as err:
        qasm.tokenize("qreg q[2];\nh q[0]; @")
    assert err.value.line == 2


def test_tokenize_numbers_and_keywords():
    toks = qasm.tokenize("rz(1.5e-3) q[0];")
    kinds = {t.text: t.kind for t in toks}
    assert kinds["1.5e-3"] == "number"
    assert kinds["rz"] == "identifier"
    assert qasm.tokenize("measure")[0].kind == "keyword"


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def test_parse_single_h():
    c = qasm.parse_text("qreg q[1]; h q[0];")
    assert c.num_qubits == 1
    assert [g.name for g in c.gates] == ["h"]
    assert c.gates[0].qubits == (0,)


def test_parse_flattens_registers():
    c = qasm.parse_text("qreg a[2]; qreg b[3]; cx a[1],b[2];")
    assert c.num_qubits == 5
    assert c.gates[0].qubits == (1, 4)


def test_parse_adder_table_values(circuits):
    s = ir.stats(circuits["adder_n4"])
    assert (s.one_qubit_gates, s.total_gates, s.depth) == (17, 27, 12)


def test_parse_accepts_tokens_per_signature():
    toks = qasm.tokenize("qreg q[2]; cz q[0],q[1];")
    c = qasm.parse(toks)
    assert [g.name for g in c.gates] == ["h", "cx", "h"]


def test_parse_whole_register_broadcast_ascending():
    c = qasm.parse_text("qreg q[3]; h q;")
    assert [g.qubits for g in c.gates] == [(0,), (1,), (2,)]


def test_parse_two_register_broadcast():
    c = qasm.parse_text("qreg a[2]; qreg b[2]; cx a,b;")
    assert [g.qubits for g in c.gates] == [(0, 2), (1, 3)]


def test_parse_measure_broadcast_and_single():
    c = qasm.parse_text("qreg q[2]; creg c[2]; h q[0]; measure q -> c;")
    assert c.measurements == [(0, 0), (1, 1)]
    c = qasm.parse_text("qreg q[2]; creg c[2]; measure q[1] -> c[0];")
    assert c.measurements == [(1, 0)]


def test_parse_barrier_is_marker():
    c = qasm.parse_text("qreg q[3]; h q[0]; barrier q; h q[1];")
    assert c.gates[1].is_barrier
    assert c.gates[1].qubits == (0, 1, 2)
    assert c.gates[1].matrix is None


def test_parse_parameter_expressions():
    c = qasm.parse_text("qreg q[1]; rz(pi/2) q[0]; rz(-pi/4 + 1.5*2) q[0]; rz((pi+1)/2) q[0];")
    assert c.gates[0].params[0] == pytest.approx(math.pi / 2)
    assert c.gates[1].params[0] == pytest.approx(-math.pi / 4 + 3.0)
    assert c.gates[2].params[0] == pytest.approx((math.pi + 1) / 2)


def test_parse_composition_gates_expand_to_standard():
    c = qasm.parse_text("qreg q[3]; ccx q[0],q[1],q[2]; swap q[0],q[1];")
    assert all(g.name in gates.STANDARD_GATES for g in c.gates)
    counts = c.gate_counts()
    assert counts["cx"] == 6 + 3


@pytest.mark.parametrize("src,exc", [
    ("qreg q[2]; c4x q[0],q[1];", UnknownGate),
    ("qreg q[2]; foo q[0];", UnknownGate),
    ("qreg q[2]; if (c == 0) h q[0];", UnsupportedStatement),
    ("qreg q[2]; opaque magic a;", UnsupportedStatement),
    ("qreg q[2]; gate mine a { h a; }", UnsupportedStatement),
    ("qreg q[2]; reset q[0];", UnsupportedStatement),
    ("OPENQASM 3.0; qubit q;", UnsupportedStatement),
    ('include "other.inc";', UnsupportedStatement),
    ("qreg q[2]; h q[0],q[1];", ArityMismatch),
    ("qreg q[2]; rz q[0];", ArityMismatch),
    ("qreg q[2]; cx r[0],q[1];", UndeclaredRegister),
    ("qreg q[2]; cx q[0];", ArityMismatch),
    ("qreg q[2]; cx q[0],q[0];", QasmSyntaxError),
    ("qreg q[2]; h q[5];", Exception),
    ("qreg q[2]; h q[0]", QasmSyntaxError),
])
def test_parse_errors(src, exc):
    with pytest.raises(exc):
        qasm.parse_text(src)


def test_parse_rejects_gate_after_measure_on_same_qubit():
    with pytest.raises(QasmSyntaxError):
        qasm.parse_text("qreg q[1]; creg c[1]; measure q[0] -> c[0]; h q[0];")


def test_parsed_matrices_unitary(circuits):
    for name, circ in circuits.items():
        for g in circ.gates:
            if g.is_barrier:
                continue
            u = g.matrix
            err = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
            assert err < 1e-10, (name, g)


def test_flattening_prefix_sum_property():
    rng = np.random.default_rng(7)
    for _ in range(25):
        k = int(rng.integers(1, 5))
        sizes = [int(rng.integers(1, 6)) for _ in range(k)]
        names = [f"r{i}" for i in range(k)]
        decls = " ".join(f"qreg {n}[{s}];" for n, s in zip(names, sizes))
        j = int(rng.integers(k))
        i = int(rng.integers(sizes[j]))
        c = qasm.parse_text(f"{decls} x {names[j]}[{i}];")
        expect = i + sum(sizes[:j])
        assert c.gates[0].qubits == (expect,)


# ---------------------------------------------------------------------------
# emitter
# ---------------------------------------------------------------------------

def test_emit_single_h():
    c = qasm.parse_text("qreg q[1]; h q[0];")
    out = qasm.emit_qasm(c)
    assert out.count("h q[0];") == 1
    assert out.startswith('OPENQASM 2.0;\ninclude "qelib1.inc";\n')
    assert "\r" not in out


def test_emit_param_precision():
    c = qasm.parse_text("qreg q[1]; rz(0.5) q[0];")
    out = qasm.emit_qasm(c)
    assert "rz(0.5) q[0];" in out
    c2 = qasm.parse_text(f"qreg q[1]; rz({math.pi/7!r}) q[0];")
    reparsed = qasm.parse_text(qasm.emit_qasm(c2))
    assert reparsed.gates[0].params[0] == c2.gates[0].params[0]  # bit-exact


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_roundtrip_fixtures(circuits, name):
    c = circuits[name]
    again = qasm.parse_text(qasm.emit_qasm(c))
    assert again.structurally_equal(c)
    third = qasm.parse_text(qasm.emit_qasm(again))
    assert third.structurally_equal(again)


def test_emit_extension_gates_reparse():
    from qasmtrans.circuit import Circuit
    c = Circuit(2).add("sx", [0]).add("gpi2", [1], (0.25,)).add("iswap", [0, 1])
    again = qasm.parse_text(qasm.emit_qasm(c))
    assert again.structurally_equal(c)


def test_emit_unserializable():
    from qasmtrans.circuit import Circuit, GateIR
    c = Circuit(1)
    g = GateIR.__new__(GateIR)
    g.name, g.qubits, g.params, g._re, g._im = "mystery", (0,), (), None, None
    c.gates.append(g)
    with pytest.raises(UnserializableGate):
        qasm.emit_qasm(c)


def test_composition_expansion_unitary_equivalence():
    # parse-time expansion matches the defining matrix for 2- and 3-qubit gates
    rng = np.random.default_rng(3)
    for name in sorted(gates.COMPOSITION_GATES):
        nq, npar = gates.GATE_INFO[name]
        if nq > 3:
            continue
        params = tuple(float(x) for x in rng.uniform(-np.pi, np.pi, npar))
        args = ",".join(f"q[{i}]" for i in range(nq))
        pstr = "(" + ",".join(repr(p) for p in params) + ")" if params else ""
        c = qasm.parse_text(f"qreg q[{nq}]; {name}{pstr} {args};")
        u = oracle.circuit_unitary(c)
        dev = oracle.phase_aligned_distance(u, gates.defining_matrix(name, params))
        assert dev < 1e-9, (name, dev)
