"""Ideal statevector simulator and circuit-equivalence checker.

This is the verification backbone for every transpilation pass: gate
matrices are applied exactly, so any pass can be checked for unitary
equivalence up to a layout permutation and a global phase.

Qubit 0 is the most significant bit of the state index, matching the
matrix convention in gates.py.
"""
from __future__ import annotations

import numpy as np

from .circuit import Circuit
from .errors import DimensionMismatch, TooManyQubits

MAX_SIM_QUBITS = 14
MAX_UNITARY_QUBITS = 7


def zero_state(n: int) -> np.ndarray:
    psi = np.zeros(1 << n, dtype=complex)
    psi[0] = 1.0
    return psi


def apply_gate(state: np.ndarray, mat: np.ndarray, qubits: tuple, n: int) -> np.ndarray:
    """Apply a k-qubit gate matrix to the given qubit axes of the state."""
    k = len(qubits)
    t = state.reshape([2] * n)
    g = mat.reshape([2] * (2 * k))
    t = np.tensordot(g, t, axes=(list(range(k, 2 * k)), list(qubits)))
    perm = [0] * n
    rest = [ax for ax in range(n) if ax not in qubits]
    for i, q in enumerate(qubits):
        perm[q] = i
    for i, q in enumerate(rest):
        perm[q] = k + i
    return t.transpose(perm).reshape(-1)


def simulate(circuit: Circuit, initial: np.ndarray | None = None) -> np.ndarray:
    """Evolve a statevector through the circuit's gate list.

    Measurements are terminal in this representation, so they never
    interleave with gates; the returned state is pre-measurement."""
    n = circuit.num_qubits
    if n > MAX_SIM_QUBITS:
        raise TooManyQubits(f"{n} qubits exceeds simulate cap {MAX_SIM_QUBITS}")
    if initial is None:
        state = zero_state(n)
    else:
        state = np.asarray(initial, dtype=complex).reshape(-1)
        if state.size != 1 << n:
            raise DimensionMismatch(f"initial state has {state.size} amplitudes, expected {1 << n}")
        state = state.copy()
    for g in circuit.gates:
        if g.is_barrier:
            continue
        state = apply_gate(state, g.matrix, g.qubits, n)
    return state


def circuit_unitary(circuit: Circuit, max_qubits: int = MAX_UNITARY_QUBITS) -> np.ndarray:
    """Full unitary of the gate list, built by batched column simulation."""
    n = circuit.num_qubits
    if n > max_qubits:
        raise TooManyQubits(f"{n} qubits exceeds unitary cap {max_qubits}")
    dim = 1 << n
    u = np.eye(dim, dtype=complex)
    for g in circuit.gates:
        if g.is_barrier:
            continue
        u = _apply_left(u, g.matrix, g.qubits, n)
    return u


def _apply_left(u: np.ndarray, mat: np.ndarray, qubits: tuple, n: int) -> np.ndarray:
    k = len(qubits)
    dim = 1 << n
    t = u.reshape([2] * n + [dim])
    g = mat.reshape([2] * (2 * k))
    t = np.tensordot(g, t, axes=(list(range(k, 2 * k)), list(qubits)))
    perm = [0] * (n + 1)
    rest = [ax for ax in range(n) if ax not in qubits]
    for i, q in enumerate(qubits):
        perm[q] = i
    for i, q in enumerate(rest):
        perm[q] = k + i
    perm[n] = n
    return t.transpose(perm).reshape(dim, dim)


def permutation_matrix(perm) -> np.ndarray:
    """Operator P with P|x_0 x_1 ...> = |y> where bit perm[i] of y is bit i of x.

    perm maps source qubit position -> destination qubit position.
    """
    n = len(perm)
    dim = 1 << n
    p = np.zeros((dim, dim), dtype=complex)
    for src in range(dim):
        dst = 0
        for i in range(n):
            bit = (src >> (n - 1 - i)) & 1
            dst |= bit << (n - 1 - perm[i])
        p[dst, src] = 1.0
    return p


def permute_state(state: np.ndarray, perm) -> np.ndarray:
    """Relabel qubits of a state: qubit i of the input becomes qubit perm[i]."""
    n = len(perm)
    t = state.reshape([2] * n)
    axes = [0] * n
    for i in range(n):
        axes[perm[i]] = i
    return t.transpose(axes).reshape(-1)


def phase_aligned_distance(a: np.ndarray, b: np.ndarray) -> float:
    """max|a - e^{i phi} b| with phi estimated from the largest entry of b."""
    idx = np.argmax(np.abs(b))
    ref = b.reshape(-1)[idx]
    if abs(ref) < 1e-12:
        return float(np.max(np.abs(a - b)))
    phase = a.reshape(-1)[idx] / ref
    if abs(phase) < 1e-12:
        return float(np.max(np.abs(a - b)))
    phase /= abs(phase)
    return float(np.max(np.abs(a - phase * b)))


def equivalent(c1: Circuit, c2: Circuit, layout_perm=None, tol: float = 1e-8):
    """Whether c2, relabeled through the layout permutation, equals c1 up to
    a global phase: P^dag U2 P = e^{i phi} U1 with P mapping qubit i of c1
    onto qubit layout_perm[i] of c2.

    Returns (bool, max deviation). Measurements are stripped; the layout's
    measurement remapping is checked structurally by callers. Routed
    circuits with distinct initial and final layouts go through
    pipeline_equivalent instead.
    """
    if c1.num_qubits != c2.num_qubits:
        raise DimensionMismatch("qubit counts differ")
    u1 = circuit_unitary(c1)
    u2 = circuit_unitary(c2)
    if layout_perm is not None:
        p = permutation_matrix(layout_perm)
        u2 = p.conj().T @ u2 @ p
    dev = phase_aligned_distance(u2, u1)
    return dev <= tol, dev


def pipeline_equivalent(original: Circuit, routed: Circuit, initial_layout,
                        final_layout, tol: float = 1e-8, num_states: int = 3,
                        seed: int = 7):
    """Equivalence of a routed/lowered circuit against its source.

    The routed circuit acts on physical qubits; virtual qubit v enters at
    physical initial_layout[v] and exits at final_layout[v]. Small cases are
    checked at the unitary level, larger ones on |0..0> plus random product
    states (statevector probes).

    Returns (bool, max deviation).
    """
    n = original.num_qubits
    big_n = routed.num_qubits
    active = {q for g in routed.gates for q in g.qubits}
    active |= {initial_layout[v] for v in range(n)}
    active |= {final_layout[v] for v in range(n)}
    if len(active) < big_n:
        # untouched physical qubits stay in |0>; compact them away
        order = sorted(active)
        back = {q: i for i, q in enumerate(order)}
        routed = Circuit(len(order), [g.remapped(back) for g in routed.gates])
        initial_layout = [back[initial_layout[v]] for v in range(n)]
        final_layout = [back[final_layout[v]] for v in range(n)]
        big_n = len(order)
    if n > MAX_UNITARY_QUBITS or big_n > MAX_UNITARY_QUBITS:
        return _state_probe_equivalent(original, routed, initial_layout,
                                       final_layout, tol, num_states, seed)
    u1 = circuit_unitary(original)
    if big_n > n:
        u1 = np.kron(u1, np.eye(1 << (big_n - n)))
    pad = [initial_layout[v] for v in range(n)]
    pad += sorted(set(range(big_n)) - set(pad))
    p_in = permutation_matrix(pad)
    pad_f = [final_layout[v] for v in range(n)]
    pad_f += sorted(set(range(big_n)) - set(pad_f))
    p_out = permutation_matrix(pad_f)
    u2 = circuit_unitary(routed)
    lhs = p_out.conj().T @ u2 @ p_in
    dev = phase_aligned_distance(lhs, u1)
    return dev <= tol, dev


def _state_probe_equivalent(original, routed, initial_layout, final_layout,
                            tol, num_states, seed):
    n = original.num_qubits
    big_n = routed.num_qubits
    rng = np.random.default_rng(seed)
    worst = 0.0
    for trial in range(num_states + 1):
        if trial == 0:
            local = [np.array([1.0, 0.0], dtype=complex)] * n
        else:
            local = []
            for _ in range(n):
                v = rng.normal(size=2) + 1j * rng.normal(size=2)
                local.append(v / np.linalg.norm(v))
        psi = local[0]
        for v in local[1:]:
            psi = np.kron(psi, v)
        ref = simulate(original.without_measurements(), psi)
        # embed: virtual qubit v sits at physical initial_layout[v], rest |0>
        emb = np.array([1.0], dtype=complex)
        slot = {initial_layout[v]: v for v in range(n)}
        for p in range(big_n):
            emb = np.kron(emb, local[slot[p]] if p in slot else np.array([1.0, 0.0]))
        out = simulate(routed.without_measurements(), emb)
        # pull virtual qubits back out of their final physical slots
        expect_big = np.array([1.0], dtype=complex)
        t = out.reshape([2] * big_n)
        order = [final_layout[v] for v in range(n)]
        order += sorted(set(range(big_n)) - set(order))
        t = t.transpose(order).reshape(1 << n, -1)
        # unused physical qubits must remain |0>
        rest_norm = np.linalg.norm(t[:, 1:])
        got = t[:, 0]
        dev = max(phase_aligned_distance(got, ref), float(rest_norm))
        worst = max(worst, dev)
        if worst > tol:
            return False, worst
    return True, worst
