"""Core circuit representation: GateIR, RegisterMap, Circuit.

A Circuit is an ordered gate list over a flattened qubit index range.
Measurements are terminal and kept separately as (qubit -> clbit) pairs.
Barriers travel in the gate list as matrix-less scheduling markers.
"""
from __future__ import annotations

import numpy as np

from . import gates
from .errors import ArityMismatch, QasmTransError

BARRIER = "barrier"


class GateIR:
    """One quantum operation: name, flattened qubit indices, parameters, matrix.

    The matrix is shared and cached per (name, params); real and imaginary
    parts are stored as separate read-only float arrays. Barriers carry no
    matrix.
    """

    __slots__ = ("name", "qubits", "params", "_re", "_im")

    def __init__(self, name: str, qubits, params=(), _defer_matrix: bool = False):
        self.name = name
        self.qubits = tuple(qubits)
        self.params = tuple(float(p) for p in params)
        if len(set(self.qubits)) != len(self.qubits):
            raise ArityMismatch(f"{name}: duplicate qubit in {self.qubits}")
        if name == BARRIER:
            self._re = self._im = None
            return
        nq, npar = gates.GATE_INFO.get(name, (None, None))
        if nq is not None:
            if nq != len(self.qubits):
                raise ArityMismatch(f"{name} expects {nq} qubits, got {len(self.qubits)}")
            if npar != len(self.params):
                raise ArityMismatch(f"{name} expects {npar} params, got {len(self.params)}")
        if _defer_matrix:
            self._re = self._im = None
        else:
            self._re, self._im = gates.matrix_parts(name, self.params)

    @property
    def matrix_real(self) -> np.ndarray:
        if self._re is None and self.name != BARRIER:
            self._re, self._im = gates.matrix_parts(self.name, self.params)
        return self._re

    @property
    def matrix_imag(self) -> np.ndarray:
        self.matrix_real
        return self._im

    @property
    def matrix(self) -> np.ndarray | None:
        if self.name == BARRIER:
            return None
        return self.matrix_real + 1j * self.matrix_imag

    @property
    def num_qubits(self) -> int:
        return len(self.qubits)

    @property
    def is_barrier(self) -> bool:
        return self.name == BARRIER

    def remapped(self, perm) -> "GateIR":
        """Copy with qubit indices mapped through perm (index -> new index)."""
        g = GateIR.__new__(GateIR)
        g.name = self.name
        g.qubits = tuple(perm[q] for q in self.qubits)
        g.params = self.params
        g._re, g._im = self._re, self._im
        return g

    def __repr__(self):
        p = "(" + ",".join(f"{x:g}" for x in self.params) + ")" if self.params else ""
        return f"GateIR({self.name}{p} @ {self.qubits})"

    def __eq__(self, other):
        return (
            isinstance(other, GateIR)
            and self.name == other.name
            and self.qubits == other.qubits
            and self.params == other.params
        )

    def __hash__(self):
        return hash((self.name, self.qubits, self.params))


class RegisterMap:
    """Declared registers flattened to contiguous index ranges by prefix sums."""

    def __init__(self):
        self.qregs: dict[str, tuple[int, int]] = {}  # name -> (offset, size)
        self.cregs: dict[str, tuple[int, int]] = {}
        self.total_qubits = 0
        self.total_clbits = 0

    def add_qreg(self, name: str, size: int):
        if name in self.qregs or name in self.cregs:
            raise QasmTransError(f"register {name!r} redeclared")
        self.qregs[name] = (self.total_qubits, size)
        self.total_qubits += size

    def add_creg(self, name: str, size: int):
        if name in self.qregs or name in self.cregs:
            raise QasmTransError(f"register {name!r} redeclared")
        self.cregs[name] = (self.total_clbits, size)
        self.total_clbits += size

    def qubit_index(self, name: str, i: int) -> int:
        off, size = self.qregs[name]
        if not 0 <= i < size:
            raise QasmTransError(f"index {i} out of range for qreg {name}[{size}]")
        return off + i

    def clbit_index(self, name: str, i: int) -> int:
        off, size = self.cregs[name]
        if not 0 <= i < size:
            raise QasmTransError(f"index {i} out of range for creg {name}[{size}]")
        return off + i

    @classmethod
    def flat(cls, num_qubits: int, num_clbits: int = 0) -> "RegisterMap":
        rm = cls()
        rm.add_qreg("q", num_qubits)
        if num_clbits:
            rm.add_creg("c", num_clbits)
        return rm


class Circuit:
    """Ordered gates over flattened qubits, plus terminal measurements."""

    def __init__(self, num_qubits: int, gates_=None, measurements=None,
                 register_map: RegisterMap | None = None, source_name: str = ""):
        self.num_qubits = num_qubits
        self.gates: list[GateIR] = list(gates_ or [])
        self.measurements: list[tuple[int, int]] = list(measurements or [])
        self.register_map = register_map or RegisterMap.flat(num_qubits, self.num_clbits_used())
        self.source_name = source_name

    def num_clbits_used(self) -> int:
        return 1 + max((c for _, c in self.measurements), default=-1)

    @property
    def num_clbits(self) -> int:
        return max(self.register_map.total_clbits, self.num_clbits_used())

    def add(self, name: str, qubits, params=()) -> "Circuit":
        self.gates.append(GateIR(name, qubits, params))
        return self

    def measure(self, qubit: int, clbit: int) -> "Circuit":
        self.measurements.append((qubit, clbit))
        return self

    def copy(self) -> "Circuit":
        c = Circuit(self.num_qubits, list(self.gates), list(self.measurements),
                    self.register_map, self.source_name)
        return c

    def without_measurements(self) -> "Circuit":
        return Circuit(self.num_qubits, list(self.gates), [], self.register_map, self.source_name)

    def without_barriers(self) -> "Circuit":
        return Circuit(self.num_qubits, [g for g in self.gates if not g.is_barrier],
                       list(self.measurements), self.register_map, self.source_name)

    def gate_counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for g in self.gates:
            out[g.name] = out.get(g.name, 0) + 1
        return out

    def structurally_equal(self, other: "Circuit", param_tol: float = 1e-12) -> bool:
        """Gate-for-gate identity: names, qubit indices, params within tol."""
        if self.num_qubits != other.num_qubits:
            return False
        if len(self.gates) != len(other.gates):
            return False
        if self.measurements != other.measurements:
            return False
        for a, b in zip(self.gates, other.gates):
            if a.name != b.name or a.qubits != b.qubits or len(a.params) != len(b.params):
                return False
            if any(abs(x - y) > param_tol for x, y in zip(a.params, b.params)):
                return False
        return True

    def __len__(self):
        return len(self.gates)

    def __repr__(self):
        return (f"Circuit({self.source_name or 'unnamed'}: {self.num_qubits} qubits, "
                f"{len(self.gates)} gates, {len(self.measurements)} measurements)")
