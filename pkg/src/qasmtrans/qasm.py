"""OpenQASM 2.0 front end: tokenizer, parser, and emitter.

The parser targets the static qelib1 vocabulary (see gates.GATE_INFO).
Composition gates are expanded inline to their standard-gate definitions,
so a parsed circuit contains only basic/standard (and extension) gates.
`include "qelib1.inc"` is recognized and satisfied internally; nothing is
read from the filesystem. Classical control (`if`), `opaque`, custom
`gate` bodies, and `reset` are rejected as unsupported statements.

The `OPENQASM 2.0;` header is required in files but tolerated as missing
so that inline snippets parse; any version other than 2.0 is rejected.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass

from . import gates
from .circuit import BARRIER, Circuit, GateIR, RegisterMap
from .errors import (
    ArityMismatch,
    IllegalCharacter,
    QasmSyntaxError,
    UndeclaredRegister,
    UnknownGate,
    UnserializableGate,
    UnsupportedStatement,
)

KEYWORDS = frozenset(
    ["OPENQASM", "include", "qreg", "creg", "gate", "barrier",
     "measure", "reset", "if", "opaque"]
)

_TOKEN_RE = re.compile(
    r"""(?P<comment>//[^\n]*)
      | (?P<ws>[\ \t\r]+)
      | (?P<nl>\n)
      | (?P<string>"[^"\n]*")
      | (?P<number>(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?)
      | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
      | (?P<symbol>->|==|[\[\](){};,+\-*/^])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True, slots=True)
class Token:
    kind: str  # keyword | identifier | number | symbol | string
    text: str
    line: int
    column: int


def tokenize(source: str) -> list[Token]:
    """Lex QASM text into tokens; comments are dropped, positions are 1-based."""
    tokens: list[Token] = []
    line, line_start = 1, 0
    pos, n = 0, len(source)
    while pos < n:
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise IllegalCharacter(source[pos], line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind not in ("ws", "comment"):
            text = m.group()
            if kind == "ident" and text in KEYWORDS:
                kind = "keyword"
            elif kind == "ident":
                kind = "identifier"
            tokens.append(Token(kind, text, line, pos - line_start + 1))
        pos = m.end()
    return tokens


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

class _Parser:
    def __init__(self, tokens: list[Token], source_name: str = ""):
        self.toks = tokens
        self.i = 0
        self.rm = RegisterMap()
        self.gates: list[GateIR] = []
        self.measurements: list[tuple[int, int]] = []
        self.measured: set[int] = set()
        self.source_name = source_name

    # --- token helpers ---

    def _peek(self) -> Token | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def _next(self) -> Token:
        tok = self._peek()
        if tok is None:
            last = self.toks[-1].line if self.toks else 1
            raise QasmSyntaxError(last, "unexpected end of input")
        self.i += 1
        return tok

    def _expect(self, text: str) -> Token:
        tok = self._next()
        if tok.text != text:
            raise QasmSyntaxError(tok.line, f"expected {text!r}, got {tok.text!r}")
        return tok

    def _at(self, text: str) -> bool:
        tok = self._peek()
        return tok is not None and tok.text == text

    # --- grammar ---

    def parse(self) -> Circuit:
        if self._at("OPENQASM"):
            tok = self._next()
            ver = self._next()
            if ver.text != "2.0":
                raise UnsupportedStatement(f"OPENQASM version {ver.text} (only 2.0)")
            self._expect(";")
        while self._peek() is not None:
            self._statement()
        circ = Circuit(self.rm.total_qubits, self.gates, self.measurements,
                       self.rm, self.source_name)
        return circ

    def _statement(self):
        tok = self._peek()
        text = tok.text
        if text == "include":
            self._next()
            fname = self._next()
            if fname.kind != "string":
                raise QasmSyntaxError(fname.line, "include expects a string")
            if fname.text.strip('"') != "qelib1.inc":
                raise UnsupportedStatement(f"unknown include {fname.text}")
            self._expect(";")
        elif text in ("qreg", "creg"):
            self._next()
            name = self._next()
            if name.kind != "identifier":
                raise QasmSyntaxError(name.line, f"bad register name {name.text!r}")
            self._expect("[")
            size = self._next()
            if size.kind != "number" or not size.text.isdigit():
                raise QasmSyntaxError(size.line, "register size must be a positive integer")
            self._expect("]")
            self._expect(";")
            if int(size.text) < 1:
                raise QasmSyntaxError(size.line, "register size must be >= 1")
            if text == "qreg":
                self.rm.add_qreg(name.text, int(size.text))
            else:
                self.rm.add_creg(name.text, int(size.text))
        elif text in ("if", "opaque", "gate", "reset"):
            raise UnsupportedStatement(f"line {tok.line}: {text!r} statements are not supported")
        elif text == "barrier":
            self._next()
            qubits: list[int] = []
            while True:
                qubits.extend(self._qubit_operand())
                if self._at(","):
                    self._next()
                else:
                    break
            self._expect(";")
            self.gates.append(GateIR(BARRIER, qubits))
        elif text == "measure":
            self._measure(tok.line)
        elif tok.kind in ("identifier", "keyword"):
            self._gate_call(tok)
        else:
            raise QasmSyntaxError(tok.line, f"unexpected token {text!r}")

    def _measure(self, line: int):
        self._next()
        qreg, qidx = self._operand_ref()
        self._expect("->")
        creg, cidx = self._operand_ref(classical=True)
        self._expect(";")
        if qidx is None and cidx is None:
            qoff, qsize = self.rm.qregs[qreg]
            coff, csize = self.rm.cregs[creg]
            if qsize != csize:
                raise QasmSyntaxError(line, "measure register sizes differ")
            pairs = [(qoff + k, coff + k) for k in range(qsize)]
        elif qidx is not None and cidx is not None:
            pairs = [(self.rm.qubit_index(qreg, qidx), self.rm.clbit_index(creg, cidx))]
        else:
            raise QasmSyntaxError(line, "measure operands must both be indexed or both whole registers")
        for q, c in pairs:
            if any(c == c0 for _, c0 in self.measurements):
                raise QasmSyntaxError(line, f"classical bit {c} measured twice")
            self.measurements.append((q, c))
            self.measured.add(q)

    def _operand_ref(self, classical: bool = False):
        name = self._next()
        if name.kind != "identifier":
            raise QasmSyntaxError(name.line, f"expected register name, got {name.text!r}")
        regs = self.rm.cregs if classical else self.rm.qregs
        if name.text not in regs:
            raise UndeclaredRegister(name.text)
        if self._at("["):
            self._next()
            idx = self._next()
            if idx.kind != "number" or not idx.text.isdigit():
                raise QasmSyntaxError(idx.line, "register index must be an integer")
            self._expect("]")
            return name.text, int(idx.text)
        return name.text, None

    def _qubit_operand(self) -> list[int]:
        """One operand as a list of flattened indices (len>1 means whole register)."""
        name, idx = self._operand_ref()
        off, size = self.rm.qregs[name]
        if idx is None:
            return [off + k for k in range(size)]
        return [self.rm.qubit_index(name, idx)]

    def _gate_call(self, tok: Token):
        name = self._next().text
        if name == "c4x":
            raise UnknownGate(name)
        if name not in gates.GATE_INFO:
            raise UnknownGate(name)
        nq, npar = gates.GATE_INFO[name]
        params: tuple = ()
        if self._at("("):
            self._next()
            vals = []
            if not self._at(")"):
                vals.append(self._expression())
                while self._at(","):
                    self._next()
                    vals.append(self._expression())
            self._expect(")")
            params = tuple(vals)
        if len(params) != npar:
            raise ArityMismatch(f"line {tok.line}: {name} expects {npar} params, got {len(params)}")
        operands: list[list[int]] = []
        while True:
            operands.append(self._qubit_operand())
            if self._at(","):
                self._next()
            else:
                break
        self._expect(";")
        if len(operands) != nq:
            raise ArityMismatch(f"line {tok.line}: {name} expects {nq} qubits, got {len(operands)}")
        span = max(len(op) for op in operands)
        for op in operands:
            if len(op) not in (1, span):
                raise QasmSyntaxError(tok.line, "broadcast register sizes differ")
        for j in range(span):
            qubits = tuple(op[j] if len(op) > 1 else op[0] for op in operands)
            if len(set(qubits)) != len(qubits):
                raise QasmSyntaxError(tok.line, f"{name}: repeated qubit operand")
            for q in qubits:
                if q in self.measured:
                    raise QasmSyntaxError(tok.line, f"gate on already-measured qubit {q}")
            self._emit(name, params, qubits)

    def _emit(self, name: str, params: tuple, qubits: tuple):
        if name in gates.COMPOSITION_GATES:
            for child, cparams, cqubits in gates.expand(name, params, qubits):
                self._emit(child, cparams, cqubits)
        else:
            self.gates.append(GateIR(name, qubits, params))

    # --- parameter expressions: pi, literals, + - * /, unary minus, parens ---

    def _expression(self) -> float:
        val = self._term()
        while self._at("+") or self._at("-"):
            op = self._next().text
            rhs = self._term()
            val = val + rhs if op == "+" else val - rhs
        return val

    def _term(self) -> float:
        val = self._unary()
        while self._at("*") or self._at("/"):
            op = self._next().text
            rhs = self._unary()
            val = val * rhs if op == "*" else val / rhs
        return val

    def _unary(self) -> float:
        if self._at("-"):
            self._next()
            return -self._unary()
        if self._at("+"):
            self._next()
            return self._unary()
        return self._atom()

    def _atom(self) -> float:
        tok = self._next()
        if tok.kind == "number":
            return float(tok.text)
        if tok.text == "pi":
            return math.pi
        if tok.text == "(":
            val = self._expression()
            self._expect(")")
            return val
        raise QasmSyntaxError(tok.line, f"bad expression token {tok.text!r}")


def parse(tokens) -> Circuit:
    """Parse a token list (or raw QASM text) into a Circuit."""
    if isinstance(tokens, str):
        tokens = tokenize(tokens)
    return _Parser(list(tokens)).parse()


def parse_text(source: str, name: str = "") -> Circuit:
    p = _Parser(tokenize(source), source_name=name)
    return p.parse()


def parse_file(path) -> Circuit:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_text(fh.read(), name=str(path))


# ---------------------------------------------------------------------------
# emitter
# ---------------------------------------------------------------------------

def emit_qasm(circuit: Circuit) -> str:
    """Serialize to OpenQASM 2.0 with a single flattened qreg/creg.

    Parameters are printed with repr(), which round-trips doubles exactly.
    """
    lines = ['OPENQASM 2.0;', 'include "qelib1.inc";', f"qreg q[{circuit.num_qubits}];"]
    nclbits = circuit.num_clbits
    if nclbits > 0:
        lines.append(f"creg c[{nclbits}];")
    for g in circuit.gates:
        args = ",".join(f"q[{q}]" for q in g.qubits)
        if g.is_barrier:
            lines.append(f"barrier {args};")
            continue
        if g.name not in gates.GATE_INFO:
            raise UnserializableGate(g.name)
        if g.params:
            pstr = ",".join(repr(p) for p in g.params)
            lines.append(f"{g.name}({pstr}) {args};")
        else:
            lines.append(f"{g.name} {args};")
    for q, c in circuit.measurements:
        lines.append(f"measure q[{q}] -> c[{c}];")
    return "\n".join(lines) + "\n"
