"""Pulse-level simulator: time-dependent Hamiltonian assembly, unitary
propagation, Lindblad evolution, fidelity metrics, and a bounded
pulse-parameter optimizer.

Units: time in ns, angular amplitudes in rad/ns, decay rates in 1/ns.

The drive/coupling Hamiltonian is

    H(t) = sum_i [ I_i(t)/2 sx_i + Q_i(t)/2 sy_i ]
         + sum_<ij> J_ij(t)/2 (sx_i sx_j + sy_i sy_j)
         + sum_i D_i(t)/2 sz_i

where the D term is zero unless a detuning control is programmed (it backs
the two-qubit calibration ansatz, which adds a shared Z detuning).

Open-system dynamics integrate, verbatim,

    drho = -i[H, rho] + sum_i kappa_i (s-_i rho s+_i - {s+_i s-_i, rho}/2)
                      + sum_i gamma_i/2 (sz_i rho sz_i - rho)

so a pure dephasing rate gamma decays coherences as exp(-gamma t), and
gamma is derived from calibration as 1/T2 - 1/(2 T1), clamped at zero.

Propagators use fixed-step midpoint-Magnus with an exact single step across
any window where all controls are constant; Lindblad runs use classic RK4.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, StepTooLarge

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.diag([1.0, -1.0]).astype(complex)
SM = np.array([[0, 1], [0, 0]], dtype=complex)   # sigma_minus = |0><1|
SP = SM.conj().T

MAX_DM_QUBITS = 4
MAX_STATE_QUBITS = 10
DEFAULT_DT_NS = 0.1


def dephasing_rate(t1_ns: float, t2_ns: float) -> float:
    """Pure dephasing rate 1/T2 - 1/(2 T1), clamped at zero."""
    return max(0.0, 1.0 / t2_ns - 1.0 / (2.0 * t1_ns))


# ---------------------------------------------------------------------------
# controls
# ---------------------------------------------------------------------------

@dataclass
class Segment:
    t0: float
    t1: float
    value: float | None = None     # constant segment
    fn: object = None              # or callable t_ns -> float

    @property
    def constant(self) -> bool:
        return self.fn is None

    def at(self, t: float) -> float:
        return self.value if self.fn is None else self.fn(t)


class Control:
    """Piecewise control channel: a sum of time-bounded segments."""

    def __init__(self):
        self.segments: list[Segment] = []

    def add_constant(self, t0: float, t1: float, value: float):
        if value != 0.0:
            self.segments.append(Segment(t0, t1, value=value))

    def add_fn(self, t0: float, t1: float, fn):
        self.segments.append(Segment(t0, t1, fn=fn))

    def at(self, t: float) -> float:
        total = 0.0
        for s in self.segments:
            if s.t0 <= t < s.t1:
                total += s.at(t)
        return total

    def breakpoints(self) -> list[float]:
        pts = set()
        for s in self.segments:
            pts.add(s.t0)
            pts.add(s.t1)
        return sorted(pts)

    def constant_on(self, t0: float, t1: float) -> bool:
        mid = (t0 + t1) / 2
        return all(s.constant for s in self.segments if s.t0 <= mid < s.t1)

    @property
    def empty(self) -> bool:
        return not self.segments


@dataclass
class PulseModel:
    """n-qubit control model over a device-topology subset."""
    n: int
    pairs: list[tuple[int, int]] = field(default_factory=list)
    dt_ns: float = DEFAULT_DT_NS
    kappa: list[float] = field(default_factory=list)   # relaxation rate 1/ns
    gamma: list[float] = field(default_factory=list)   # dephasing rate 1/ns

    def __post_init__(self):
        self.i_ctrl = [Control() for _ in range(self.n)]
        self.q_ctrl = [Control() for _ in range(self.n)]
        self.z_ctrl = [Control() for _ in range(self.n)]
        self.j_ctrl = {tuple(sorted(p)): Control() for p in self.pairs}
        if not self.kappa:
            self.kappa = [0.0] * self.n
        if not self.gamma:
            self.gamma = [0.0] * self.n
        self._ops = _Operators(self.n, [tuple(sorted(p)) for p in self.pairs])

    def all_controls(self) -> list[Control]:
        return self.i_ctrl + self.q_ctrl + self.z_ctrl + list(self.j_ctrl.values())

    def horizon(self) -> float:
        pts = [p for c in self.all_controls() for p in c.breakpoints()]
        return max(pts) if pts else 0.0


class _Operators:
    """Cached full-space Pauli/collapse operators."""

    def __init__(self, n: int, pairs):
        dim = 1 << n
        self.dim = dim
        self.sx = [_embed(SX, q, n) for q in range(n)]
        self.sy = [_embed(SY, q, n) for q in range(n)]
        self.sz = [_embed(SZ, q, n) for q in range(n)]
        self.sm = [_embed(SM, q, n) for q in range(n)]
        self.xxyy = {}
        for (a, b) in pairs:
            self.xxyy[(a, b)] = self.sx[a] @ self.sx[b] + self.sy[a] @ self.sy[b]


def _embed(op: np.ndarray, q: int, n: int) -> np.ndarray:
    out = np.array([[1.0 + 0j]])
    for i in range(n):
        out = np.kron(out, op if i == q else np.eye(2))
    return out


def hamiltonian_at(model: PulseModel, t: float) -> np.ndarray:
    """H(t) per the module formula; Hermitian by construction."""
    ops = model._ops
    h = np.zeros((ops.dim, ops.dim), dtype=complex)
    for q in range(model.n):
        iv = model.i_ctrl[q].at(t)
        qv = model.q_ctrl[q].at(t)
        zv = model.z_ctrl[q].at(t)
        if iv:
            h += 0.5 * iv * ops.sx[q]
        if qv:
            h += 0.5 * qv * ops.sy[q]
        if zv:
            h += 0.5 * zv * ops.sz[q]
    for pair, ctrl in model.j_ctrl.items():
        jv = ctrl.at(t)
        if jv:
            h += 0.5 * jv * ops.xxyy[pair]
    return h


def _expm_step(h: np.ndarray, dt: float) -> np.ndarray:
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * w * dt)) @ v.conj().T


def propagate(model: PulseModel, horizon: float | None = None) -> np.ndarray:
    """Time-ordered propagator U(T) by midpoint-Magnus steps.

    Windows where every control is constant are integrated in one exact
    exponential; time-varying windows use fixed dt_ns midpoint steps.
    """
    if model.n > MAX_STATE_QUBITS:
        raise DimensionMismatch(f"propagator capped at {MAX_STATE_QUBITS} qubits")
    t_end = model.horizon() if horizon is None else float(horizon)
    u = np.eye(model._ops.dim, dtype=complex)
    if t_end <= 0:
        return u
    pts = {0.0, t_end}
    for c in model.all_controls():
        pts.update(p for p in c.breakpoints() if 0 < p < t_end)
    pts = sorted(pts)
    for t0, t1 in zip(pts[:-1], pts[1:]):
        width = t1 - t0
        if width <= 1e-12:
            continue
        if all(c.constant_on(t0, t1) for c in model.all_controls()):
            u = _expm_step(hamiltonian_at(model, (t0 + t1) / 2), width) @ u
            continue
        steps = max(1, int(math.ceil(width / model.dt_ns)))
        h_step = width / steps
        for k in range(steps):
            tm = t0 + (k + 0.5) * h_step
            u = _expm_step(hamiltonian_at(model, tm), h_step) @ u
    return u


# ---------------------------------------------------------------------------
# Lindblad evolution
# ---------------------------------------------------------------------------

def check_density_matrix(rho: np.ndarray, herm_tol: float = 1e-10,
                         trace_tol: float = 1e-8, eig_tol: float = -1e-8):
    if np.max(np.abs(rho - rho.conj().T)) > herm_tol:
        raise DimensionMismatch("density matrix is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > trace_tol:
        raise DimensionMismatch("density matrix trace is not 1")
    if np.linalg.eigvalsh(rho).min() < eig_tol:
        raise DimensionMismatch("density matrix has a negative eigenvalue")


def lindblad_evolve(model: PulseModel, rho0: np.ndarray, horizon: float | None = None,
                    check: bool = True) -> np.ndarray:
    """Integrate the master equation with RK4 at fixed dt."""
    if model.n > MAX_DM_QUBITS:
        raise DimensionMismatch(f"density-matrix runs capped at {MAX_DM_QUBITS} qubits")
    rho = np.asarray(rho0, dtype=complex).copy()
    if rho.shape != (model._ops.dim, model._ops.dim):
        raise DimensionMismatch(f"rho has shape {rho.shape}, expected {model._ops.dim}")
    if check:
        check_density_matrix(rho)
    t_end = model.horizon() if horizon is None else float(horizon)
    if t_end <= 0:
        return rho
    ops = model._ops
    kappas = [(q, k) for q, k in enumerate(model.kappa) if k > 0]
    gammas = [(q, g) for q, g in enumerate(model.gamma) if g > 0]
    sp_sm = {q: ops.sm[q].conj().T @ ops.sm[q] for q, _ in kappas}

    def rhs(t, r):
        h = hamiltonian_at(model, t)
        out = -1j * (h @ r - r @ h)
        for q, k in kappas:
            sm = ops.sm[q]
            anti = sp_sm[q] @ r + r @ sp_sm[q]
            out += k * (sm @ r @ sm.conj().T - 0.5 * anti)
        for q, g in gammas:
            sz = ops.sz[q]
            out += 0.5 * g * (sz @ r @ sz - r)
        return out

    # integrate window by window between control breakpoints; clamping the
    # stage times into the window keeps half-open segment edges consistent
    pts = {0.0, t_end}
    for ctrl in model.all_controls():
        pts.update(p for p in ctrl.breakpoints() if 0 < p < t_end)
    pts = sorted(pts)
    for w0, w1 in zip(pts[:-1], pts[1:]):
        width = w1 - w0
        if width <= 1e-12:
            continue
        hi = w1 - 1e-9 * width
        steps = max(1, int(math.ceil(width / model.dt_ns)))
        h_step = width / steps
        t = w0
        for _ in range(steps):
            k1 = rhs(min(t, hi), rho)
            k2 = rhs(min(t + h_step / 2, hi), rho + h_step / 2 * k1)
            k3 = rhs(min(t + h_step / 2, hi), rho + h_step / 2 * k2)
            k4 = rhs(min(t + h_step, hi), rho + h_step * k3)
            rho = rho + (h_step / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
            t += h_step
    drift = abs(np.trace(rho).real - 1.0)
    if drift > 1e-8:
        raise StepTooLarge(f"trace drifted by {drift:.2e}; reduce dt_ns")
    if check:
        check_density_matrix(rho, herm_tol=1e-9)
    return rho


# ---------------------------------------------------------------------------
# fidelity metrics
# ---------------------------------------------------------------------------

def avg_gate_fidelity(u: np.ndarray, u_tgt: np.ndarray) -> float:
    """( |Tr(U_tgt^dag U)|^2 + d ) / ( d (d+1) ); global-phase invariant."""
    u = np.asarray(u)
    u_tgt = np.asarray(u_tgt)
    if u.shape != u_tgt.shape or u.shape[0] != u.shape[1]:
        raise DimensionMismatch(f"shapes {u.shape} vs {u_tgt.shape}")
    d = u.shape[0]
    tr = np.trace(u_tgt.conj().T @ u)
    return float((abs(tr) ** 2 + d) / (d * (d + 1)))


def state_fidelity(rho: np.ndarray, psi: np.ndarray) -> float:
    """<psi| rho |psi> for a density matrix against a pure state."""
    rho = np.asarray(rho)
    psi = np.asarray(psi).reshape(-1)
    if rho.shape != (psi.size, psi.size):
        raise DimensionMismatch(f"rho {rho.shape} incompatible with psi {psi.shape}")
    val = np.vdot(psi, rho @ psi)
    if abs(val.imag) > 1e-9:
        raise DimensionMismatch(f"fidelity has imaginary part {val.imag:.2e}")
    return float(val.real)


# ---------------------------------------------------------------------------
# bounded quasi-Newton pulse optimizer
# ---------------------------------------------------------------------------

FD_STEP = 1e-6


def _central_diff(fn, x, bounds):
    g = np.zeros_like(x)
    for i in range(x.size):
        h = FD_STEP * max(1.0, abs(x[i]))
        lo, hi = bounds[i]
        xp = x.copy(); xp[i] = min(x[i] + h, hi)
        xm = x.copy(); xm[i] = max(x[i] - h, lo)
        denom = xp[i] - xm[i]
        g[i] = (fn(xp) - fn(xm)) / denom if denom > 0 else 0.0
    return g


def optimize_pulse(objective, bounds, budget: int = 200, seed: int | None = None,
                   x0=None, restarts: int = 0):
    """Maximize a deterministic objective under box bounds with L-BFGS-B.

    Gradients are central finite differences with step 1e-6*max(1,|p|).
    Returns (best params, best value, trace) where trace is the monotone
    best-so-far value after each objective evaluation. The evaluation budget
    counts every objective call, including gradient stencils; the seed only
    drives optional random restarts.
    """
    from scipy.optimize import minimize

    bounds = [(float(lo), float(hi)) for lo, hi in bounds]
    dim = len(bounds)
    evals = {"n": 0}
    best = {"x": None, "f": -math.inf}
    trace: list[float] = []

    def record(x, f):
        evals["n"] += 1
        if f > best["f"]:
            best["f"] = f
            best["x"] = np.array(x)
        trace.append(best["f"])

    class _Budget(Exception):
        pass

    def neg(x):
        if evals["n"] >= budget:
            raise _Budget()
        x = np.clip(x, [b[0] for b in bounds], [b[1] for b in bounds])
        f = float(objective(np.array(x)))
        record(x, f)
        return -f

    def neg_grad(x):
        return -_central_diff(lambda p: -neg(p), np.asarray(x, dtype=float), bounds)

    starts = []
    if x0 is not None:
        starts.append(np.asarray(x0, dtype=float))
    else:
        starts.append(np.array([(lo + hi) / 2 for lo, hi in bounds]))
    rng = np.random.default_rng(seed if seed is not None else 0)
    for _ in range(restarts):
        starts.append(np.array([rng.uniform(lo, hi) for lo, hi in bounds]))

    for x_start in starts:
        if evals["n"] >= budget:
            break
        try:
            minimize(neg, x_start, jac=neg_grad, method="L-BFGS-B", bounds=bounds,
                     options={"maxcor": 10, "maxfun": budget, "ftol": 1e-15, "gtol": 1e-12})
        except _Budget:
            pass
    if best["x"] is None:
        x = starts[0]
        f = float(objective(x))
        record(x, f)
    return best["x"], best["f"], trace
