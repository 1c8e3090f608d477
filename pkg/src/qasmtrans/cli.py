"""Command-line entry point tying the pipeline together:
parse -> decompose-3q -> [prioritize] -> route -> [noise-adaptive place] ->
lower -> emit, with space-share and verify subcommands.

Artifacts are written atomically. Every run also produces a summary JSON
(schema "qasmtrans-summary/1") with per-stage timings, circuit statistics
before and after, inserted SWAP count, and the placement score when the
noise-adaptive pass ran. Timings are the only nondeterministic fields; all
other artifacts are byte-identical across identical invocations.

Exit codes: 0 success, 1 parse error, 2 device error, 3 routing infeasible,
4 internal invariant breach.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, field

from . import device as device_mod
from . import ir, oracle, partition, place, pulse, qasm, route
from .lowering import lower as lower_circuit
from .errors import (
    Disconnected,
    Infeasible,
    QasmTransError,
    SchemaError,
    TooManyQubits,
)

PARSE_ERROR, DEVICE_ERROR, ROUTING_ERROR, INTERNAL_ERROR = 1, 2, 3, 4


@dataclass
class JobConfig:
    inputs: list[str] = field(default_factory=list)
    device_path: str | None = None
    backend: str | None = None
    output: str | None = None
    seed: int = 0
    noise_adaptive: bool = False
    space_share: bool = False
    pulse_out: str | None = None
    constrain_k: int | None = None
    priority: list[int] | None = None
    stats: bool = False
    verify: bool = False
    expand_swaps: bool = True
    refinement_rounds: int = 0
    extended_set_size: int = 20
    decay_increment: float = 0.001
    decay_reset_interval: int = 5
    placement_limit: int = 10000


def _atomic_write(path: str, text: str):
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _emit_summary(cfg: JobConfig, summary: dict):
    text = json.dumps(summary, indent=2) + "\n"
    if cfg.output:
        _atomic_write(cfg.output + ".summary.json", text)
    else:
        sys.stdout.write(text)


class _Timer:
    def __init__(self):
        self.timings: dict[str, float] = {}

    def stage(self, name):
        return _Stage(self, name)


class _Stage:
    def __init__(self, timer, name):
        self.timer, self.name = timer, name

    def __enter__(self):
        self.t0 = time.perf_counter()

    def __exit__(self, *exc):
        self.timer.timings[self.name] = (time.perf_counter() - self.t0) * 1000.0


def run(cfg: JobConfig) -> int:
    timer = _Timer()
    t_start = time.perf_counter()
    summary = {"version": "qasmtrans-summary/1", "inputs": list(cfg.inputs)}
    try:
        with timer.stage("parse"):
            circuits = [qasm.parse_file(p) for p in cfg.inputs]
    except (QasmTransError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return PARSE_ERROR

    dev = None
    if cfg.device_path:
        try:
            with timer.stage("device"):
                dev = device_mod.load_device(cfg.device_path)
            for warning in dev.warnings:
                print(f"warning: {warning}", file=sys.stderr)
        except (QasmTransError, OSError, json.JSONDecodeError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return DEVICE_ERROR

    basis = cfg.backend or (dev.basis if dev is not None else None)

    try:
        if cfg.space_share:
            return _run_space_share(cfg, circuits, dev, basis, timer, summary, t_start)
        circ = circuits[0]
        summary["stats_before"] = ir.stats(circ).to_dict()

        if dev is None:
            # statistics-only mode
            if cfg.stats:
                print(ir.stats(circ).to_text())
            summary["timings_ms"] = _finish_timings(timer, t_start)
            _emit_summary(cfg, summary)
            return 0

        with timer.stage("decompose"):
            flat = ir.decompose_3q(circ)
        opts = route.RoutingOptions(expand_swaps=cfg.expand_swaps,
                                    refinement_rounds=cfg.refinement_rounds,
                                    extended_set_size=cfg.extended_set_size,
                                    decay_increment=cfg.decay_increment,
                                    decay_reset_interval=cfg.decay_reset_interval)
        with timer.stage("route"):
            if cfg.constrain_k is not None:
                result = route.constrained_route(flat, dev, cfg.constrain_k,
                                                 seed=cfg.seed, opts=opts)
            else:
                result = route.sabre_route(flat, dev, seed=cfg.seed, opts=opts)
        summary["swaps_inserted"] = result.swaps_inserted
        routed = result.circuit
        initial = list(result.initial_layout.virt_to_phys)
        final = list(result.final_layout.virt_to_phys)

        summary["placement_score"] = None
        if cfg.noise_adaptive:
            with timer.stage("place"):
                target = dev
                if result.region_qubits is not None:
                    target = device_mod.restrict_device(dev, result.region_qubits)
                    back = {q: i for i, q in enumerate(result.region_qubits)}
                    routed = _relabel(routed, back, target.num_qubits)
                    initial = [back[p] for p in initial]
                    final = [back[p] for p in final]
                best, ranked = place.select_placement(routed, target,
                                                      limit=cfg.placement_limit)
                summary["placements"] = [
                    {"mapping": [p for p in s_.mapping.virt_to_phys if p is not None],
                     "score": s_.score, "cp_length": s_.cp_length}
                    for s_ in ranked[:5]
                ]
                perm = partition._total_perm(best.mapping.virt_to_phys, target.num_qubits)
                routed = _relabel(routed, perm, target.num_qubits)
                initial = [perm[p] for p in initial]
                final = [perm[p] for p in final]
                if result.region_qubits is not None:
                    fwd = {i: q for i, q in enumerate(result.region_qubits)}
                    routed = _relabel(routed, fwd, dev.num_qubits)
                    initial = [fwd[p] for p in initial]
                    final = [fwd[p] for p in final]
                summary["placement_score"] = best.score

        with timer.stage("lower"):
            final_circ = lower_circuit(routed, basis or "ibmq")
        if cfg.priority is not None:
            final_circ = route.prioritize_qubits(final_circ, cfg.priority)
        summary["initial_layout"] = initial
        summary["final_layout"] = final
        summary["stats_after"] = ir.stats(final_circ).to_dict()

        if cfg.verify and cfg.priority is None:
            try:
                ok, dev_val = oracle.pipeline_equivalent(circ, final_circ, initial, final)
            except TooManyQubits:
                summary["verified"] = None  # too large for the oracle
            else:
                summary["verified"] = bool(ok)
                if not ok:
                    print(f"error: output failed equivalence check (dev={dev_val:.3e})",
                          file=sys.stderr)
                    return INTERNAL_ERROR

        with timer.stage("emit"):
            text = qasm.emit_qasm(final_circ)
            if cfg.output:
                _atomic_write(cfg.output, text)
            else:
                sys.stdout.write(text)

        if cfg.pulse_out:
            with timer.stage("pulse"):
                lib = pulse.PulseLibrary.for_device(dev)
                schedule = pulse.build_schedule(final_circ, lib, dev)
                _atomic_write(cfg.pulse_out, schedule.to_json() + "\n")
                summary["pulse_makespan_ns"] = schedule.makespan_ns

        if cfg.stats:
            print(ir.stats(final_circ).to_text())
        summary["timings_ms"] = _finish_timings(timer, t_start)
        _emit_summary(cfg, summary)
        return 0
    except (TooManyQubits, Disconnected, Infeasible) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ROUTING_ERROR
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DEVICE_ERROR
    except QasmTransError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INTERNAL_ERROR


def _relabel(circ, perm, num_qubits):
    from .circuit import Circuit
    gates_ = [g.remapped(perm) for g in circ.gates]
    meas = [(perm[q], c) for q, c in circ.measurements]
    return Circuit(num_qubits, gates_, meas, source_name=circ.source_name)


def _finish_timings(timer: _Timer, t_start: float) -> dict:
    out = dict(timer.timings)
    out["total"] = (time.perf_counter() - t_start) * 1000.0
    return out


def _run_space_share(cfg, circuits, dev, basis, timer, summary, t_start) -> int:
    if dev is None:
        print("error: --space-share requires a device", file=sys.stderr)
        return DEVICE_ERROR
    with timer.stage("space_share"):
        result = partition.space_share(circuits, dev, seed=cfg.seed,
                                       basis=basis,
                                       noise_adaptive=cfg.noise_adaptive,
                                       placement_limit=min(cfg.placement_limit, 1000))
    text = qasm.emit_qasm(result.merged)
    if cfg.output:
        _atomic_write(cfg.output, text)
        _atomic_write(cfg.output + ".regions.json",
                      json.dumps(result.reports, indent=2) + "\n")
    else:
        sys.stdout.write(text)
    summary["regions"] = result.reports
    summary["stats_after"] = ir.stats(result.merged).to_dict()
    summary["timings_ms"] = _finish_timings(timer, t_start)
    _emit_summary(cfg, summary)
    return 0


def _run_simulate(argv: list[str]) -> int:
    ap = argparse.ArgumentParser(prog="qasmtrans simulate",
                                 description="noisy pulse-level run of a schedule JSON")
    ap.add_argument("schedule")
    ap.add_argument("-d", "--device", required=True)
    ap.add_argument("-o", "--output", help="write the result JSON here instead of stdout")
    ap.add_argument("--dt", type=float, default=None, help="integration step in ns")
    args = ap.parse_args(argv)
    try:
        dev = device_mod.load_device(args.device)
        with open(args.schedule, "r", encoding="utf-8") as fh:
            schedule = pulse.schedule_from_json(fh.read())
        result = pulse.simulate_schedule(schedule, dev, dt_ns=args.dt)
    except (QasmTransError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DEVICE_ERROR
    text = json.dumps(result, indent=2) + "\n"
    if args.output:
        _atomic_write(args.output, text)
    else:
        sys.stdout.write(text)
    return 0


def _run_verify(argv: list[str]) -> int:
    ap = argparse.ArgumentParser(prog="qasmtrans verify",
                                 description="check two circuits for equivalence")
    ap.add_argument("circuits", nargs=2)
    ap.add_argument("--perm", help="comma-separated qubit permutation applied to the second circuit")
    ap.add_argument("--tol", type=float, default=1e-8)
    args = ap.parse_args(argv)
    try:
        c1 = qasm.parse_file(args.circuits[0])
        c2 = qasm.parse_file(args.circuits[1])
        perm = [int(x) for x in args.perm.split(",")] if args.perm else None
        ok, dev_val = oracle.equivalent(c1, c2, layout_perm=perm, tol=args.tol)
    except QasmTransError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return PARSE_ERROR
    print(f"{'equivalent' if ok else 'NOT equivalent'} (max deviation {dev_val:.3e})")
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="qasmtrans",
        description="OpenQASM 2.0 transpiler with pulse-schedule generation")
    ap.add_argument("-i", "--input", action="append", default=[],
                    help="input QASM file (repeatable)")
    ap.add_argument("-d", "--device", help="device JSON file")
    ap.add_argument("-b", "--backend",
                    help="basis: ibmq | rigetti | ionq | quantinuum | rigetti_pulse")
    ap.add_argument("-o", "--output", help="output QASM path")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--noise-adaptive", action="store_true",
                    help="rank embeddings by mean critical-path error after routing")
    ap.add_argument("--space-share", nargs="+", metavar="QASM",
                    help="partition the device and run these circuits concurrently")
    ap.add_argument("--pulse", metavar="JSON", help="emit a pulse schedule")
    ap.add_argument("--constrain-k", type=int,
                    help="route inside a connected partial graph of this size")
    ap.add_argument("--priority", help="comma-separated qubit priority order, highest first")
    ap.add_argument("--stats", action="store_true", help="print circuit statistics")
    ap.add_argument("--verify", action="store_true",
                    help="oracle-check the output against the input (small circuits)")
    ap.add_argument("--keep-swaps", action="store_true",
                    help="emit swap gates instead of expanding to 3 CX")
    ap.add_argument("--refine-layout", action="store_true",
                    help="3 forward/backward initial-layout refinement rounds")
    ap.add_argument("--extended-set-size", type=int, default=20,
                    help="lookahead window for the routing heuristic")
    ap.add_argument("--decay-increment", type=float, default=0.001)
    ap.add_argument("--decay-reset", type=int, default=5,
                    help="reset the decay factors every N inserted SWAPs")
    ap.add_argument("--placement-limit", type=int, default=10000)
    return ap


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and argv[0] == "verify":
        return _run_verify(argv[1:])
    if argv and argv[0] == "simulate":
        return _run_simulate(argv[1:])
    ap = build_parser()
    args = ap.parse_args(argv)
    inputs = list(args.input)
    if args.space_share:
        inputs = list(args.space_share)
    if not inputs:
        ap.error("no input circuits (-i or --space-share)")
    cfg = JobConfig(
        inputs=inputs,
        device_path=args.device,
        backend=args.backend,
        output=args.output,
        seed=args.seed,
        noise_adaptive=args.noise_adaptive,
        space_share=bool(args.space_share),
        pulse_out=args.pulse,
        constrain_k=args.constrain_k,
        priority=[int(x) for x in args.priority.split(",")] if args.priority else None,
        stats=args.stats,
        verify=args.verify,
        expand_swaps=not args.keep_swaps,
        refinement_rounds=3 if args.refine_layout else 0,
        extended_set_size=args.extended_set_size,
        decay_increment=args.decay_increment,
        decay_reset_interval=args.decay_reset,
        placement_limit=args.placement_limit,
    )
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
