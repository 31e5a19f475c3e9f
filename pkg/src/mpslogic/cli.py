"""Command-line front end: run, search, verify, heights.

run and search print JSON with sorted keys so output is byte-stable;
heights prints the per-step CSV profile.  Exit codes: 0 success (including
an unsatisfiable search and a skipped verify), 1 unreadable or malformed
circuit file, 2 runtime or numerical failure and verify mismatches.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from itertools import product

import numpy as np

from .circuit import Circuit, ParseError, execute, parse_circuit
from .gates import SvdConfig
from .heights import check_bounds, export_profile
from .oracle import HARD_CAP, oracle_count, oracle_execute
from .search import (
    BranchFailure,
    IntegralityViolation,
    count_solutions,
    search_preimage,
)
from .state import CorruptStateError, evaluate_probability, full_distribution


def _parse_assignment(spec: str) -> dict[int, int]:
    """Parse "bit=value,bit=value"; empty string means no constraint."""
    assignment: dict[int, int] = {}
    spec = spec.strip()
    if not spec:
        return assignment
    for part in spec.split(","):
        part = part.strip()
        try:
            bit_text, value_text = part.split("=")
            bit, value = int(bit_text), int(value_text)
        except ValueError:
            raise ValueError(f"bad assignment {part!r}, expected bit=value") \
                from None
        if value not in (0, 1):
            raise ValueError(f"bit {bit} assigned {value}, must be 0 or 1")
        if bit in assignment:
            raise ValueError(f"bit {bit} assigned twice")
        assignment[bit] = value
    return assignment


def _load(path: str) -> Circuit:
    with open(path, encoding="utf-8") as fh:
        return parse_circuit(fh.read())


def _cfg(args: argparse.Namespace) -> SvdConfig:
    return SvdConfig(rank_tol=args.rank_tol, trunc_max_rank=args.max_rank)


def _emit(report: dict) -> None:
    print(json.dumps(report, sort_keys=True, indent=2))


def _circuit_meta(circuit: Circuit, state) -> dict:
    return {
        "n": circuit.n_declared,
        "n_final": circuit.n_final,
        "n_in": len(circuit.input_bits),
        "n_g": state.gate_count,
    }


def cmd_run(args: argparse.Namespace) -> int:
    circuit = _load(args.circuit)
    cfg = _cfg(args)
    started = time.perf_counter()
    state = execute(circuit, {}, cfg)
    elapsed = time.perf_counter() - started

    report = {
        "circuit": _circuit_meta(circuit, state),
        "peak_bond_dim": state.profile.peak_dim,
        "bounds": check_bounds(state.profile, state.bond_dims()).as_dict(),
        "config": {"rank_tol": cfg.rank_tol, "max_rank": cfg.trunc_max_rank},
    }
    if args.marginal == "all-outputs":
        table = {}
        for values in product((0, 1), repeat=len(circuit.output_bits)):
            constraint = dict(zip(circuit.output_bits, values))
            key = "".join(map(str, values))
            table[key] = evaluate_probability(state, constraint)
        report["marginal"] = {"spec": args.marginal, "all_outputs": table}
    else:
        constraint = _parse_assignment(args.marginal)
        report["marginal"] = {
            "spec": args.marginal,
            "probability": evaluate_probability(state, constraint),
        }
    if not args.no_timing:
        report["wall_time_s"] = elapsed
    _emit(report)
    return 0


def cmd_search(args: argparse.Namespace) -> int:
    circuit = _load(args.circuit)
    cfg = _cfg(args)
    target = _parse_assignment(args.target)
    started = time.perf_counter()
    outcome = search_preimage(circuit, target, cfg)
    elapsed = time.perf_counter() - started

    if outcome.witness is None:
        witness_text = None
        witness_bits = None
    else:
        witness_text = "".join(str(outcome.witness[b])
                               for b in circuit.input_bits)
        witness_bits = {str(b): v for b, v in outcome.witness.items()}
    report = {
        "satisfiable": outcome.satisfiable,
        "witness": witness_text,
        "witness_bits": witness_bits,
        "count": outcome.count,
        "executions": outcome.executions,
        "trace": [
            {"bit": s.bit, "value": s.value, "prob": s.prob,
             "remaining": s.remaining, "threshold": s.threshold,
             "retried": s.retried}
            for s in outcome.trace
        ],
        "config": {"rank_tol": cfg.rank_tol, "max_rank": cfg.trunc_max_rank},
    }
    if not args.no_timing:
        report["wall_time_s"] = elapsed
    _emit(report)
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    circuit = _load(args.circuit)
    cfg = _cfg(args)
    if cfg.trunc_max_rank is not None:
        print("warning: lossy truncation active, nothing to verify against",
              file=sys.stderr)
        _emit({"status": "skipped", "reason": "lossy truncation active"})
        return 0
    width = max(circuit.n_declared, circuit.n_final)
    cap = min(args.oracle_cap, HARD_CAP)
    if width > cap:
        print(f"warning: {width} bits exceeds oracle cap {cap}, skipping",
              file=sys.stderr)
        _emit({"status": "skipped",
               "reason": f"circuit width {width} exceeds oracle cap {cap}"})
        return 0

    state = execute(circuit, {}, cfg)
    mps_probs = full_distribution(state)
    dense = oracle_execute(circuit, {})
    max_abs_diff = float(np.abs(mps_probs - dense.probs).max())
    distribution_ok = max_abs_diff <= 1e-9

    counts_report = {"checked": 0, "ok": True, "mismatches": []}
    if circuit.output_bits and not circuit.has_probabilistic_gates() \
            and len(circuit.input_bits) <= cap:
        m = len(circuit.output_bits)
        if 2 ** m <= 16:
            targets = [dict(zip(circuit.output_bits, values))
                       for values in product((0, 1), repeat=m)]
        else:
            targets = [{b: 0 for b in circuit.output_bits}]
        for target in targets:
            got = count_solutions(circuit, target, cfg)
            want = oracle_count(circuit, target)
            counts_report["checked"] += 1
            if got != want:
                counts_report["ok"] = False
                counts_report["mismatches"].append({
                    "target": {str(b): v for b, v in target.items()},
                    "mps": got, "oracle": want,
                })

    ok = distribution_ok and counts_report["ok"]
    _emit({
        "status": "pass" if ok else "fail",
        "max_abs_diff": max_abs_diff,
        "distribution_ok": distribution_ok,
        "counts": counts_report,
    })
    return 0 if ok else 2


def cmd_heights(args: argparse.Namespace) -> int:
    circuit = _load(args.circuit)
    state = execute(circuit, {}, _cfg(args), log_steps=True)
    sys.stdout.write(export_profile(state.profile))
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mpslogic",
        description="Simulate probabilistic logic circuits on all 2^n inputs "
                    "at once, search preimages, and count solutions exactly.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("circuit", help="circuit file path")
        p.add_argument("--rank-tol", type=float, default=1e-12,
                       help="relative singular-value cutoff (default 1e-12)")
        p.add_argument("--max-rank", type=int, default=None,
                       help="lossy bond rank cap (default off; marks the run "
                            "approximate)")
        p.add_argument("--no-timing", action="store_true",
                       help="omit wall time from output")

    p_run = sub.add_parser("run", help="execute and report marginals")
    common(p_run)
    p_run.add_argument("--marginal", default="",
                       help="\"bit=value,...\" joint marginal, "
                            "\"all-outputs\" for the output register table, "
                            "empty for the normalization")
    p_run.set_defaults(fn=cmd_run)

    p_search = sub.add_parser("search", help="find an input mapped to the "
                                             "target output")
    common(p_search)
    p_search.add_argument("--target", default="",
                          help="\"bit=value,...\" covering the output bits")
    p_search.set_defaults(fn=cmd_search)

    p_verify = sub.add_parser("verify", help="compare against the "
                                             "brute-force oracle")
    common(p_verify)
    p_verify.add_argument("--oracle-cap", type=int, default=12,
                          help="skip when the circuit is wider than this "
                               "(default 12)")
    p_verify.set_defaults(fn=cmd_verify)

    p_heights = sub.add_parser("heights", help="per-step height profile CSV")
    common(p_heights)
    p_heights.set_defaults(fn=cmd_heights)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ParseError as exc:
        for line, message in exc.diagnostics:
            print(f"{args.circuit}:{line}: {message}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (CorruptStateError, IntegralityViolation, BranchFailure,
            ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
