"""``quadra`` command line: generate, reduce, analyze, circuit, verify, sweep, bench."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any

from . import oracle
from .multigraph import build_graph, export_dot, graph_stats, has_multi_edges
from .pbf import Pbf, degree, density_profile
from .qaoa import CSV_HEADER, compile_md, compile_rmd, csv_row, decompose, map_to_gates, pubo_to_ising, to_text
from .reduce import ReductionResult, SelectionStrategy, quadratize, replay
from .sched import SchedulingInstance, build_full_pubo, generate_instance
from .sweep import BENCH_COLUMNS, SweepConfig, bench, parse_size, run_sweep, to_csv

log = logging.getLogger("quadra")

PHASE_QUBIT_LIMIT = 20


class ValidationError(Exception):
    pass


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text)
    except OSError as exc:
        raise ValidationError(f"cannot write {out}: {exc}") from exc


def load_problem(path: str) -> tuple[Pbf, SchedulingInstance | None]:
    """Read a polynomial or a scheduling instance (which is expanded to its PUBO)."""
    try:
        data = json.loads(Path(path).read_text() if path != "-" else sys.stdin.read())
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc
    try:
        if "num_jobs" in data:
            inst = SchedulingInstance.from_dict(data)
            return build_full_pubo(inst), inst
        if "terms" in data:
            return Pbf.from_dict(data), None
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed input {path}: {exc}") from exc
    raise ValidationError(f"{path} is neither a polynomial nor a scheduling instance")


def cmd_generate(args: argparse.Namespace) -> int:
    inst = generate_instance(args.N, args.M, args.seed)
    _emit(inst.to_json(indent=2) + "\n", args.out)
    return 0


def cmd_reduce(args: argparse.Namespace) -> int:
    f, _ = load_problem(args.input)
    result = quadratize(f, args.strategy, args.penalty_weight)
    if degree(result.reduced) > 2:
        raise ValidationError("reduced polynomial still has degree > 2")
    if not result.steps:
        log.warning("input already has degree <= 2; nothing to reduce")
    _emit(result.to_json(indent=2) + "\n", args.out)
    return 0


def cmd_analyze(args: argparse.Namespace) -> int:
    f, _ = load_problem(args.input)
    g = build_graph(f)
    if args.format == "dot":
        _emit(export_dot(g), args.out)
        return 0
    dens = density_profile(f)
    report = {
        "num_vars": f.num_vars,
        "num_terms": len(f),
        "degree": degree(f),
        "densities": list(dens.per_degree),
        "term_counts": list(dens.term_counts),
        "has_multi_edges": has_multi_edges(g),
        "graph_stats": graph_stats(g).to_dict(),
        "graph": g.to_dict(),
    }
    _emit(json.dumps(report, indent=2) + "\n", args.out)
    return 0


def cmd_circuit(args: argparse.Namespace) -> int:
    f, _ = load_problem(args.input)
    introduced, reduce_ms, strategy = 0, 0.0, None
    if args.path == "md":
        circuit, m = compile_md(f, args.gamma)
    else:
        result, circuit, m = compile_rmd(f, args.strategy, args.gamma)
        introduced, reduce_ms, strategy = result.introduced_vars, result.elapsed_ms, args.strategy
    if m.higher_order_gates:
        raise ValidationError("decomposed circuit still contains multi-qubit rotations")
    extra: dict[str, Any] = {"n": f.num_vars, "path": args.path,
                             "strategy": strategy.value if strategy else None,
                             "introduced_vars": introduced, "reduce_ms": round(reduce_ms, 3)}
    metrics_json = json.dumps({**m.to_dict(), **extra}, indent=2) + "\n"
    row = CSV_HEADER + "\n" + csv_row(f.num_vars, m, strategy, introduced, reduce_ms) + "\n"
    if args.format == "qasm":
        _emit(to_text(circuit), args.out)
    elif args.format == "json":
        _emit(metrics_json, args.out)
    else:
        _emit(row, args.out)
    if args.metrics_out:
        _emit(metrics_json if args.metrics_out.endswith(".json") else row, args.metrics_out)
    return 0


def _phase_check(name: str, f: Pbf, gamma: float, report: oracle.VerificationReport) -> None:
    if f.num_vars > PHASE_QUBIT_LIMIT:
        report.add(oracle.CheckResult(name, True, skipped=True,
                                      detail=f"{f.num_vars} qubits > {PHASE_QUBIT_LIMIT}"))
        return
    ising = pubo_to_ising(f)
    logical = map_to_gates(ising, gamma)
    circuit = decompose(logical)
    bad = oracle.phase_counterexample(f, circuit, gamma, ising.constant)
    if bad is None and not oracle.same_action(logical, circuit):
        bad = ([], "decomposition changed the circuit action")
    report.add(oracle.CheckResult(name, bad is None, bad[0] if bad else None, bad[1] if bad else ""))


def _quad_check(name: str, f: Pbf, reduced: Pbf, report: oracle.VerificationReport) -> None:
    if reduced.num_vars > oracle.MAX_VARS:
        report.add(oracle.CheckResult(name, True, skipped=True,
                                      detail=f"{reduced.num_vars} variables > {oracle.MAX_VARS}"))
        return
    bad = oracle.quadratisation_counterexample(f, reduced)
    detail = "" if bad is None else f"f(x) = {bad[1]:.12g}, min_y f'(x, y) = {bad[2]:.12g}"
    report.add(oracle.CheckResult(name, bad is None, bad[0] if bad else None, detail))


def run_verify(f: Pbf, strategies: list[SelectionStrategy], gamma: float,
               trace: ReductionResult | None = None) -> oracle.VerificationReport:
    report = oracle.VerificationReport()
    _phase_check("md_phase", f, gamma, report)
    if trace is not None:
        rebuilt = list(replay(f, trace.steps, trace.penalty_weight))[-1]
        same = rebuilt == trace.reduced
        report.add(oracle.CheckResult("trace_replay", same, None,
                                      "" if same else "replayed steps do not give the stored polynomial"))
        report.add(oracle.CheckResult("trace_degree", degree(rebuilt) <= 2,
                                      None, f"degree {degree(rebuilt)}"))
        _quad_check("trace_quadratisation", f, rebuilt, report)
        return report
    for strategy in strategies:
        result = quadratize(f, strategy)
        _quad_check(f"{strategy.value}_quadratisation", f, result.reduced, report)
        _phase_check(f"{strategy.value}_rmd_phase", result.reduced, gamma, report)
    return report


def cmd_verify(args: argparse.Namespace) -> int:
    f, _ = load_problem(args.input)
    trace = None
    if args.trace:
        try:
            trace = ReductionResult.from_dict(json.loads(Path(args.trace).read_text()))
        except (OSError, KeyError, ValueError) as exc:
            raise ValidationError(f"cannot read trace {args.trace}: {exc}") from exc
    strategies = [args.strategy] if args.strategy else list(SelectionStrategy)
    report = run_verify(f, strategies, args.gamma, trace)
    _emit(report.to_json(indent=2) + "\n", args.out)
    return 0 if report.passed else 1


def _sweep_config(args: argparse.Namespace) -> SweepConfig:
    if args.config:
        try:
            cfg = SweepConfig.from_dict(json.loads(Path(args.config).read_text()))
        except (OSError, KeyError, ValueError) as exc:
            raise ValidationError(f"bad sweep config {args.config}: {exc}") from exc
        return cfg
    return SweepConfig(
        sizes=[parse_size(s) for s in args.sizes.split(",")],
        strategies=[SelectionStrategy.parse(s) for s in args.strategies.split(",")],
        seeds=[int(s) for s in args.seeds.split(",")],
        gamma=args.gamma,
        repeats=args.repeats,
        output_path=args.out,
    )


def cmd_sweep(args: argparse.Namespace) -> int:
    config = _sweep_config(args)
    rows = run_sweep(config)
    _emit(to_csv(rows), args.out or config.output_path)
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    config = _sweep_config(args)
    rows = bench(config.sizes, config.strategies, config.seeds, config.repeats)
    _emit(to_csv(rows, BENCH_COLUMNS), args.out or config.output_path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quadra", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, *flags: str) -> None:
        p.add_argument("--out", default=None, help="output file (default: stdout)")
        if "strategy" in flags:
            p.add_argument("--strategy", type=SelectionStrategy.parse, default=SelectionStrategy.DENSE,
                           choices=list(SelectionStrategy), metavar="{sparse,medium,dense}")
        if "gamma" in flags:
            p.add_argument("--gamma", type=float, default=1.0)

    p = sub.add_parser("generate", help="write a scheduling instance")
    p.add_argument("-N", type=int, required=True, help="number of jobs")
    p.add_argument("-M", type=int, required=True, help="number of machines")
    p.add_argument("--seed", type=int, default=0)
    common(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("reduce", help="quadratise a polynomial or instance")
    p.add_argument("input")
    p.add_argument("--penalty-weight", type=float, default=None)
    common(p, "strategy")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("analyze", help="densities, graph statistics, DOT export")
    p.add_argument("input")
    p.add_argument("--format", choices=["json", "dot"], default="json")
    common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("circuit", help="compile the QAOA problem layer")
    p.add_argument("input")
    p.add_argument("--path", choices=["md", "rmd"], default="md")
    p.add_argument("--format", choices=["qasm", "json", "csv"], default="qasm")
    p.add_argument("--metrics-out", default=None, help="also write metrics (.json or .csv)")
    common(p, "strategy", "gamma")
    p.set_defaults(func=cmd_circuit)

    p = sub.add_parser("verify", help="exhaustive quadratisation and phase checks")
    p.add_argument("input")
    p.add_argument("--trace", default=None, help="reduction trace JSON to check instead of reducing")
    p.add_argument("--strategy", type=SelectionStrategy.parse, default=None,
                   choices=list(SelectionStrategy), metavar="{sparse,medium,dense}")
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_verify)

    for name, func, helptext in (("sweep", cmd_sweep, "full pipeline metrics as CSV"),
                                 ("bench", cmd_bench, "reduction timing as CSV")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", default=None, help="JSON sweep config")
        p.add_argument("--sizes", default="3x2,4x2,4x3,5x3", help="comma list of NxM or n")
        p.add_argument("--strategies", default="sparse,medium,dense")
        p.add_argument("--seeds", default="0")
        p.add_argument("--seed", type=int, default=None, help="shorthand for a single seed")
        p.add_argument("--repeats", type=int, default=3 if name == "sweep" else 5)
        common(p, "gamma")
        p.set_defaults(func=func)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    if getattr(args, "seed", None) is not None and hasattr(args, "seeds"):
        args.seeds = str(args.seed)
    try:
        return args.func(args)
    except ValidationError as exc:
        log.error("%s", exc)
        return 1
    except (ValueError, IndexError, oracle.CapacityError) as exc:
        log.error("%s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
