"""Command-line front end: gen / solve / oracle / sweep / trace-example.

Exit codes: 0 success, 1 usage error, 2 validation or run error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from udcop import engine, experiments, oracle, presets
from udcop.generator import GenConfig, generate
from udcop.model import save_instance, load_instance
from udcop.solvers import SOLVER_KINDS


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


class CommandError(Exception):
    """Run or validation failure surfaced as exit code 2."""


def _build_parser() -> _Parser:
    parser = _Parser(prog="udcop",
                     description="Privacy-aware distributed constraint "
                                 "optimization toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a meeting-scheduling instance")
    gen.add_argument("--agents", type=int, required=True)
    gen.add_argument("--values", type=int, required=True)
    gen.add_argument("--density", type=float, required=True)
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--cost-max", type=int, default=9)
    gen.add_argument("--privacy-max", type=int, default=9)
    gen.add_argument("--kind", choices=("udcop", "udcoppc"), default="udcop")
    gen.add_argument("--out", required=True)

    solve = sub.add_parser("solve", help="run one solver on an instance file")
    solve.add_argument("--in", dest="instance", required=True)
    solve.add_argument("--algo", choices=SOLVER_KINDS, required=True)
    solve.add_argument("--seed", type=int, default=0)
    solve.add_argument("--rounds", type=int, default=100)
    solve.add_argument("--p", type=float, default=0.6,
                       help="activation probability for dsa")
    solve.add_argument("--divisor", choices=("revealed", "domain"),
                       default="revealed")
    solve.add_argument("--penalty", type=float, default=None,
                       help="finite disagreement penalty W for local search")
    solve.add_argument("--pure-alg2", action="store_true",
                       help="drop the dsau conflict guard (estimate-only moves)")
    solve.add_argument("--trace", default=None,
                       help="write the per-round trace to this file")

    orc = sub.add_parser("oracle", help="exact optimum of an instance file")
    orc.add_argument("--in", dest="instance", required=True)

    sweep = sub.add_parser("sweep", help="run the density/algorithm sweep")
    sweep.add_argument("--densities", default="0.1,0.2,0.3,0.4,0.5")
    sweep.add_argument("--instances", type=int, default=50)
    sweep.add_argument("--algos", default=",".join(experiments.DEFAULT_ALGORITHMS))
    sweep.add_argument("--agents", type=int, default=10)
    sweep.add_argument("--values", type=int, default=10)
    sweep.add_argument("--seed", type=int, default=experiments.DEFAULT_MASTER_SEED)
    sweep.add_argument("--rounds", type=int, default=100)
    sweep.add_argument("--p", type=float,
                       default=experiments.DEFAULT_SWEEP_SOLVER_PARAMS.p)
    sweep.add_argument("--penalty", type=float,
                       default=experiments.DEFAULT_SWEEP_SOLVER_PARAMS.penalty)
    sweep.add_argument("--out-dir", required=True)

    trace = sub.add_parser("trace-example",
                           help="print a golden trace of the bundled "
                                "three-student meeting instance")
    trace.add_argument("variant", choices=("dsau", "molex"))
    return parser


def _load(path: str):
    p = Path(path)
    if not p.exists():
        raise CommandError(f"instance file not found: {path}")
    try:
        return load_instance(p)
    except ValueError as e:
        raise CommandError(f"{path}: {e}") from e


def _cmd_gen(args) -> int:
    try:
        inst = generate(GenConfig(n=args.agents, d=args.values,
                                  density=args.density, seed=args.seed,
                                  cost_max=args.cost_max,
                                  privacy_max=args.privacy_max,
                                  kind=args.kind))
    except ValueError as e:
        raise CommandError(str(e)) from e
    save_instance(inst, args.out)
    print(f"wrote {args.out} (kind={inst.kind}, n={inst.n}, d={inst.d})")
    return 0


def _solver_params(args) -> engine.SolverParams:
    return engine.SolverParams(p=args.p, divisor_mode=args.divisor,
                               penalty=args.penalty, pure_alg2=args.pure_alg2)


def _cmd_solve(args) -> int:
    inst = _load(args.instance)
    try:
        outcome, traces = engine.run(inst, args.algo, _solver_params(args),
                                     seed=args.seed, round_budget=args.rounds)
    except ValueError as e:
        raise CommandError(str(e)) from e
    if args.trace:
        engine.write_trace(traces, args.trace)
    print(f"algorithm: {args.algo}")
    print(f"assignment: {' '.join(str(v) for v in outcome.assignment)}")
    print(f"satisfied: {'true' if outcome.satisfied else 'false'}")
    print(f"rounds: {outcome.rounds}")
    print(f"messages: {outcome.messages}")
    print(f"privacy_loss_per_agent: {outcome.privacy_loss_per_agent:.6g}")
    print(f"solution_quality_per_agent: {outcome.solution_quality_per_agent:.6g}")
    print(f"total_cost_per_agent: {outcome.total_cost_per_agent:.6g}")
    return 0


def _cmd_oracle(args) -> int:
    inst = _load(args.instance)
    try:
        result = oracle.exact_optimum_enum(inst)
    except oracle.SearchSpaceError:
        result = oracle.exact_optimum_dms(inst)
    print(f"assignment: {' '.join(str(v) for v in result.assignment)}")
    print(f"cost: {result.cost:.6g}")
    return 0


def _cmd_sweep(args) -> int:
    try:
        densities = tuple(float(x) for x in args.densities.split(","))
        algos = tuple(args.algos.split(","))
        cfg = experiments.SweepConfig(
            densities=densities, instances_per_cell=args.instances,
            n=args.agents, d=args.values, algorithms=algos,
            solver_params=engine.SolverParams(p=args.p, penalty=args.penalty),
            master_seed=args.seed, round_budget=args.rounds)
        rows = experiments.run_sweep(cfg)
    except (ValueError, RuntimeError) as e:
        raise CommandError(str(e)) from e
    csv_path, summary_path = experiments.write_outputs(rows, args.out_dir)
    print(f"wrote {csv_path} ({len(rows)} rows)")
    print(f"wrote {summary_path}")
    print(experiments.summary_to_text(experiments.aggregate(rows)), end="")
    return 0


def _print_rounds(traces, label: str) -> None:
    print(f"[{label}]")
    for t in traces:
        per_agent = "  ".join(
            f"A{i}: {t.actions[i]} value={t.values[i]} "
            f"est {_g(t.est_current[i])}->{_g(t.est_next[i])} "
            f"cum_privacy={_g(t.cum_privacy[i])}"
            for i in range(len(t.values)))
        print(f"round {t.round}: {per_agent}")


def _g(x: float) -> str:
    return f"{x:.10g}"


def _cmd_trace_example(args) -> int:
    inst = presets.three_student_meeting()
    params = presets.scripted_meeting_params()
    if args.variant == "dsau":
        outcome, traces = engine.run(inst, "dsau", params, seed=0, round_budget=10)
        _print_rounds(traces, "privacy-aware stochastic search")
        print(f"final assignment: ({', '.join(str(v) for v in outcome.assignment)})")
        utils = outcome.per_agent_utilities
        print("final per-agent utilities: " + ", ".join(_g(u) for u in utils))
        return 0

    udcop_outcome, _ = engine.run(inst, "dsau", params, seed=0, round_budget=2)
    outcome, traces = engine.run(inst, "molex", params, seed=0, round_budget=2)
    _print_rounds(traces, "lexicographic (privacy, cost) baseline")
    print(f"achieved values: ({', '.join(str(v) for v in outcome.assignment)})")
    print("cumulative privacy: " +
          ", ".join(_g(p) for p in outcome.per_agent_privacy))
    extra = outcome.per_agent_privacy[1] - udcop_outcome.per_agent_privacy[1]
    print(f"A1 extra privacy loss vs the privacy-aware run: {_g(extra)}")
    return 0


_COMMANDS = {
    "gen": _cmd_gen,
    "solve": _cmd_solve,
    "oracle": _cmd_oracle,
    "sweep": _cmd_sweep,
    "trace-example": _cmd_trace_example,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except CommandError as e:
        print(f"udcop: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
