"""Command line: generate | solve | verify | oracle | bench."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import bench, kernels
from .construct import CONSTRUCTORS, ConstructionError, construct
from .instance import (InstanceError, generate_goldschmidt, generate_lee, parse_instance,
                       serialize_instance)
from .model import SolutionError, format_solution, parse_solution, report
from .objective import KINDS, ObjectiveSpec
from .oracle import idp_optimum, srap_optimum
from .search import ALGORITHMS, DEFAULT_MAX_NONIMPROVING, DEFAULT_TIME_LIMIT, SearchConfig, solve

log = logging.getLogger("sonetls")

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE = 0, 1, 2
START_NAMES = {"all": "all_in_one", "klb": "klb_random", "random": "random"}
RECORD_KEYS = ("instance", "problem", "algo", "objective", "alpha", "beta", "seed", "best",
               "lower_bound", "feasible", "status", "iterations", "iteration_of_best",
               "time_to_best_ms", "wall_ms")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read_instance(path: str):
    try:
        return parse_instance(Path(path).read_bytes())
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except InstanceError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _add_search_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--problem", choices=("srap", "idp"), default="srap")
    p.add_argument("--objective", choices=KINDS, default="z5")
    p.add_argument("--alpha", type=float, default=1.0, help="z2 new-ring penalty factor (>= 1)")
    p.add_argument("--beta", type=float, default=2.0, help="z4 infeasible-to-infeasible factor (>= 2)")
    p.add_argument("--tenure", type=int, default=None, help="tabu tenure (default: max(7, items))")
    p.add_argument("--max-nonimproving", type=int, default=DEFAULT_MAX_NONIMPROVING)
    p.add_argument("--time-limit", type=float, default=DEFAULT_TIME_LIMIT, help="seconds")
    p.add_argument("--max-iterations", type=int, default=None)
    p.add_argument("--start", choices=tuple(START_NAMES), default="all")
    p.add_argument("--restart-driver", choices=("on", "off"), default="off")


def _config(args, algo: str, seed: int) -> SearchConfig:
    try:
        return SearchConfig(
            algorithm=algo,
            objective=ObjectiveSpec(args.objective, args.alpha, args.beta),
            tenure=args.tenure, max_nonimproving=args.max_nonimproving,
            time_limit=args.time_limit, seed=seed, start=START_NAMES[args.start],
            max_iterations=args.max_iterations)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# -- subcommands ------------------------------------------------------------

def cmd_generate(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    manifest = []
    for i in range(args.count):
        seed = args.seed + i
        try:
            if args.family == "goldschmidt":
                inst = generate_goldschmidt(args.nodes, args.demand, args.topology,
                                            args.density, seed)
            else:
                if args.edges is None:
                    raise UsageError("--edges is required for --family lee")
                inst = generate_lee(args.nodes, args.edges, seed)
        except InstanceError as exc:
            raise UsageError(str(exc)) from None
        name = f"{inst.id}.txt"
        (out / name).write_text(serialize_instance(inst))
        manifest.append({"id": inst.id, "file": name, "seed": seed, "family": inst.family,
                         "n": inst.n, "m": inst.m, "capacity": inst.capacity,
                         "params": {k: v for k, v in inst.meta.items() if k != "points"}})
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    log.info("wrote %d instances to %s", args.count, out)
    return EXIT_OK


def _warm_start(inst, args):
    if args.constructor is None:
        return None
    try:
        return construct(inst, args.problem, args.constructor, seed=args.seed)
    except ConstructionError as exc:
        log.warning("constructor %s: %s", args.constructor, exc)
        return exc.partial
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_solve(args) -> int:
    inst = _read_instance(args.instance)
    cfg = _config(args, args.algo, args.seed)
    initial = _warm_start(inst, args)
    res = solve(inst, args.problem, cfg, restart=args.restart_driver == "on", initial=initial)
    record = {
        "instance": inst.id, "problem": args.problem, "algo": args.algo,
        "objective": cfg.objective.kind, "alpha": cfg.objective.alpha,
        "beta": cfg.objective.beta, "seed": cfg.seed, "best": res.best,
        "lower_bound": res.lower_bound, "feasible": res.feasible, "status": res.status,
        "iterations": res.iterations, "iteration_of_best": res.iteration_of_best,
        "time_to_best_ms": round(res.time_to_best * 1000, 3),
        "wall_ms": round(res.wall_time * 1000, 3),
    }
    print(json.dumps(record))
    log.info("stop=%s diversifications=%d restarts=%d backend=%s", res.stop_reason,
             res.diversifications, res.restarts, kernels.BACKEND)
    if args.solution_out:
        Path(args.solution_out).write_text(format_solution(res.solution))
    return EXIT_OK if res.feasible else EXIT_INFEASIBLE


def cmd_verify(args) -> int:
    inst = _read_instance(args.instance)
    try:
        sol = parse_solution(Path(args.solution).read_text(), inst)
    except OSError as exc:
        raise UsageError(f"cannot read {args.solution}: {exc.strerror}") from None
    except SolutionError as exc:
        raise UsageError(f"{args.solution}: {exc}") from None
    rep = report(inst, sol)
    print(f"problem {sol.problem}  instance {inst.id}  capacity {inst.capacity}")
    for label, (ring, load) in enumerate(rep.ring_loads.items(), start=1):
        print(f"ring {label}: load {load} violation {rep.violations[ring]}")
    if rep.federal_load is not None:
        print(f"federal: load {rep.federal_load} violation {rep.federal_violation}")
    print(f"z0 {sol.z0}")
    print(f"total violation {rep.total_violation}")
    print("feasible" if rep.feasible else "infeasible")
    return EXIT_OK if rep.feasible else EXIT_INFEASIBLE


def cmd_oracle(args) -> int:
    inst = _read_instance(args.instance)
    try:
        found = srap_optimum(inst) if args.problem == "srap" else idp_optimum(inst)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if found is None:
        print("infeasible")
        return EXIT_INFEASIBLE
    value, witness = found
    print(f"# optimum {value}")
    sys.stdout.write(format_solution(witness))
    return EXIT_OK


def cmd_bench(args) -> int:
    folder = Path(args.instances)
    files = sorted(p for p in folder.glob("*.txt")) if folder.is_dir() else []
    if not files:
        raise UsageError(f"no *.txt instances in {folder}")
    instances = [_read_instance(str(p)) for p in files]
    algos = args.algos.split(",")
    for a in algos:
        if a not in ALGORITHMS + (bench.GREEDY,):
            raise UsageError(f"unknown algorithm {a!r}")
    objectives = args.objectives.split(",")
    for o in objectives:
        if o not in KINDS:
            raise UsageError(f"unknown objective {o!r}")
    seeds = [int(s) for s in args.seeds.split(",")]
    base = _config(args, algos[0] if algos[0] in ALGORITHMS else "dmn2", seeds[0])
    rows = bench.run_grid(instances, args.problem, algos, objectives, seeds, base,
                          restart=args.restart_driver == "on", workers=args.workers)
    Path(args.csv).write_text(bench.rows_to_csv(rows))
    summary = {"rows": len(rows), "configs": bench.summarize(rows)}
    Path(args.summary).write_text(json.dumps(summary, indent=2) + "\n")
    print(json.dumps(summary["configs"]))
    return EXIT_OK


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sonetls", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="write benchmark instances and a manifest")
    g.add_argument("--family", choices=("goldschmidt", "lee"), required=True)
    g.add_argument("--topology", choices=("geometric", "random"), default="random")
    g.add_argument("--demand", choices=("low", "high"), default="low")
    g.add_argument("--density", type=float, default=0.3)
    g.add_argument("--nodes", type=int, required=True)
    g.add_argument("--edges", type=int, default=None)
    g.add_argument("--count", type=int, default=1)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", default="instances")
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("solve", help="run a metaheuristic on one instance")
    s.add_argument("instance")
    s.add_argument("--algo", choices=ALGORITHMS, default="dmn2")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--constructor", default=None,
                   choices=sorted({c for cs in CONSTRUCTORS.values() for c in cs}),
                   help="warm start from a greedy constructor instead of --start")
    s.add_argument("--solution-out", default=None)
    _add_search_args(s)
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="recompute loads of a solution file from scratch")
    v.add_argument("instance")
    v.add_argument("solution")
    v.set_defaults(func=cmd_verify)

    o = sub.add_parser("oracle", help="exact optimum by enumeration (<= 10 items)")
    o.add_argument("instance")
    o.add_argument("--problem", choices=("srap", "idp"), default="srap")
    o.set_defaults(func=cmd_oracle)

    b = sub.add_parser("bench", help="run a grid of configurations over an instance folder")
    b.add_argument("instances")
    b.add_argument("--algos", default="dmn2", help="comma list of bts,dmn,dmn2,greedy")
    b.add_argument("--objectives", default="z5", help="comma list of z1..z5")
    b.add_argument("--seeds", default="0", help="comma list of integer seeds")
    b.add_argument("--workers", type=int, default=1)
    b.add_argument("--csv", default="bench.csv")
    b.add_argument("--summary", default="bench_summary.json")
    _add_search_args(b)
    b.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors and --help, returned rather than raised
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
