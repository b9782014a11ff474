"""Batch runs over an instance set, CSV rows and the three-band summary."""
from __future__ import annotations

import csv
import io
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from typing import Iterable, Sequence

from .construct import ConstructionError, srap_cut_based, srap_edge_based, srap_node_based
from .instance import Instance
from .model import SrapSolution, lower_bound, proven_infeasible, srap_lower_bound
from .search import SearchConfig, classify, solve

CSV_FIELDS = (
    "instance", "problem", "algo", "objective", "alpha", "beta", "seed", "start", "tenure",
    "max_nonimproving", "time_limit", "max_iterations", "restart", "best", "best_objective",
    "lower_bound", "feasible", "status", "iterations", "iteration_of_best", "time_to_best_ms",
    "wall_ms", "stop_reason", "diversifications", "restarts", "error",
)
TIMING_FIELDS = ("time_to_best_ms", "wall_ms")
BANDS = ("optimal", "high_quality", "feasible", "infeasible")
GREEDY = "greedy"


def node_based_protocol(inst: Instance, seed: int, runs: int = 10) -> tuple[SrapSolution | None, list[int]]:
    """Edge/cut-based first, then ``runs`` node-based passes decrementing k after each success.

    Returns the best feasible solution found (or ``None``) and the k tried per run.
    """
    rng = random.Random(seed)
    best: SrapSolution | None = None
    for build in (srap_edge_based, srap_cut_based):
        try:
            sol = build(inst)
        except ConstructionError:
            continue
        if best is None or sol.z0 < best.z0:
            best = sol
    if inst.n == 0:
        return best, []
    if best is not None:
        k = best.z0
    else:
        k = rng.randint(max(1, min(srap_lower_bound(inst), inst.n)), inst.n)
    tried = []
    for _ in range(runs):
        if k < 1:
            break
        tried.append(k)
        sol = srap_node_based(inst, k, rng.randrange(2**31))
        if sol.feasible:
            if best is None or sol.z0 < best.z0:
                best = sol
            k -= 1
    return best, tried


def _row(inst: Instance, problem: str, algo: str, cfg: SearchConfig, restart: bool) -> dict:
    row = {
        "instance": inst.id, "problem": problem, "algo": algo,
        "objective": cfg.objective.kind if algo != GREEDY else "-",
        "alpha": cfg.objective.alpha, "beta": cfg.objective.beta, "seed": cfg.seed,
        "start": cfg.start, "tenure": cfg.tenure if cfg.tenure is not None else "",
        "max_nonimproving": cfg.max_nonimproving, "time_limit": cfg.time_limit,
        "max_iterations": cfg.max_iterations if cfg.max_iterations is not None else "",
        "restart": int(restart), "error": "",
    }
    try:
        if algo == GREEDY:
            if problem != "srap":
                raise ValueError("the greedy preset is SRAP-only")
            sol, tried = node_based_protocol(inst, cfg.seed)
            lb = lower_bound(inst, problem)
            feasible = sol is not None
            z0 = sol.z0 if sol is not None else ""
            row.update(best=z0, best_objective=z0, lower_bound=lb, feasible=int(feasible),
                       status=classify(feasible, sol.z0 if sol else None, lb,
                                       proven_infeasible(inst, problem)),
                       iterations=len(tried), iteration_of_best="", time_to_best_ms="",
                       wall_ms="", stop_reason="protocol", diversifications=0, restarts=0)
        else:
            res = solve(inst, problem, replace(cfg, algorithm=algo), restart=restart)
            row.update(best=res.best, best_objective=res.best_objective,
                       lower_bound=res.lower_bound, feasible=int(res.feasible),
                       status=res.status, iterations=res.iterations,
                       iteration_of_best=res.iteration_of_best,
                       time_to_best_ms=round(res.time_to_best * 1000, 3),
                       wall_ms=round(res.wall_time * 1000, 3), stop_reason=res.stop_reason,
                       diversifications=res.diversifications, restarts=res.restarts)
    except Exception as exc:  # recorded per row, never aborts the batch
        row.update({k: "" for k in CSV_FIELDS if k not in row})
        row.update(status="error", feasible=0, error=f"{type(exc).__name__}: {exc}")
    return row


def run_grid(instances: Sequence[Instance], problem: str, algos: Iterable[str],
             objectives: Iterable[str], seeds: Iterable[int], base: SearchConfig,
             restart: bool = False, workers: int = 1) -> list[dict]:
    """One row per (instance, algorithm, objective, seed), sorted deterministically."""
    jobs = []
    for inst in instances:
        for algo in algos:
            objs = ["-"] if algo == GREEDY else list(objectives)
            for obj in objs:
                for seed in seeds:
                    spec = base.objective if obj == "-" else replace(base.objective, kind=obj)
                    jobs.append((inst, algo, replace(base, objective=spec, seed=seed)))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda j: _row(j[0], problem, j[1], j[2], restart), jobs))
    else:
        rows = [_row(inst, problem, algo, cfg, restart) for inst, algo, cfg in jobs]
    rows.sort(key=lambda r: (r["instance"], r["algo"], r["objective"], int(r["seed"])))
    return rows


def band(row: dict) -> str:
    status = row["status"]
    return status if status in BANDS[:3] else "infeasible"


def summarize(rows: Sequence[dict]) -> dict:
    """Per (algo, objective): counts of rows in each band; bands partition the rows."""
    out: dict[str, dict] = {}
    for row in rows:
        key = f"{row['algo']}/{row['objective']}"
        entry = out.setdefault(key, {"algo": row["algo"], "objective": row["objective"],
                                     "rows": 0, **{b: 0 for b in BANDS}})
        entry["rows"] += 1
        entry[band(row)] += 1
    return dict(sorted(out.items()))


def rows_to_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: row.get(k, "") for k in CSV_FIELDS})
    return buf.getvalue()

