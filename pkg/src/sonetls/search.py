"""Tabu search (BTS), DMN, DMN2 and the outer restart driver."""
from __future__ import annotations

import logging
import random
import time
from collections import deque
from dataclasses import asdict, dataclass, field, replace
from typing import Any

import numpy as np

from .construct import start_all_in_one, start_klb_random, start_random
from .instance import Instance
from .model import (Solution, certified_bound, lower_bound, num_items, proven_infeasible)
from .neighborhood import (apply_move, best_move, current_value, delta_evaluate, relocate,
                           relocate_targets)
from .objective import ObjectiveSpec

log = logging.getLogger(__name__)

ALGORITHMS = ("bts", "dmn", "dmn2")
STARTS = ("all_in_one", "klb_random", "random")
DEFAULT_MAX_NONIMPROVING = 50
DEFAULT_TIME_LIMIT = 300.0


@dataclass(frozen=True)
class SearchConfig:
    algorithm: str = "dmn2"
    objective: ObjectiveSpec = field(default_factory=ObjectiveSpec)
    tenure: int | None = None  # None: max(7, item count)
    max_nonimproving: int = DEFAULT_MAX_NONIMPROVING
    time_limit: float = DEFAULT_TIME_LIMIT
    seed: int = 0
    start: str = "all_in_one"
    max_iterations: int | None = None
    stall_limit: int | None = None  # stop after this many iterations without a new best

    def __post_init__(self) -> None:
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"algorithm must be one of {ALGORITHMS}, got {self.algorithm!r}")
        if self.start not in STARTS:
            raise ValueError(f"start must be one of {STARTS}, got {self.start!r}")
        if self.tenure is not None and self.tenure < 0:
            raise ValueError("tenure must be >= 0")
        if self.max_nonimproving < 1:
            raise ValueError("max_nonimproving must be >= 1")
        if not self.time_limit > 0:
            raise ValueError("time_limit must be > 0")

    def tenure_for(self, items: int) -> int:
        return self.tenure if self.tenure is not None else max(7, items)

    def echo(self) -> dict[str, Any]:
        out = asdict(self)
        out["objective"] = self.objective.kind
        out["alpha"] = self.objective.alpha
        out["beta"] = self.objective.beta
        return out


class TabuList:
    """FIFO of (item, ring) attributes with an ``items x slots`` lookup matrix."""

    def __init__(self, tenure: int, items: int, slots: int):
        self.tenure = tenure
        self.entries: deque[tuple[int, int]] = deque()
        self.matrix = np.zeros((items, slots), dtype=np.int64)

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, attr: tuple[int, int]) -> bool:
        return bool(self.matrix[attr])

    def push(self, item: int, ring: int) -> None:
        if self.tenure == 0:
            return
        if len(self.entries) == self.tenure:
            self.matrix[self.entries.popleft()] -= 1
        self.entries.append((item, ring))
        self.matrix[item, ring] += 1

    def clear(self) -> None:
        self.entries.clear()
        self.matrix[:] = 0


@dataclass
class RunResult:
    best: int | None  # z0 of the reported solution
    best_objective: float
    feasible: bool
    lower_bound: int
    iterations: int
    iteration_of_best: int
    time_to_best: float
    wall_time: float
    seed: int
    config: dict[str, Any]
    status: str  # optimal | high_quality | feasible | infeasible | timeout
    stop_reason: str = ""
    diversifications: int = 0
    restarts: int = 0
    history: list[tuple[int, float]] = field(default_factory=list, repr=False)
    solution: Solution | None = field(default=None, repr=False)

    def signature(self) -> tuple:
        """Fields that must repeat exactly across runs with the same seed."""
        return (self.best, self.best_objective, self.feasible, self.iterations,
                self.iteration_of_best, self.status)


def classify(feasible: bool, z0: int | None, lb: int, infeasible_proven: bool) -> str:
    if feasible:
        if z0 == lb:
            return "optimal"
        if z0 == lb + 1:
            return "high_quality"
        return "feasible"
    return "infeasible" if infeasible_proven else "timeout"


class _Incumbents:
    """Best feasible solution by z0 and best solution by objective, across runs."""

    def __init__(self, t0: float):
        self.t0 = t0
        self.feasible: tuple[int, float, Solution, int, float] | None = None
        self.by_value: tuple[float, Solution, int, float] | None = None

    def offer(self, sol: Solution, value: float, feasible: bool, iteration: int) -> None:
        if feasible and (self.feasible is None or sol.z0 < self.feasible[0]):
            self.feasible = (sol.z0, value, sol.copy(), iteration, time.perf_counter() - self.t0)
        if self.feasible is None and (self.by_value is None or value < self.by_value[0]):
            self.by_value = (value, sol.copy(), iteration, time.perf_counter() - self.t0)

    @property
    def feasible_z0(self) -> int | None:
        return self.feasible[0] if self.feasible else None


@dataclass
class _Run:
    inst: Instance
    problem: str
    cfg: SearchConfig
    rng: random.Random
    deadline: float
    incumbents: _Incumbents
    stop_at: int
    iterations: int = 0
    diversifications: int = 0
    history: list = field(default_factory=list)

    def out_of_budget(self) -> bool:
        if time.perf_counter() >= self.deadline:
            return True
        return self.cfg.max_iterations is not None and self.iterations >= self.cfg.max_iterations

    def at_bound(self) -> bool:
        z0 = self.incumbents.feasible_z0
        return z0 is not None and z0 <= self.stop_at


def make_start(inst: Instance, problem: str, cfg: SearchConfig) -> Solution:
    if cfg.start == "all_in_one" or num_items(inst, problem) == 0:
        return start_all_in_one(inst, problem)
    if cfg.start == "random":
        return start_random(inst, problem, cfg.seed)
    if inst.total_demand == 0:
        return start_all_in_one(inst, problem)
    return start_klb_random(inst, cfg.seed, problem)


# -- diversification --------------------------------------------------------

def empty_ring(sol: Solution, spec: ObjectiveSpec, rng: random.Random) -> int | None:
    """Empty a random non-empty ring, sending each item to the best other non-empty ring.

    Capacity is not enforced; the objective alone picks the target. Returns
    the emptied ring, or ``None`` when there is no other ring to move into.
    """
    rings = sol.nonempty_rings()
    if len(rings) < 2:
        return None
    p = rng.choice(rings)
    for item in sol.items_in(p):
        feas = sol.feasible
        best = None
        for r in sol.nonempty_rings():
            if r == p:
                continue
            value, _ = delta_evaluate(sol, relocate(item, p, r), spec, feas)
            if best is None or value < best[0]:
                best = (value, r)
        sol.relocate(item, best[1])
    return p


def random_restart(sol: Solution, rng: random.Random) -> None:
    slots = sol.num_slots
    for item in range(sol.num_items):
        sol.relocate(item, rng.randrange(slots))


def random_moves(sol: Solution, rng: random.Random) -> int:
    """Apply ``m ~ U[1, ring count]`` random relocations; returns ``m``."""
    m = rng.randint(1, max(1, sol.ring_count))
    for _ in range(m):
        item = rng.randrange(sol.num_items)
        targets = relocate_targets(sol, item)
        if targets:
            sol.relocate(item, rng.choice(targets))
    return m


def diversify(run: _Run, sol: Solution) -> int:
    """Apply one diversification step in place; returns which one (1, 2 or 3)."""
    choice = 1 if run.cfg.algorithm == "dmn" else run.rng.randint(1, 3)
    if choice == 1:
        empty_ring(sol, run.cfg.objective, run.rng)
    elif choice == 2:
        random_restart(sol, run.rng)
    else:
        random_moves(sol, run.rng)
    run.diversifications += 1
    return choice


# -- main loop --------------------------------------------------------------

def _local_search(run: _Run, sol: Solution) -> str:
    """Tabu search from ``sol`` (modified in place) until a stop condition; returns it."""
    cfg = run.cfg
    spec = cfg.objective
    tabu = TabuList(cfg.tenure_for(sol.num_items), sol.num_items, sol.num_slots)
    cur_feas = sol.feasible
    cur_val = current_value(sol, spec)
    best_val = cur_val
    run.incumbents.offer(sol, cur_val, cur_feas, run.iterations)
    run.history.append((run.iterations, best_val))
    nonimproving = stall = 0
    while True:
        if run.at_bound():
            return "lower_bound"
        if run.out_of_budget():
            return "budget"
        if cfg.stall_limit is not None and stall >= cfg.stall_limit:
            return "stall"
        move = best_move(sol, spec, tabu.matrix, best_val, cur_feas)
        if move is None:
            return "empty_neighborhood"
        apply_move(sol, move)
        run.iterations += 1
        for attr in move.attributes():
            tabu.push(*attr)
        cur_val, cur_feas = move.value, move.candidate_feasible
        if cur_val < best_val:
            best_val = cur_val
            nonimproving = stall = 0
            run.history.append((run.iterations, best_val))
        else:
            nonimproving += 1
            stall += 1
        run.incumbents.offer(sol, cur_val, cur_feas, run.iterations)
        if cfg.algorithm != "bts" and nonimproving >= cfg.max_nonimproving:
            nonimproving = 0
            diversify(run, sol)
            cur_feas = sol.feasible
            cur_val = current_value(sol, spec)
            if cur_val < best_val:
                best_val = cur_val
                run.history.append((run.iterations, best_val))
            run.incumbents.offer(sol, cur_val, cur_feas, run.iterations)


def _result(run: _Run, t0: float, stop_reason: str, restarts: int = 0) -> RunResult:
    lb = lower_bound(run.inst, run.problem)
    proven = proven_infeasible(run.inst, run.problem)
    inc = run.incumbents
    if inc.feasible is not None:
        z0, value, sol, it, t_best = inc.feasible
        feasible = True
    else:
        value, sol, it, t_best = inc.by_value
        z0, feasible = sol.z0, False
    return RunResult(
        best=int(z0), best_objective=float(value), feasible=feasible, lower_bound=lb,
        iterations=run.iterations, iteration_of_best=it, time_to_best=t_best,
        wall_time=time.perf_counter() - t0, seed=run.cfg.seed, config=run.cfg.echo(),
        status=classify(feasible, z0, lb, proven), stop_reason=stop_reason,
        diversifications=run.diversifications, restarts=restarts, history=run.history,
        solution=sol)


def _new_run(inst: Instance, problem: str, cfg: SearchConfig, t0: float) -> _Run:
    stop_at = max(lower_bound(inst, problem), certified_bound(inst, problem))
    return _Run(inst, problem, cfg, random.Random(cfg.seed), t0 + cfg.time_limit,
                _Incumbents(t0), stop_at)


def run_search(inst: Instance, problem: str, cfg: SearchConfig,
               initial: Solution | None = None) -> RunResult:
    """One BTS/DMN/DMN2 run as configured (the algorithm is ``cfg.algorithm``).

    Stops at the time limit, at ``max_iterations``, or as soon as the best
    feasible solution reaches a proven lower bound.
    """
    t0 = time.perf_counter()
    run = _new_run(inst, problem, cfg, t0)
    sol = initial.copy() if initial is not None else make_start(inst, problem, cfg)
    if proven_infeasible(inst, problem):
        run.incumbents.offer(sol, current_value(sol, cfg.objective), sol.feasible, 0)
        return _result(run, t0, "proven_infeasible")
    reason = _local_search(run, sol)
    log.debug("%s %s on %s: stop=%s iterations=%d", cfg.algorithm, cfg.objective.kind,
              inst.id, reason, run.iterations)
    return _result(run, t0, reason)


def tabu_search(inst: Instance, problem: str, cfg: SearchConfig, initial=None) -> RunResult:
    return run_search(inst, problem, _with(cfg, algorithm="bts"), initial)


def dmn(inst: Instance, problem: str, cfg: SearchConfig, initial=None) -> RunResult:
    return run_search(inst, problem, _with(cfg, algorithm="dmn"), initial)


def dmn2(inst: Instance, problem: str, cfg: SearchConfig, initial=None) -> RunResult:
    return run_search(inst, problem, _with(cfg, algorithm="dmn2"), initial)


def _with(cfg: SearchConfig, **changes) -> SearchConfig:
    return replace(cfg, **changes)


def restart_driver(inst: Instance, problem: str, cfg: SearchConfig,
                   initial: Solution | None = None) -> RunResult:
    """Repeat the configured search, emptying a random ring of the best feasible
    solution between runs, until the lower bound or the time limit is reached.

    Inner runs end after ``stall_limit`` non-improving iterations (default
    ``10 * max_nonimproving``) so that a plain tabu search hands control back.
    """
    if cfg.stall_limit is None:
        cfg = _with(cfg, stall_limit=10 * cfg.max_nonimproving)
    t0 = time.perf_counter()
    run = _new_run(inst, problem, cfg, t0)
    sol = initial.copy() if initial is not None else make_start(inst, problem, cfg)
    if proven_infeasible(inst, problem):
        run.incumbents.offer(sol, current_value(sol, cfg.objective), sol.feasible, 0)
        return _result(run, t0, "proven_infeasible")
    restarts = 0
    while True:
        reason = _local_search(run, sol)
        if reason != "stall" and reason != "empty_neighborhood":
            break
        if run.incumbents.feasible is not None:
            sol = run.incumbents.feasible[2].copy()
            rings = sol.nonempty_rings()
            if len(rings) < 2:
                break
            p = run.rng.choice(rings)
            others = [r for r in rings if r != p]
            for item in sol.items_in(p):
                sol.relocate(item, run.rng.choice(others))
        elif reason == "empty_neighborhood":
            break
        restarts += 1
    return _result(run, t0, reason, restarts)


def solve(inst: Instance, problem: str, cfg: SearchConfig, restart: bool = False,
          initial: Solution | None = None) -> RunResult:
    return (restart_driver if restart else run_search)(inst, problem, cfg, initial)
