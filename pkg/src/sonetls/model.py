"""SRAP and IDP solution state, load reports, and lower bounds.

Both solution classes keep exact integer aggregates that are updated in O(n)
per relocation. :func:`srap_report` and :func:`idp_report` recompute
everything from the bare assignment and are used to cross-check the caches.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .instance import Instance

PROBLEMS = ("srap", "idp")


class SolutionError(ValueError):
    pass


@dataclass(frozen=True)
class LoadReport:
    ring_loads: dict[int, int]
    violations: dict[int, int]
    total_violation: int
    feasible: bool
    federal_load: int | None = None
    federal_violation: int = 0

    @property
    def bn(self) -> int:
        """Highest load among constrained rings (federal ring included for SRAP)."""
        loads = list(self.ring_loads.values())
        if self.federal_load is not None:
            loads.append(self.federal_load)
        return max(loads, default=0)


def _excess(load: int, capacity: int) -> int:
    return load - capacity if load > capacity else 0


class Solution:
    """Common assignment bookkeeping; items are nodes (SRAP) or edges (IDP)."""

    problem: str
    inst: Instance
    assign: np.ndarray
    ring_load: np.ndarray
    ring_size: np.ndarray

    @property
    def num_items(self) -> int:
        return len(self.assign)

    @property
    def num_slots(self) -> int:
        return len(self.ring_size)

    @property
    def capacity(self) -> int:
        return self.inst.capacity

    def ring_of(self, item: int) -> int:
        return int(self.assign[item])

    def nonempty_rings(self) -> list[int]:
        return [int(r) for r in np.flatnonzero(self.ring_size)]

    def empty_slot(self) -> int:
        """Lowest-index empty ring slot, or -1."""
        empty = np.flatnonzero(self.ring_size == 0)
        return int(empty[0]) if len(empty) else -1

    def items_in(self, ring: int) -> list[int]:
        return [int(i) for i in np.flatnonzero(self.assign == ring)]

    def rings(self) -> list[list[int]]:
        """Members of each non-empty ring, rings in slot order."""
        return [self.items_in(r) for r in self.nonempty_rings()]

    @property
    def ring_count(self) -> int:
        return int(np.count_nonzero(self.ring_size))

    def swap(self, x: int, y: int) -> None:
        a, b = self.ring_of(x), self.ring_of(y)
        self.relocate(x, b)
        self.relocate(y, a)

    def total_violation(self) -> int:
        cap = self.capacity
        excess = self.ring_load - cap
        return int(excess[excess > 0].sum()) + self._extra_violation()

    def _extra_violation(self) -> int:
        return 0

    @property
    def feasible(self) -> bool:
        return self.total_violation() == 0

    def bn(self) -> int:
        return int(self.ring_load.max(initial=0))

    def state(self) -> tuple:
        """Hashable snapshot of the assignment and every cached aggregate."""
        raise NotImplementedError

    # subclasses: relocate, z0, copy, report


class SrapSolution(Solution):
    """Node-to-ring assignment with ring loads, federal load and ring count.

    ``conn[x, r]`` caches the total demand between node ``x`` and ring ``r``
    so both the federal-load delta of a move and the move itself are cheap.
    """

    problem = "srap"

    def __init__(self, inst: Instance, assignment: Sequence[int], *, _shared=None):
        self.inst = inst
        n = inst.n
        if _shared is None:
            _shared = (inst.demand_matrix(), inst.node_weights())
        self.d, self.w = _shared
        assign = np.asarray(assignment, dtype=np.int64).copy()
        if assign.shape != (n,):
            raise SolutionError(f"expected {n} node assignments, got {assign.shape[0]}")
        if n and (assign.min() < 0 or assign.max() >= n):
            raise SolutionError(f"ring slots must lie in [0, {n})")
        self.assign = assign
        onehot = np.zeros((n, n), dtype=np.int64)
        onehot[np.arange(n), assign] = 1
        self.ring_size = onehot.sum(axis=0)
        self.ring_load = self.w @ onehot
        self.conn = self.d @ onehot
        self.federal = int(self.w.sum() - np.trace(onehot.T @ self.conn)) // 2 if n else 0
        self.k = int(np.count_nonzero(self.ring_size))

    @classmethod
    def _raw(cls, other: "SrapSolution") -> "SrapSolution":
        obj = cls.__new__(cls)
        obj.inst, obj.d, obj.w = other.inst, other.d, other.w
        obj.assign = other.assign.copy()
        obj.ring_size = other.ring_size.copy()
        obj.ring_load = other.ring_load.copy()
        obj.conn = other.conn.copy()
        obj.federal = other.federal
        obj.k = other.k
        return obj

    def copy(self) -> "SrapSolution":
        return SrapSolution._raw(self)

    def relocate(self, x: int, b: int) -> None:
        a = int(self.assign[x])
        if a == b:
            return
        wx = int(self.w[x])
        self.federal += int(self.conn[x, a]) - int(self.conn[x, b])
        self.ring_load[a] -= wx
        self.ring_load[b] += wx
        self.ring_size[a] -= 1
        if self.ring_size[a] == 0:
            self.k -= 1
        if self.ring_size[b] == 0:
            self.k += 1
        self.ring_size[b] += 1
        col = self.d[:, x]
        self.conn[:, a] -= col
        self.conn[:, b] += col
        self.assign[x] = b

    @property
    def z0(self) -> int:
        return self.k

    def _extra_violation(self) -> int:
        return _excess(self.federal, self.capacity)

    def bn(self) -> int:
        return max(int(self.ring_load.max(initial=0)), self.federal)

    def state(self) -> tuple:
        return (self.assign.tobytes(), self.ring_load.tobytes(), self.ring_size.tobytes(),
                self.conn.tobytes(), self.federal, self.k)

    def report(self) -> LoadReport:
        return srap_report(self.inst, self)


class IdpSolution(Solution):
    """Edge-to-ring assignment with ring loads and ADM (ring, node) incidences."""

    problem = "idp"

    def __init__(self, inst: Instance, assignment: Sequence[int], *, _shared=None):
        self.inst = inst
        m, n = inst.m, inst.n
        if _shared is None:
            _shared = (np.array([e.u - 1 for e in inst.edges], dtype=np.int64),
                       np.array([e.v - 1 for e in inst.edges], dtype=np.int64),
                       np.array([e.demand for e in inst.edges], dtype=np.int64))
        self.eu, self.ev, self.de = _shared
        assign = np.asarray(assignment, dtype=np.int64).copy()
        if assign.shape != (m,):
            raise SolutionError(f"expected {m} edge assignments, got {assign.shape[0]}")
        if m and (assign.min() < 0 or assign.max() >= m):
            raise SolutionError(f"ring slots must lie in [0, {m})")
        self.assign = assign
        self.ring_size = np.bincount(assign, minlength=m).astype(np.int64)
        self.ring_load = np.bincount(assign, weights=self.de, minlength=m).astype(np.int64)
        self.inc = np.zeros((m, n), dtype=np.int64)
        np.add.at(self.inc, (assign, self.eu), 1)
        np.add.at(self.inc, (assign, self.ev), 1)
        self.ring_nodes = np.count_nonzero(self.inc, axis=1).astype(np.int64)
        self.adm = int(self.ring_nodes.sum())

    def copy(self) -> "IdpSolution":
        obj = IdpSolution.__new__(IdpSolution)
        obj.inst, obj.eu, obj.ev, obj.de = self.inst, self.eu, self.ev, self.de
        obj.assign = self.assign.copy()
        obj.ring_size = self.ring_size.copy()
        obj.ring_load = self.ring_load.copy()
        obj.inc = self.inc.copy()
        obj.ring_nodes = self.ring_nodes.copy()
        obj.adm = self.adm
        return obj

    def relocate(self, e: int, b: int) -> None:
        a = int(self.assign[e])
        if a == b:
            return
        de = int(self.de[e])
        self.ring_load[a] -= de
        self.ring_load[b] += de
        self.ring_size[a] -= 1
        self.ring_size[b] += 1
        for node in (int(self.eu[e]), int(self.ev[e])):
            self.inc[a, node] -= 1
            if self.inc[a, node] == 0:
                self.ring_nodes[a] -= 1
                self.adm -= 1
            if self.inc[b, node] == 0:
                self.ring_nodes[b] += 1
                self.adm += 1
            self.inc[b, node] += 1
        self.assign[e] = b

    @property
    def z0(self) -> int:
        return self.adm

    def state(self) -> tuple:
        return (self.assign.tobytes(), self.ring_load.tobytes(), self.ring_size.tobytes(),
                self.inc.tobytes(), self.ring_nodes.tobytes(), self.adm)

    def report(self) -> LoadReport:
        return idp_report(self.inst, self)


def make_solution(inst: Instance, problem: str, assignment: Sequence[int]) -> Solution:
    if problem == "srap":
        return SrapSolution(inst, assignment)
    if problem == "idp":
        return IdpSolution(inst, assignment)
    raise ValueError(f"unknown problem {problem!r}")


def num_items(inst: Instance, problem: str) -> int:
    return inst.n if problem == "srap" else inst.m


# -- from-scratch evaluation ------------------------------------------------

def srap_report(inst: Instance, sol: Solution | Sequence[int]) -> LoadReport:
    """Loads of every non-empty ring and of the federal ring, from the raw assignment."""
    assign = [int(r) for r in (sol.assign if isinstance(sol, Solution) else sol)]
    if len(assign) != inst.n:
        raise SolutionError("every node must be assigned")
    loads: dict[int, int] = {r: 0 for r in assign}
    federal = 0
    for e in inst.edges:
        ru, rv = assign[e.u - 1], assign[e.v - 1]
        loads[ru] += e.demand
        loads[rv] += e.demand
        if ru != rv:
            federal += e.demand
    loads = dict(sorted(loads.items()))
    cap = inst.capacity
    violations = {r: _excess(load, cap) for r, load in loads.items()}
    fed_viol = _excess(federal, cap)
    total = sum(violations.values()) + fed_viol
    return LoadReport(loads, violations, total, total == 0,
                      federal_load=federal, federal_violation=fed_viol)


def idp_report(inst: Instance, sol: Solution | Sequence[int]) -> LoadReport:
    assign = [int(r) for r in (sol.assign if isinstance(sol, Solution) else sol)]
    if len(assign) != inst.m:
        raise SolutionError("every edge must be assigned")
    loads: dict[int, int] = {}
    for e, r in zip(inst.edges, assign):
        loads[r] = loads.get(r, 0) + e.demand
    loads = dict(sorted(loads.items()))
    cap = inst.capacity
    violations = {r: _excess(load, cap) for r, load in loads.items()}
    total = sum(violations.values())
    return LoadReport(loads, violations, total, total == 0)


def report(inst: Instance, sol: Solution) -> LoadReport:
    return srap_report(inst, sol) if sol.problem == "srap" else idp_report(inst, sol)


def srap_z0(sol: SrapSolution | Sequence[int]) -> int:
    assign = sol.assign if isinstance(sol, Solution) else sol
    return len({int(r) for r in assign})


def idp_nodes_per_ring(inst: Instance, assign: Iterable[int]) -> dict[int, set[int]]:
    nodes: dict[int, set[int]] = {}
    for e, r in zip(inst.edges, assign):
        nodes.setdefault(int(r), set()).update((e.u, e.v))
    return nodes


def idp_z0(inst: Instance, sol: IdpSolution | Sequence[int]) -> int:
    assign = sol.assign if isinstance(sol, Solution) else sol
    return sum(len(s) for s in idp_nodes_per_ring(inst, assign).values())


# -- bounds -----------------------------------------------------------------

def srap_lower_bound(inst: Instance) -> int:
    """Ring-count bound: total demand over capacity, rounded up."""
    return -(-inst.total_demand // inst.capacity)


def idp_lower_bound(inst: Instance) -> int:
    """Every node with at least one demand needs at least one ADM."""
    return int(np.count_nonzero(inst.degrees()))


def lower_bound(inst: Instance, problem: str) -> int:
    return srap_lower_bound(inst) if problem == "srap" else idp_lower_bound(inst)


def _bin_packing_l2(weights: Sequence[int], capacity: int) -> int:
    """Martello-Toth L2 bound for packing ``weights`` into bins of ``capacity``."""
    ws = [w for w in weights if w > 0]
    if not ws:
        return 0
    best = -(-sum(ws) // capacity)
    half = capacity / 2
    for alpha in sorted({0, *(w for w in ws if w <= half)}):
        j1 = [w for w in ws if w > capacity - alpha]
        j2 = [w for w in ws if capacity - alpha >= w > half]
        j3 = sum(w for w in ws if half >= w >= alpha)
        slack = len(j2) * capacity - sum(j2)
        extra = max(0, -(-(j3 - slack) // capacity))
        best = max(best, len(j1) + len(j2) + extra)
    return best


def srap_certified_bound(inst: Instance) -> int:
    """A valid SRAP ring-count bound at least as strong as :func:`srap_lower_bound`.

    Ring loads are sums of node weights, so the SRAP ring constraint is a bin
    packing of node weights; the L2 packing bound applies. Any solution
    reaching this value is optimal, which lets the search stop early.
    """
    w = [int(x) for x in inst.node_weights()]
    bound = max(srap_lower_bound(inst), _bin_packing_l2(w, inst.capacity))
    return max(bound, 1 if inst.n else 0)


def idp_certified_bound(inst: Instance) -> int:
    """Each node sits on at least ceil(incident demand / B) rings, one ADM per ring."""
    incident = inst.node_weights()
    cap = inst.capacity
    return int(sum(-(-int(x) // cap) for x in incident))


def certified_bound(inst: Instance, problem: str) -> int:
    return srap_certified_bound(inst) if problem == "srap" else idp_certified_bound(inst)


def proven_infeasible(inst: Instance, problem: str) -> bool:
    """Cheap infeasibility certificate: a single node (SRAP) or edge (IDP) above capacity."""
    cap = inst.capacity
    if problem == "srap":
        return bool(inst.n) and int(inst.node_weights().max()) > cap
    return any(e.demand > cap for e in inst.edges)


# -- solution file format ---------------------------------------------------

def format_solution(sol: Solution) -> str:
    """``srap <id> <k>`` / ``idp <id> <rings>`` header plus 1-based item lines.

    Ring labels are renumbered 1..k in order of first appearance.
    """
    labels: dict[int, int] = {}
    lines = []
    for item, r in enumerate(sol.assign, start=1):
        label = labels.setdefault(int(r), len(labels) + 1)
        lines.append(f"{item} {label}")
    header = f"{sol.problem} {sol.inst.id} {sol.ring_count}"
    return "\n".join([header, *lines]) + "\n"


def parse_solution(text: str, inst: Instance) -> Solution:
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows or len(rows[0]) != 3 or rows[0][0] not in PROBLEMS:
        raise SolutionError("expected header '<srap|idp> <instance-id> <rings>'")
    problem = rows[0][0]
    count = num_items(inst, problem)
    ring_of: dict[int, str] = {}
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != 2:
            raise SolutionError(f"line {lineno}: expected '<item> <ring>'")
        try:
            item = int(row[0])
        except ValueError:
            raise SolutionError(f"line {lineno}: bad item {row[0]!r}") from None
        if not 1 <= item <= count:
            raise SolutionError(f"line {lineno}: item {item} outside [1, {count}]")
        if item in ring_of:
            raise SolutionError(f"line {lineno}: item {item} assigned twice")
        ring_of[item] = row[1]
    missing = [i for i in range(1, count + 1) if i not in ring_of]
    if missing:
        kind = "node" if problem == "srap" else "edge"
        raise SolutionError(f"unassigned {kind}(s): {missing[:10]}")
    slots: dict[str, int] = {}
    assign = [slots.setdefault(ring_of[i], len(slots)) for i in range(1, count + 1)]
    return make_solution(inst, problem, assign)
