"""Starting solutions and the greedy SRAP/IDP constructors."""
from __future__ import annotations

import random
from collections import defaultdict

from .instance import Instance
from .model import (IdpSolution, Solution, SrapSolution, make_solution, num_items,
                    srap_lower_bound)


class ConstructionError(ValueError):
    """The constructor cannot produce a feasible solution.

    ``partial`` holds whatever the heuristic built, when it built anything.
    """

    def __init__(self, message: str, partial: Solution | None = None):
        super().__init__(message)
        self.partial = partial


# -- starting solutions -----------------------------------------------------

def start_all_in_one(inst: Instance, problem: str) -> Solution:
    return make_solution(inst, problem, [0] * num_items(inst, problem))


def start_random(inst: Instance, problem: str, seed: int) -> Solution:
    count = num_items(inst, problem)
    rng = random.Random(seed)
    return make_solution(inst, problem, [rng.randrange(count) for _ in range(count)])


def start_klb_random(inst: Instance, seed: int, problem: str = "srap") -> Solution:
    """Items spread uniformly over exactly ``k_lb`` rings (capped at the item count).

    Rings left empty by the draw each receive one random item taken from a
    ring that still has two or more.
    """
    count = num_items(inst, problem)
    k = min(srap_lower_bound(inst), count)
    if k < 1:
        raise ValueError("k_lb is 0: the instance has no demand")
    rng = random.Random(seed)
    assign = [rng.randrange(k) for _ in range(count)]
    sizes = [assign.count(r) for r in range(k)]
    for r in range(k):
        if sizes[r]:
            continue
        donors = [i for i, ring in enumerate(assign) if sizes[ring] > 1]
        i = rng.choice(donors)
        sizes[assign[i]] -= 1
        assign[i] = r
        sizes[r] = 1
    return make_solution(inst, problem, assign)


# -- SRAP greedy merges -----------------------------------------------------

class _Rings:
    """Disjoint node sets with their ring loads, for the merge heuristics."""

    def __init__(self, inst: Instance):
        self.inst = inst
        self.w = [int(x) for x in inst.node_weights()]
        self.ring = list(range(inst.n))
        self.members = {i: [i] for i in range(inst.n)}
        self.load = {i: self.w[i] for i in range(inst.n)}

    def mergeable(self, i: int, j: int) -> bool:
        return self.load[i] + self.load[j] <= self.inst.capacity

    def merge(self, i: int, j: int) -> None:
        for v in self.members[j]:
            self.ring[v] = i
        self.members[i].extend(self.members.pop(j))
        self.load[i] += self.load.pop(j)

    def solution(self, name: str) -> SrapSolution:
        sol = SrapSolution(self.inst, self.ring)
        if sol.federal > self.inst.capacity:
            raise ConstructionError(
                f"{name}: federal ring load {sol.federal} exceeds capacity "
                f"{self.inst.capacity} after all feasible merges", sol)
        return sol


def srap_edge_based(inst: Instance) -> SrapSolution:
    """Merge the rings joined by the heaviest unused edge whenever the union fits.

    Raises :class:`ConstructionError` (with the merged solution attached)
    when the federal ring ends above capacity.
    """
    rings = _Rings(inst)
    # heaviest first; ties by canonical edge order
    unused = sorted(range(inst.m), key=lambda i: -inst.edges[i].demand)
    while unused:
        e = inst.edges[unused.pop(0)]
        i, j = rings.ring[e.u - 1], rings.ring[e.v - 1]
        if rings.mergeable(i, j):
            rings.merge(i, j)
            unused = [k for k in unused
                      if rings.ring[inst.edges[k].u - 1] != rings.ring[inst.edges[k].v - 1]]
    return rings.solution("edge-based")


def srap_cut_based(inst: Instance) -> SrapSolution:
    """Repeatedly merge the feasible ring pair with the largest demand between them."""
    rings = _Rings(inst)
    while True:
        cut: dict[tuple[int, int], int] = defaultdict(int)
        for e in inst.edges:
            i, j = rings.ring[e.u - 1], rings.ring[e.v - 1]
            if i != j:
                cut[min(i, j), max(i, j)] += e.demand
        best = None
        for (i, j), weight in sorted(cut.items()):
            if rings.mergeable(i, j) and (best is None or weight > best[0]):
                best = (weight, i, j)
        if best is None:
            break
        rings.merge(best[1], best[2])
    return rings.solution("cut-based")


def srap_node_based(inst: Instance, k: int, seed: int) -> SrapSolution:
    """Seed ``k`` rings with random nodes, then grow the emptiest ring greedily.

    Each step picks the ring with the largest unused capacity and gives it
    the unassigned node with the most demand towards it, ignoring capacity.
    """
    n = inst.n
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}], got {k}")
    rng = random.Random(seed)
    d = inst.demand_matrix().tolist()
    w = [int(x) for x in inst.node_weights()]
    seeds = rng.sample(range(n), k)
    assign = [-1] * n
    load = [0] * k
    toward = [[0] * k for _ in range(n)]

    def put(v: int, r: int) -> None:
        assign[v] = r
        load[r] += w[v]
        for u in range(n):
            toward[u][r] += d[u][v]

    for r, v in enumerate(seeds):
        put(v, r)
    unassigned = [v for v in range(n) if assign[v] < 0]
    while unassigned:
        r = min(range(k), key=lambda i: (load[i], i))
        v = max(unassigned, key=lambda u: (toward[u][r], -u))
        unassigned.remove(v)
        put(v, r)
    return SrapSolution(inst, assign)


# -- IDP constructors -------------------------------------------------------

def _require_edges_fit(inst: Instance) -> None:
    heavy = [e for e in inst.edges if e.demand > inst.capacity]
    if heavy:
        e = heavy[0]
        raise ConstructionError(
            f"IDP infeasible: demand {e.demand} on ({e.u}, {e.v}) exceeds capacity {inst.capacity}")


def idp_weight_ordered(inst: Instance, order: str = "decreasing") -> IdpSolution:
    """Decreasing: best-fit each edge into existing rings. Increasing: next-fit."""
    _require_edges_fit(inst)
    cap = inst.capacity
    assign = [0] * inst.m
    if order == "decreasing":
        idx = sorted(range(inst.m), key=lambda i: -inst.edges[i].demand)
        loads: list[int] = []
        for i in idx:
            dem = inst.edges[i].demand
            fits = [(cap - load - dem, r) for r, load in enumerate(loads) if load + dem <= cap]
            if fits:
                r = min(fits)[1]
            else:
                r = len(loads)
                loads.append(0)
            loads[r] += dem
            assign[i] = r
    elif order == "increasing":
        idx = sorted(range(inst.m), key=lambda i: inst.edges[i].demand)
        ring, load = 0, 0
        for n_done, i in enumerate(idx):
            dem = inst.edges[i].demand
            if n_done and load + dem > cap:
                ring, load = ring + 1, 0
            load += dem
            assign[i] = ring
    else:
        raise ValueError(f"order must be increasing or decreasing, got {order!r}")
    return IdpSolution(inst, assign)


class _EdgeGraph:
    """Adjacency over the still-unassigned edges."""

    def __init__(self, inst: Instance):
        self.inst = inst
        self.adj: dict[int, dict[int, int]] = defaultdict(dict)  # node -> {nbr: edge index}
        for i, e in enumerate(inst.edges):
            self.adj[e.u][e.v] = i
            self.adj[e.v][e.u] = i
        self.unassigned = set(range(inst.m))

    def demand(self, i: int) -> int:
        return self.inst.edges[i].demand

    def remove(self, edges) -> None:
        for i in edges:
            e = self.inst.edges[i]
            del self.adj[e.u][e.v]
            del self.adj[e.v][e.u]
            self.unassigned.discard(i)

    def induced(self, nodes) -> list[int]:
        nodes = set(nodes)
        return sorted({i for v in nodes for w, i in self.adj[v].items() if w in nodes})


def _grow_clique(g: _EdgeGraph, start: int, cap: int) -> list[int]:
    e = g.inst.edges[start]
    clique = [e.u, e.v]
    weight = e.demand
    while True:
        common = set(g.adj[clique[0]])
        for v in clique[1:]:
            common &= set(g.adj[v])
        if not common:
            break
        gain, v = max((sum(g.demand(g.adj[c][v]) for c in clique), -v) for v in common)
        v = -v
        if weight + gain > cap:
            break
        clique.append(v)
        weight += gain
    return g.induced(clique)


def _grow_cycle(g: _EdgeGraph, start: int, cap: int, max_expansions: int = 20000) -> list[int]:
    """A light cycle through ``start`` (depth-first), then every chord that still fits."""
    e = g.inst.edges[start]
    budget = cap - e.demand
    found: list[int] | None = None
    expansions = 0
    # iterative DFS over simple paths from e.v back to e.u avoiding the start edge
    stack = [(e.v, [e.v], 0)]
    while stack and found is None and expansions < max_expansions:
        node, path, weight = stack.pop()
        expansions += 1
        for nbr in sorted(g.adj[node], reverse=True):
            i = g.adj[node][nbr]
            if i == start or nbr in path[1:] or weight + g.demand(i) > budget:
                continue
            if nbr == e.u:
                if len(path) >= 2:
                    found = path + [nbr]
                    break
                continue
            if nbr in path:
                continue
            stack.append((nbr, path + [nbr], weight + g.demand(i)))
    if found is None:
        return [start]
    cycle = [start] + [g.adj[p][q] for p, q in zip(found, found[1:])]
    weight = sum(g.demand(i) for i in cycle)
    chords = sorted((i for i in g.induced(found) if i not in cycle),
                    key=lambda i: (-g.demand(i), i))
    for i in chords:
        if weight + g.demand(i) <= cap:
            cycle.append(i)
            weight += g.demand(i)
    return sorted(cycle)


def _best_fit_groups(inst: Instance, seed: int, grow) -> IdpSolution:
    _require_edges_fit(inst)
    cap = inst.capacity
    rng = random.Random(seed)
    g = _EdgeGraph(inst)
    assign = [0] * inst.m
    loads: list[int] = []
    while g.unassigned:
        start = rng.choice(sorted(g.unassigned))
        group = grow(g, start, cap)
        weight = sum(g.demand(i) for i in group)
        fits = [(cap - load - weight, r) for r, load in enumerate(loads) if load + weight <= cap]
        if fits:
            r = min(fits)[1]
        else:
            r = len(loads)
            loads.append(0)
        loads[r] += weight
        for i in group:
            assign[i] = r
        g.remove(group)
    return IdpSolution(inst, assign)


def idp_clique_bf(inst: Instance, seed: int) -> IdpSolution:
    """Clique-BF: place greedily grown cliques of unassigned edges by best fit."""
    return _best_fit_groups(inst, seed, _grow_clique)


def idp_cycle_bf(inst: Instance, seed: int) -> IdpSolution:
    """Cycle-BF: like Clique-BF, with chord-augmented cycles as the groups."""
    return _best_fit_groups(inst, seed, _grow_cycle)


CONSTRUCTORS = {
    "srap": ("edge", "cut", "node"),
    "idp": ("decw", "incw", "clique", "cycle"),
}


def construct(inst: Instance, problem: str, name: str, seed: int = 0,
              k: int | None = None) -> Solution:
    """Dispatch by the short constructor names used on the command line."""
    if name not in CONSTRUCTORS[problem]:
        raise ValueError(f"constructor {name!r} does not apply to {problem}")
    if name == "edge":
        return srap_edge_based(inst)
    if name == "cut":
        return srap_cut_based(inst)
    if name == "node":
        if k is None:
            k = max(1, min(inst.n, srap_lower_bound(inst)))
        return srap_node_based(inst, k, seed)
    if name == "decw":
        return idp_weight_ordered(inst, "decreasing")
    if name == "incw":
        return idp_weight_ordered(inst, "increasing")
    if name == "clique":
        return idp_clique_bf(inst, seed)
    return idp_cycle_bf(inst, seed)
