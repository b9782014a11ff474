"""Exhaustive set-partition solvers for tiny instances (ground truth for tests)."""
from __future__ import annotations

from .instance import Instance
from .model import IdpSolution, SrapSolution

MAX_ITEMS = 10


def srap_optimum(inst: Instance) -> tuple[int, SrapSolution] | None:
    """Minimum ring count over all feasible node partitions, with a witness."""
    n = inst.n
    if n > MAX_ITEMS:
        raise ValueError(f"srap_optimum enumerates Bell(n) partitions; n={n} > {MAX_ITEMS}")
    cap = inst.capacity
    w = [int(x) for x in inst.node_weights()]
    d = inst.demand_matrix().tolist()
    loads = [0] * (n + 1)
    best: list = [None, None]

    def ok(prefix, blocks):
        # ring loads only grow as nodes are added; federal load is checked at the leaves
        loads[prefix[-1]] += w[len(prefix) - 1]
        good = loads[prefix[-1]] <= cap and (best[0] is None or blocks < best[0])
        if not good:
            loads[prefix[-1]] -= w[len(prefix) - 1]
        return good

    def unwind(prefix):
        loads[prefix[-1]] -= w[len(prefix) - 1]

    for assign in _walk(n, ok, unwind):
        federal = sum(d[u][v] for u in range(n) for v in range(u + 1, n) if assign[u] != assign[v])
        if federal <= cap:
            k = max(assign) + 1 if assign else 0
            if best[0] is None or k < best[0]:
                best[0], best[1] = k, list(assign)
    if best[0] is None:
        return None
    return best[0], SrapSolution(inst, best[1])


def idp_optimum(inst: Instance) -> tuple[int, IdpSolution] | None:
    """Minimum total ADM count over all capacity-feasible edge partitions."""
    m = inst.m
    if m > MAX_ITEMS:
        raise ValueError(f"idp_optimum enumerates Bell(m) partitions; m={m} > {MAX_ITEMS}")
    cap = inst.capacity
    if any(e.demand > cap for e in inst.edges):
        return None
    ends = [(e.u, e.v) for e in inst.edges]
    dem = [e.demand for e in inst.edges]
    loads = [0] * (m + 1)
    inc = [dict() for _ in range(m + 1)]
    adm = [0]
    best: list = [None, None]

    def add(r, i, sign):
        loads[r] += sign * dem[i]
        for node in ends[i]:
            c = inc[r].get(node, 0)
            inc[r][node] = c + sign
            if c == 0 and sign > 0:
                adm[0] += 1
            elif c == 1 and sign < 0:
                adm[0] -= 1

    def ok(prefix, blocks):
        i, r = len(prefix) - 1, prefix[-1]
        add(r, i, +1)
        # ADM count never shrinks as edges are added
        good = loads[r] <= cap and (best[0] is None or adm[0] < best[0])
        if not good:
            add(r, i, -1)
        return good

    def unwind(prefix):
        add(prefix[-1], len(prefix) - 1, -1)

    for assign in _walk(m, ok, unwind):
        if best[0] is None or adm[0] < best[0]:
            best[0], best[1] = adm[0], list(assign)
    return best[0], IdpSolution(inst, best[1])


def _walk(count: int, ok, unwind):
    """Restricted-growth walk where ``ok`` applies state and ``unwind`` reverts it."""
    prefix: list[int] = []

    def rec(blocks: int):
        if len(prefix) == count:
            yield prefix
            return
        for r in range(blocks + 1):
            prefix.append(r)
            nb = max(blocks, r + 1)
            if ok(prefix, nb):
                yield from rec(nb)
                unwind(prefix)
            prefix.pop()

    yield from rec(0)
