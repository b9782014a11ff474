"""Relocate/swap neighborhood with incremental evaluation.

``enumerate_moves`` and ``delta_evaluate`` are the readable per-move API;
``best_move`` runs the same scan through the fast kernel selected in
:mod:`sonetls.kernels`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterator

import numpy as np

from . import kernels
from .model import IdpSolution, Solution, SrapSolution
from .objective import ObjectiveSpec, objective_value


class StaleMoveError(ValueError):
    pass


@dataclass(frozen=True)
class Move:
    kind: str  # "relocate" | "swap"
    item_a: int
    from_a: int
    to_a: int
    item_b: int | None = None
    value: float = math.nan
    candidate_feasible: bool = False

    def inverse(self) -> "Move":
        return Move(self.kind, self.item_a, self.to_a, self.from_a, self.item_b)

    def attributes(self) -> list[tuple[int, int]]:
        """Tabu attributes (item, ring it leaves)."""
        attrs = [(self.item_a, self.from_a)]
        if self.kind == "swap":
            attrs.append((self.item_b, self.to_a))
        return attrs


def relocate(item: int, src: int, dst: int) -> Move:
    return Move("relocate", item, src, dst)


def swap(x: int, src: int, dst: int, y: int) -> Move:
    return Move("swap", x, src, dst, y)


def _check(sol: Solution, move: Move) -> None:
    if move.from_a == move.to_a:
        raise StaleMoveError("source and target ring coincide")
    if sol.ring_of(move.item_a) != move.from_a:
        raise StaleMoveError(f"item {move.item_a} is not in ring {move.from_a}")
    if move.kind == "swap":
        if move.item_b is None or sol.ring_of(move.item_b) != move.to_a:
            raise StaleMoveError(f"item {move.item_b} is not in ring {move.to_a}")
    elif move.item_b is not None:
        raise StaleMoveError("relocate moves carry a single item")


def _excess(load: int, cap: int) -> int:
    return load - cap if load > cap else 0


def _srap_after(sol: SrapSolution, move: Move) -> tuple[int, dict[int, int], int]:
    x, a, b = move.item_a, move.from_a, move.to_a
    wx = int(sol.w[x])
    loads = {a: int(sol.ring_load[a]) - wx, b: int(sol.ring_load[b]) + wx}
    fed = sol.federal + int(sol.conn[x, a]) - int(sol.conn[x, b])
    z0 = sol.k - (sol.ring_size[a] == 1) + (sol.ring_size[b] == 0)
    if move.kind == "swap":
        y = move.item_b
        wy = int(sol.w[y])
        loads[a] += wy
        loads[b] -= wy
        fed += int(sol.conn[y, b]) - int(sol.conn[y, a]) + 2 * int(sol.d[x, y])
        z0 = sol.k
    return int(z0), loads, fed


def _idp_after(sol: IdpSolution, move: Move) -> tuple[int, dict[int, int]]:
    e, a, b = move.item_a, move.from_a, move.to_a
    out_a = [e]
    out_b = [move.item_b] if move.kind == "swap" else []
    loads = {a: int(sol.ring_load[a]), b: int(sol.ring_load[b])}
    counts = {a: {}, b: {}}
    # (ring, node) incidence changes: edges leaving a/b and edges entering b/a
    for ring, leaving, entering in ((a, out_a, out_b), (b, out_b, out_a)):
        for edge in leaving:
            loads[ring] -= int(sol.de[edge])
            for node in (int(sol.eu[edge]), int(sol.ev[edge])):
                counts[ring][node] = counts[ring].get(node, 0) - 1
        for edge in entering:
            loads[ring] += int(sol.de[edge])
            for node in (int(sol.eu[edge]), int(sol.ev[edge])):
                counts[ring][node] = counts[ring].get(node, 0) + 1
    adm = sol.adm
    for ring, changes in counts.items():
        for node, delta in changes.items():
            old = int(sol.inc[ring, node])
            adm += (old + delta > 0) - (old > 0)
    return adm, loads


def delta_evaluate(sol: Solution, move: Move, spec: ObjectiveSpec,
                   current_feasible: bool | None = None) -> tuple[float, bool]:
    """Objective value and feasibility of ``sol`` after ``move``, without applying it."""
    _check(sol, move)
    cap = sol.capacity
    if current_feasible is None:
        current_feasible = sol.feasible
    if isinstance(sol, SrapSolution):
        z0, changed, fed = _srap_after(sol, move)
        extra = [fed]
    else:
        z0, changed = _idp_after(sol, move)
        extra = []
    loads = [int(v) for v in sol.ring_load]
    for ring, load in changed.items():
        loads[ring] = load
    bn = max(loads + extra, default=0)
    violation = sum(_excess(v, cap) for v in loads + extra)
    feasible = violation == 0
    opening = move.kind == "relocate" and sol.ring_size[move.to_a] == 0
    created = changed[move.to_a] if opening else -1
    value = objective_value(spec.code, z0, bn, violation, feasible, current_feasible, created,
                            cap, spec.alpha, spec.beta)
    return value, feasible


def current_value(sol: Solution, spec: ObjectiveSpec, current_feasible: bool | None = None) -> float:
    """Objective of ``sol`` itself, evaluated as a stay-put transition."""
    feasible = sol.feasible
    if current_feasible is None:
        current_feasible = feasible
    return objective_value(spec.code, sol.z0, sol.bn(), sol.total_violation(), feasible,
                           current_feasible, -1, sol.capacity, spec.alpha, spec.beta)


def relocate_targets(sol: Solution, item: int) -> list[int]:
    """Non-empty rings plus the lowest empty slot, ascending, minus no-op targets."""
    a = sol.ring_of(item)
    empty = sol.empty_slot()
    targets = sol.nonempty_rings()
    if empty >= 0 and sol.ring_size[a] > 1:
        targets.append(empty)
    return sorted(t for t in targets if t != a)


def enumerate_moves(sol: Solution, spec: ObjectiveSpec,
                    current_feasible: bool | None = None) -> Iterator[Move]:
    """Every relocate, plus swaps with the target ring's members when the relocate is infeasible."""
    if current_feasible is None:
        current_feasible = sol.feasible
    members = {r: sol.items_in(r) for r in sol.nonempty_rings()}
    for x in range(sol.num_items):
        a = sol.ring_of(x)
        for b in relocate_targets(sol, x):
            mv = relocate(x, a, b)
            value, feas = delta_evaluate(sol, mv, spec, current_feasible)
            yield replace(mv, value=value, candidate_feasible=feas)
            if feas:
                continue
            for y in members.get(b, ()):
                sw = swap(x, a, b, y)
                value, feas_s = delta_evaluate(sol, sw, spec, current_feasible)
                yield replace(sw, value=value, candidate_feasible=feas_s)


def apply_move(sol: Solution, move: Move) -> None:
    _check(sol, move)
    if move.kind == "swap":
        sol.relocate(move.item_a, move.to_a)
        sol.relocate(move.item_b, move.from_a)
    else:
        sol.relocate(move.item_a, move.to_a)


def best_move(sol: Solution, spec: ObjectiveSpec, tabu: np.ndarray | None = None,
              best_value: float = -math.inf, current_feasible: bool | None = None,
              backend=None) -> Move | None:
    """Best admissible move of the whole neighborhood (see ``_kernels_py``).

    ``tabu`` is an ``items x slots`` array, non-zero where moving the item
    into the ring is forbidden; ``best_value`` drives the aspiration test.
    """
    if current_feasible is None:
        current_feasible = sol.feasible
    if tabu is None:
        tabu = np.zeros((sol.num_items, sol.num_slots), dtype=np.int64)
    mod = backend or kernels
    if isinstance(sol, SrapSolution):
        res = mod.srap_scan(sol.assign, sol.w, sol.d, sol.conn, sol.ring_load, sol.ring_size,
                            sol.federal, sol.capacity, spec.code, spec.alpha, spec.beta,
                            bool(current_feasible), tabu, float(best_value))
    else:
        res = mod.idp_scan(sol.eu, sol.ev, sol.de, sol.assign, sol.inc, sol.ring_nodes,
                           sol.ring_load, sol.ring_size, sol.adm, sol.capacity, spec.code,
                           spec.alpha, spec.beta, bool(current_feasible), tabu,
                           float(best_value))
    if res is None:
        return None
    is_swap, x, a, b, y, value, feas = res
    return Move("swap" if is_swap else "relocate", int(x), int(a), int(b),
                int(y) if is_swap else None, float(value), bool(feas))
