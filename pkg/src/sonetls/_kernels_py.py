"""Pure-Python neighborhood scans, used when the compiled extension is absent.

Each scan walks the relocate/conditional-swap neighborhood in the canonical
order (items ascending, target rings ascending, swap partners ascending),
evaluates every candidate incrementally and returns the best admissible one
as ``(is_swap, x, from_ring, to_ring, y, value, feasible)`` or ``None`` when
the neighborhood is empty. A candidate is admissible when it is not tabu or
its value beats ``best_value`` (aspiration); if nothing is admissible the
best tabu candidate is returned.
"""
from __future__ import annotations

from .objective import objective_value


def _top3(loads, rings):
    return sorted(((loads[r], r) for r in rings), key=lambda t: -t[0])[:3]


def _other_max(top, a, b):
    for load, r in top:
        if r != a and r != b:
            return load
    return 0


def srap_scan(assign, w, d, conn, ring_load, ring_size, federal, capacity, code, alpha, beta,
              cur_feasible, tabu, best_value):
    assign = assign.tolist()
    w = w.tolist()
    d = d.tolist()
    conn = conn.tolist()
    ring_load = ring_load.tolist()
    ring_size = ring_size.tolist()
    tabu = tabu.tolist()
    federal = int(federal)
    cap = capacity
    n = len(assign)

    nonempty = [r for r, s in enumerate(ring_size) if s]
    empty = next((r for r, s in enumerate(ring_size) if not s), -1)
    targets = sorted(nonempty + ([empty] if empty >= 0 else []))
    members = {r: [] for r in nonempty}
    for x, r in enumerate(assign):
        members[r].append(x)
    k = len(nonempty)
    top = _top3(ring_load, nonempty)
    fed_exc = federal - cap if federal > cap else 0
    viol0 = sum(ring_load[r] - cap for r in nonempty if ring_load[r] > cap) + fed_exc

    best = None
    best_any = None
    for x in range(n):
        a = assign[x]
        wx = w[x]
        la = ring_load[a]
        na = la - wx
        ea = la - cap if la > cap else 0
        ena = na - cap if na > cap else 0
        leaves_empty = ring_size[a] == 1
        cxa = conn[x][a]
        for b in targets:
            if b == a:
                continue
            opening = ring_size[b] == 0
            if opening and leaves_empty:
                continue
            lb = ring_load[b]
            nb = lb + wx
            fed = federal + cxa - conn[x][b]
            z0 = k - leaves_empty + opening
            bn = max(_other_max(top, a, b), na, nb, fed)
            viol = (viol0 - ea - (lb - cap if lb > cap else 0) - fed_exc + ena
                    + (nb - cap if nb > cap else 0) + (fed - cap if fed > cap else 0))
            feas = viol == 0
            value = objective_value(code, z0, bn, viol, feas, cur_feasible,
                                    nb if opening else -1, cap, alpha, beta)
            cand = (0, x, a, b, -1, value, feas)
            if best_any is None or value < best_any[5]:
                best_any = cand
            if (not tabu[x][b] or value < best_value) and (best is None or value < best[5]):
                best = cand
            if feas or opening:
                continue
            for y in members[b]:
                wy = w[y]
                sa = la - wx + wy
                sb = lb - wy + wx
                sfed = (federal + cxa - conn[x][b] + conn[y][b] - conn[y][a]
                        + 2 * d[x][y])
                sbn = max(_other_max(top, a, b), sa, sb, sfed)
                sviol = (viol0 - ea - (lb - cap if lb > cap else 0) - fed_exc
                         + (sa - cap if sa > cap else 0) + (sb - cap if sb > cap else 0)
                         + (sfed - cap if sfed > cap else 0))
                sfeas = sviol == 0
                value = objective_value(code, k, sbn, sviol, sfeas, cur_feasible, -1,
                                        cap, alpha, beta)
                cand = (1, x, a, b, y, value, sfeas)
                if value < best_any[5]:
                    best_any = cand
                if ((not (tabu[x][b] or tabu[y][a]) or value < best_value)
                        and (best is None or value < best[5])):
                    best = cand
    return best if best is not None else best_any


def idp_scan(eu, ev, de, assign, inc, ring_nodes, ring_load, ring_size, adm, capacity, code,
             alpha, beta, cur_feasible, tabu, best_value):
    eu = eu.tolist()
    ev = ev.tolist()
    de = de.tolist()
    assign = assign.tolist()
    inc = inc.tolist()
    ring_load = ring_load.tolist()
    ring_size = ring_size.tolist()
    tabu = tabu.tolist()
    adm = int(adm)
    cap = capacity
    m = len(assign)

    nonempty = [r for r, s in enumerate(ring_size) if s]
    empty = next((r for r, s in enumerate(ring_size) if not s), -1)
    targets = sorted(nonempty + ([empty] if empty >= 0 else []))
    members = {r: [] for r in nonempty}
    for e, r in enumerate(assign):
        members[r].append(e)
    top = _top3(ring_load, nonempty)
    viol0 = sum(ring_load[r] - cap for r in nonempty if ring_load[r] > cap)

    best = None
    best_any = None
    for e in range(m):
        a = assign[e]
        u, v, dw = eu[e], ev[e], de[e]
        inc_a = inc[a]
        la = ring_load[a]
        na = la - dw
        ea = la - cap if la > cap else 0
        ena = na - cap if na > cap else 0
        leaves_empty = ring_size[a] == 1
        lose = (inc_a[u] == 1) + (inc_a[v] == 1)
        for b in targets:
            if b == a:
                continue
            opening = ring_size[b] == 0
            if opening and leaves_empty:
                continue
            inc_b = inc[b]
            lb = ring_load[b]
            nb = lb + dw
            z0 = adm - lose + (inc_b[u] == 0) + (inc_b[v] == 0)
            bn = max(_other_max(top, a, b), na, nb)
            viol = (viol0 - ea - (lb - cap if lb > cap else 0) + ena
                    + (nb - cap if nb > cap else 0))
            feas = viol == 0
            value = objective_value(code, z0, bn, viol, feas, cur_feasible,
                                    nb if opening else -1, cap, alpha, beta)
            cand = (0, e, a, b, -1, value, feas)
            if best_any is None or value < best_any[5]:
                best_any = cand
            if (not tabu[e][b] or value < best_value) and (best is None or value < best[5]):
                best = cand
            if feas or opening:
                continue
            for f in members[b]:
                u2, v2, df = eu[f], ev[f], de[f]
                sa = la - dw + df
                sb = lb - df + dw
                delta = 0
                seen = []
                for x in (u, v, u2, v2):
                    if x in seen:
                        continue
                    seen.append(x)
                    in_e = (x == u) + (x == v)
                    in_f = (x == u2) + (x == v2)
                    old = inc_a[x]
                    delta += (old - in_e + in_f > 0) - (old > 0)
                    old = inc_b[x]
                    delta += (old - in_f + in_e > 0) - (old > 0)
                sbn = max(_other_max(top, a, b), sa, sb)
                sviol = (viol0 - ea - (lb - cap if lb > cap else 0)
                         + (sa - cap if sa > cap else 0) + (sb - cap if sb > cap else 0))
                sfeas = sviol == 0
                value = objective_value(code, adm + delta, sbn, sviol, sfeas, cur_feasible, -1,
                                        cap, alpha, beta)
                cand = (1, e, a, b, f, value, sfeas)
                if value < best_any[5]:
                    best_any = cand
                if ((not (tabu[e][b] or tabu[f][a]) or value < best_value)
                        and (best is None or value < best[5])):
                    best = cand
    return best if best is not None else best_any
