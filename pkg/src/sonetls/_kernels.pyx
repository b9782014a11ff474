# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled neighborhood scans; same contract as ``_kernels_py``."""
from libc.stdint cimport int64_t
from libc.stdlib cimport malloc, free


cdef inline int64_t _exc(int64_t load, int64_t cap) nogil:
    return load - cap if load > cap else 0


cdef inline double _objval(int code, int64_t z0, int64_t bn, int64_t viol, bint feas, bint cur,
                           int64_t created, int64_t cap, double alpha, double beta) nogil:
    cdef int64_t z1
    if code == 1 or code == 2:
        z1 = z0 + (bn - cap if bn > cap else 0)
        if code == 2 and created >= 0:
            return <double>z1 + alpha * <double>created
        return <double>z1
    if code == 3:
        return <double>(z0 * cap + bn)
    if code == 4:
        if cur:
            if feas:
                return <double>(z0 * cap + bn)
            return <double>((z0 + 1) * bn)
        if feas:
            return <double>(z0 * cap)
        return beta * <double>z0 * <double>bn
    return <double>(z0 + viol)


cdef struct Top3:
    int64_t load[3]
    int64_t ring[3]
    int count


cdef inline void _top_push(Top3* t, int64_t load, int64_t ring) nogil:
    cdef int i = t.count
    if i < 3:
        t.count += 1
    elif load <= t.load[2]:
        return
    else:
        i = 2
    while i > 0 and t.load[i - 1] < load:
        if i < 3:
            t.load[i] = t.load[i - 1]
            t.ring[i] = t.ring[i - 1]
        i -= 1
    t.load[i] = load
    t.ring[i] = ring


cdef inline int64_t _other_max(Top3* t, int64_t a, int64_t b) nogil:
    cdef int i
    for i in range(t.count):
        if t.ring[i] != a and t.ring[i] != b:
            return t.load[i]
    return 0


cdef inline int64_t _max3(int64_t p, int64_t q, int64_t r) nogil:
    if q > p:
        p = q
    if r > p:
        p = r
    return p


cdef struct Best:
    bint found
    int kind
    int64_t x, a, b, y
    double value
    bint feas


cdef inline void _offer(Best* best, Best* any_best, int kind, int64_t x, int64_t a, int64_t b,
                        int64_t y, double value, bint feas, bint is_tabu,
                        double best_value) nogil:
    if not any_best.found or value < any_best.value:
        any_best.found = True
        any_best.kind = kind
        any_best.x = x; any_best.a = a; any_best.b = b; any_best.y = y
        any_best.value = value; any_best.feas = feas
    if (not is_tabu or value < best_value) and (not best.found or value < best.value):
        best.found = True
        best.kind = kind
        best.x = x; best.a = a; best.b = b; best.y = y
        best.value = value; best.feas = feas


cdef object _result(Best* best, Best* any_best):
    cdef Best* r = best if best.found else any_best
    if not r.found:
        return None
    return (r.kind, r.x, r.a, r.b, r.y, r.value, bool(r.feas))


cdef int64_t* _group(const int64_t[:] assign, const int64_t[:] ring_size, int64_t* start):
    """Items bucketed by ring, ascending within each ring; ``start`` has slots+1 entries."""
    cdef Py_ssize_t n = assign.shape[0], slots = ring_size.shape[0], i, r
    cdef int64_t* items = <int64_t*>malloc((n + 1) * sizeof(int64_t))
    cdef int64_t* fill = <int64_t*>malloc((slots + 1) * sizeof(int64_t))
    start[0] = 0
    for r in range(slots):
        start[r + 1] = start[r] + ring_size[r]
        fill[r] = start[r]
    for i in range(n):
        r = assign[i]
        items[fill[r]] = i
        fill[r] += 1
    free(fill)
    return items


def srap_scan(const int64_t[:] assign, const int64_t[:] w, const int64_t[:, :] d,
              const int64_t[:, :] conn, const int64_t[:] ring_load, const int64_t[:] ring_size,
              int64_t federal, int64_t capacity, int code, double alpha, double beta,
              bint cur_feasible, const int64_t[:, :] tabu, double best_value):
    cdef Py_ssize_t n = assign.shape[0], slots = ring_size.shape[0]
    cdef Py_ssize_t x, bi, yi, r
    cdef int64_t cap = capacity, a, b, y, k = 0, empty = -1
    cdef int64_t wx, wy, la, lb, na, nb, ea, ena, fed, fed_exc, viol0 = 0, viol, z0, bn
    cdef int64_t sa, sb, sfed, cxa, cxb, other
    cdef bint leaves_empty, opening, feas
    cdef double value
    cdef Top3 top
    cdef Best best, any_best
    best.found = False
    any_best.found = False
    top.count = 0
    if n == 0:
        return None
    cdef int64_t* targets = <int64_t*>malloc((slots + 1) * sizeof(int64_t))
    cdef int64_t* start = <int64_t*>malloc((slots + 1) * sizeof(int64_t))
    cdef int64_t* items = _group(assign, ring_size, start)
    cdef Py_ssize_t nt = 0
    try:
        for r in range(slots):
            if ring_size[r] > 0:
                k += 1
                targets[nt] = r
                nt += 1
                _top_push(&top, ring_load[r], r)
                viol0 += _exc(ring_load[r], cap)
            elif empty < 0:
                empty = r
                targets[nt] = r
                nt += 1
        fed_exc = _exc(federal, cap)
        viol0 += fed_exc
        for x in range(n):
            a = assign[x]
            wx = w[x]
            la = ring_load[a]
            na = la - wx
            ea = _exc(la, cap)
            ena = _exc(na, cap)
            leaves_empty = ring_size[a] == 1
            cxa = conn[x, a]
            for bi in range(nt):
                b = targets[bi]
                if b == a:
                    continue
                opening = ring_size[b] == 0
                if opening and leaves_empty:
                    continue
                lb = ring_load[b]
                nb = lb + wx
                cxb = conn[x, b]
                fed = federal + cxa - cxb
                z0 = k - leaves_empty + opening
                other = _other_max(&top, a, b)
                bn = _max3(other, na, nb)
                if fed > bn:
                    bn = fed
                viol = viol0 - ea - _exc(lb, cap) - fed_exc + ena + _exc(nb, cap) + _exc(fed, cap)
                feas = viol == 0
                value = _objval(code, z0, bn, viol, feas, cur_feasible,
                                nb if opening else -1, cap, alpha, beta)
                _offer(&best, &any_best, 0, x, a, b, -1, value, feas, tabu[x, b] != 0, best_value)
                if feas or opening:
                    continue
                for yi in range(start[b], start[b + 1]):
                    y = items[yi]
                    wy = w[y]
                    sa = la - wx + wy
                    sb = lb - wy + wx
                    sfed = federal + cxa - cxb + conn[y, b] - conn[y, a] + 2 * d[x, y]
                    bn = _max3(other, sa, sb)
                    if sfed > bn:
                        bn = sfed
                    viol = (viol0 - ea - _exc(lb, cap) - fed_exc
                            + _exc(sa, cap) + _exc(sb, cap) + _exc(sfed, cap))
                    feas = viol == 0
                    value = _objval(code, k, bn, viol, feas, cur_feasible, -1, cap, alpha, beta)
                    _offer(&best, &any_best, 1, x, a, b, y, value, feas,
                           tabu[x, b] != 0 or tabu[y, a] != 0, best_value)
    finally:
        free(targets)
        free(start)
        free(items)
    return _result(&best, &any_best)


cdef inline int64_t _presence_delta(int64_t old, int64_t new) nogil:
    return (1 if new > 0 else 0) - (1 if old > 0 else 0)


def idp_scan(const int64_t[:] eu, const int64_t[:] ev, const int64_t[:] de,
             const int64_t[:] assign, const int64_t[:, :] inc, const int64_t[:] ring_nodes,
             const int64_t[:] ring_load, const int64_t[:] ring_size, int64_t adm,
             int64_t capacity, int code, double alpha, double beta, bint cur_feasible,
             const int64_t[:, :] tabu, double best_value):
    cdef Py_ssize_t m = assign.shape[0], slots = ring_size.shape[0]
    cdef Py_ssize_t e, bi, fi, r, i, j
    cdef int64_t cap = capacity, a, b, f, empty = -1
    cdef int64_t u, v, u2, v2, dw, df, la, lb, na, nb, ea, ena, viol0 = 0, viol, z0, bn
    cdef int64_t sa, sb, delta, lose, other, node, in_e, in_f, old
    cdef int64_t nodes[4]
    cdef int nn
    cdef bint leaves_empty, opening, feas, dup
    cdef double value
    cdef Top3 top
    cdef Best best, any_best
    best.found = False
    any_best.found = False
    top.count = 0
    if m == 0:
        return None
    cdef int64_t* targets = <int64_t*>malloc((slots + 1) * sizeof(int64_t))
    cdef int64_t* start = <int64_t*>malloc((slots + 1) * sizeof(int64_t))
    cdef int64_t* items = _group(assign, ring_size, start)
    cdef Py_ssize_t nt = 0
    try:
        for r in range(slots):
            if ring_size[r] > 0:
                targets[nt] = r
                nt += 1
                _top_push(&top, ring_load[r], r)
                viol0 += _exc(ring_load[r], cap)
            elif empty < 0:
                empty = r
                targets[nt] = r
                nt += 1
        for e in range(m):
            a = assign[e]
            u = eu[e]
            v = ev[e]
            dw = de[e]
            la = ring_load[a]
            na = la - dw
            ea = _exc(la, cap)
            ena = _exc(na, cap)
            leaves_empty = ring_size[a] == 1
            lose = (1 if inc[a, u] == 1 else 0) + (1 if inc[a, v] == 1 else 0)
            for bi in range(nt):
                b = targets[bi]
                if b == a:
                    continue
                opening = ring_size[b] == 0
                if opening and leaves_empty:
                    continue
                lb = ring_load[b]
                nb = lb + dw
                z0 = adm - lose + (1 if inc[b, u] == 0 else 0) + (1 if inc[b, v] == 0 else 0)
                other = _other_max(&top, a, b)
                bn = _max3(other, na, nb)
                viol = viol0 - ea - _exc(lb, cap) + ena + _exc(nb, cap)
                feas = viol == 0
                value = _objval(code, z0, bn, viol, feas, cur_feasible,
                                nb if opening else -1, cap, alpha, beta)
                _offer(&best, &any_best, 0, e, a, b, -1, value, feas, tabu[e, b] != 0, best_value)
                if feas or opening:
                    continue
                for fi in range(start[b], start[b + 1]):
                    f = items[fi]
                    u2 = eu[f]
                    v2 = ev[f]
                    df = de[f]
                    sa = la - dw + df
                    sb = lb - df + dw
                    nodes[0] = u; nodes[1] = v; nodes[2] = u2; nodes[3] = v2
                    delta = 0
                    for i in range(4):
                        node = nodes[i]
                        dup = False
                        for j in range(i):
                            if nodes[j] == node:
                                dup = True
                                break
                        if dup:
                            continue
                        in_e = (1 if node == u else 0) + (1 if node == v else 0)
                        in_f = (1 if node == u2 else 0) + (1 if node == v2 else 0)
                        old = inc[a, node]
                        delta += _presence_delta(old, old - in_e + in_f)
                        old = inc[b, node]
                        delta += _presence_delta(old, old - in_f + in_e)
                    bn = _max3(other, sa, sb)
                    viol = viol0 - ea - _exc(lb, cap) + _exc(sa, cap) + _exc(sb, cap)
                    feas = viol == 0
                    value = _objval(code, adm + delta, bn, viol, feas, cur_feasible, -1,
                                    cap, alpha, beta)
                    _offer(&best, &any_best, 1, e, a, b, f, value, feas,
                           tabu[e, b] != 0 or tabu[f, a] != 0, best_value)
    finally:
        free(targets)
        free(start)
        free(items)
    return _result(&best, &any_best)
