"""Demand graphs, the instance text format, and benchmark generators."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

FAMILIES = ("geometric", "random", "lee", "external")

# 0.5 Mbs per demand unit; one T1 line (1.5 Mbs) is 3 units.
T1_UNITS = 3
GOLDSCHMIDT_CAPACITY = {"low": 310, "high": 1244}
GOLDSCHMIDT_T1_RANGE = {"low": (3, 7), "high": (11, 17)}
GOLDSCHMIDT_SIZES = (15, 25, 30, 50)

LEE_CAPACITY = 48
LEE_DEMAND_RANGE = (1, 30)
LEE_SIZES = (15, 20, 25)
LEE_EDGE_COUNTS = (30, 35)


class InstanceError(ValueError):
    """Raised for malformed instance text or invalid generator arguments."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True, order=True)
class Edge:
    u: int
    v: int
    demand: int


@dataclass(frozen=True)
class Instance:
    """Undirected demand graph on nodes 1..n with ring capacity ``capacity``.

    Edges are normalized to ``u < v`` and kept sorted by ``(u, v)``, so two
    instances with the same edge set compare equal regardless of input order.
    """

    n: int
    edges: tuple[Edge, ...]
    capacity: int
    id: str = "instance"
    family: str = "external"
    meta: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.n < 0:
            raise InstanceError("node count must be non-negative")
        if self.capacity < 1:
            raise InstanceError("capacity must be >= 1")
        if self.family not in FAMILIES:
            raise InstanceError(f"unknown family {self.family!r}")
        if not self.id or any(c.isspace() for c in self.id):
            raise InstanceError(f"instance id must be a non-empty token, got {self.id!r}")
        norm = []
        seen = set()
        for e in self.edges:
            u, v = (e.u, e.v) if e.u < e.v else (e.v, e.u)
            _check_edge(u, v, e.demand, self.n, seen)
            norm.append(Edge(u, v, e.demand))
        object.__setattr__(self, "edges", tuple(sorted(norm)))
        object.__setattr__(self, "meta", dict(self.meta))

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def total_demand(self) -> int:
        return sum(e.demand for e in self.edges)

    def demand_matrix(self) -> np.ndarray:
        """Dense symmetric 0-based ``n x n`` demand matrix."""
        d = np.zeros((self.n, self.n), dtype=np.int64)
        for e in self.edges:
            d[e.u - 1, e.v - 1] = e.demand
            d[e.v - 1, e.u - 1] = e.demand
        return d

    def node_weights(self) -> np.ndarray:
        """``w(u) = sum_v d_uv`` for every node (0-based)."""
        w = np.zeros(self.n, dtype=np.int64)
        for e in self.edges:
            w[e.u - 1] += e.demand
            w[e.v - 1] += e.demand
        return w

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=np.int64)
        for e in self.edges:
            deg[e.u - 1] += 1
            deg[e.v - 1] += 1
        return deg

    def induced(self, nodes: Iterable[int], id: str | None = None) -> "Instance":
        """Subgraph induced by ``nodes`` (1-based), relabelled 1..len(nodes)."""
        keep = sorted(set(nodes))
        relabel = {old: new for new, old in enumerate(keep, start=1)}
        edges = [Edge(relabel[e.u], relabel[e.v], e.demand)
                 for e in self.edges if e.u in relabel and e.v in relabel]
        meta = dict(self.meta)
        meta["induced_from"] = self.id
        meta["induced_nodes"] = ",".join(map(str, keep))
        return Instance(len(keep), tuple(edges), self.capacity,
                        id=id or f"{self.id}-sub{len(keep)}", family=self.family, meta=meta)

    def with_capacity(self, capacity: int) -> "Instance":
        return Instance(self.n, self.edges, capacity, id=self.id, family=self.family, meta=self.meta)


def _check_edge(u: int, v: int, d: int, n: int, seen: set, line: int | None = None) -> None:
    if u == v:
        raise InstanceError(f"self-loop on node {u}", line)
    if not (1 <= u <= n and 1 <= v <= n):
        raise InstanceError(f"endpoint out of range [1, {n}]: ({u}, {v})", line)
    if d < 1:
        raise InstanceError(f"non-positive demand {d} on ({u}, {v})", line)
    if (u, v) in seen:
        raise InstanceError(f"duplicate edge ({u}, {v})", line)
    seen.add((u, v))


def _int(tok: str, what: str, line: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise InstanceError(f"expected integer {what}, got {tok!r}", line) from None


def parse_instance(text: str | bytes) -> Instance:
    """Parse the ``<n> <m> <B>`` / ``<u> <v> <d>`` text format.

    Lines starting with ``#`` are comments; ``# key=value`` comments form the
    sidecar block carrying ``id``, ``family`` and free-form metadata.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    header = None
    edges: list[Edge] = []
    seen: set = set()
    meta: dict[str, str] = {}
    expected = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                key, _, value = body.partition("=")
                meta[key.strip()] = value.strip()
            continue
        toks = line.split()
        if len(toks) != 3:
            raise InstanceError(f"expected 3 fields, got {len(toks)}", lineno)
        if header is None:
            n, m, b = (_int(t, name, lineno) for t, name in zip(toks, ("n", "m", "B")))
            if n < 0 or m < 0:
                raise InstanceError("negative node or edge count", lineno)
            if b < 1:
                raise InstanceError(f"non-positive capacity {b}", lineno)
            header = (n, m, b)
            expected = m
            continue
        if len(edges) >= expected:
            raise InstanceError(f"more edge lines than the declared m={expected}", lineno)
        u, v, d = (_int(t, name, lineno) for t, name in zip(toks, ("u", "v", "demand")))
        if u > v:
            u, v = v, u
        _check_edge(u, v, d, header[0], seen, lineno)
        edges.append(Edge(u, v, d))
    if header is None:
        raise InstanceError("missing header line '<n> <m> <B>'")
    if len(edges) != expected:
        raise InstanceError(f"declared m={expected} but found {len(edges)} edge lines")
    inst_id = meta.pop("id", "instance")
    family = meta.pop("family", "external")
    try:
        return Instance(header[0], tuple(edges), header[2], id=inst_id, family=family, meta=meta)
    except InstanceError as exc:
        raise InstanceError(f"sidecar: {exc}") from None


def serialize_instance(inst: Instance) -> str:
    lines = [f"# id={inst.id}", f"# family={inst.family}"]
    lines += [f"# {k}={v}" for k, v in sorted(inst.meta.items())]
    lines.append(f"{inst.n} {inst.m} {inst.capacity}")
    lines += [f"{e.u} {e.v} {e.demand}" for e in inst.edges]
    return "\n".join(lines) + "\n"


def unit_square_distance_cdf(r: float) -> float:
    """P(|X - Y| <= r) for X, Y independent uniform points in the unit square."""
    if r <= 0:
        return 0.0
    if r >= math.sqrt(2):
        return 1.0
    r2 = r * r
    if r <= 1:
        return math.pi * r2 - 8.0 / 3.0 * r2 * r + 0.5 * r2 * r2
    s = math.sqrt(r2 - 1)
    return (1.0 / 3.0 - 2 * r2 - 0.5 * r2 * r2 + 4.0 / 3.0 * (2 * r2 + 1) * s
            + 2 * r2 * (math.asin(1 / r) - math.acos(1 / r)))


def geometric_radius(density: float, tol: float = 1e-12) -> float:
    """Radius whose expected pair-inclusion probability equals ``density``."""
    if not 0 < density <= 1:
        raise InstanceError(f"density must lie in (0, 1], got {density}")
    if density == 1:
        return math.sqrt(2)
    lo, hi = 0.0, math.sqrt(2)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if unit_square_distance_cdf(mid) < density:
            lo = mid
        else:
            hi = mid
    return hi


def threshold_edges(points: np.ndarray, radius: float) -> list[tuple[int, int]]:
    """1-based pairs ``(u, v)`` with Euclidean distance at most ``radius``."""
    n = len(points)
    pairs = []
    for i in range(n):
        for j in range(i + 1, n):
            dx = points[i, 0] - points[j, 0]
            dy = points[i, 1] - points[j, 1]
            if math.hypot(dx, dy) <= radius:
                pairs.append((i + 1, j + 1))
    return pairs


def encode_points(points: np.ndarray) -> str:
    return ";".join(f"{float(x)!r},{float(y)!r}" for x, y in points)


def decode_points(text: str) -> np.ndarray:
    if not text:
        return np.zeros((0, 2))
    return np.array([[float(c) for c in p.split(",")] for p in text.split(";")])


def generate_goldschmidt(n: int, demand_class: str, topology: str, density: float = 0.3,
                         seed: int = 0) -> Instance:
    """Goldschmidt-style SRAP benchmark instance.

    Demands are a uniform number of T1 lines times 3 units; capacity is
    155 Mbs (low) or 622 Mbs (high) at 0.5 Mbs per unit.
    """
    if n not in GOLDSCHMIDT_SIZES:
        raise InstanceError(f"n must be one of {GOLDSCHMIDT_SIZES}, got {n}")
    if demand_class not in GOLDSCHMIDT_CAPACITY:
        raise InstanceError(f"demand class must be low or high, got {demand_class!r}")
    if topology not in ("geometric", "random"):
        raise InstanceError(f"topology must be geometric or random, got {topology!r}")
    if not 0 < density <= 1:
        raise InstanceError(f"density must lie in (0, 1], got {density}")
    rng = np.random.default_rng(seed)
    meta = {"seed": str(seed), "n": str(n), "demand": demand_class,
            "topology": topology, "density": repr(float(density))}
    if topology == "random":
        pairs = [(u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1)]
        keep = rng.random(len(pairs)) < density
        pairs = [p for p, k in zip(pairs, keep) if k]
    else:
        points = rng.random((n, 2))
        radius = geometric_radius(density)
        pairs = threshold_edges(points, radius)
        meta["radius"] = repr(radius)
        meta["points"] = encode_points(points)
    lo, hi = GOLDSCHMIDT_T1_RANGE[demand_class]
    lines = rng.integers(lo, hi + 1, size=len(pairs))
    edges = tuple(Edge(u, v, int(t) * T1_UNITS) for (u, v), t in zip(pairs, lines))
    inst_id = f"gold-{topology}-{demand_class}-n{n}-d{density:g}-s{seed}"
    return Instance(n, edges, GOLDSCHMIDT_CAPACITY[demand_class], id=inst_id,
                    family=topology, meta=meta)


def generate_lee(n: int, m: int, seed: int = 0, strict_sizes: bool = True) -> Instance:
    """Lee-style IDP benchmark: ``m`` distinct uniform pairs, demands in [1, 30] T1 lines."""
    if strict_sizes and n not in LEE_SIZES:
        raise InstanceError(f"n must be one of {LEE_SIZES}, got {n}")
    pair_count = n * (n - 1) // 2
    if m < 0 or m > pair_count:
        raise InstanceError(f"m={m} exceeds the {pair_count} node pairs of n={n}")
    rng = random.Random(seed)
    pairs = [(u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1)]
    chosen = rng.sample(pairs, m)
    lo, hi = LEE_DEMAND_RANGE
    edges = tuple(Edge(u, v, rng.randint(lo, hi)) for u, v in chosen)
    meta = {"seed": str(seed), "n": str(n), "m": str(m)}
    return Instance(n, edges, LEE_CAPACITY, id=f"lee-n{n}-m{m}-s{seed}", family="lee", meta=meta)
