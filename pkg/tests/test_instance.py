import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sonetls.instance import (Edge, Instance, InstanceError, decode_points, generate_goldschmidt,
                              generate_lee, geometric_radius, parse_instance, serialize_instance,
                              threshold_edges, unit_square_distance_cdf)


def test_parse_t1(T1):
    assert (T1.n, T1.m, T1.capacity) == (3, 3, 10)
    assert [(e.u, e.v, e.demand) for e in T1.edges] == [(1, 2, 2), (1, 3, 4), (2, 3, 3)]
    assert T1.total_demand == 9
    assert T1.node_weights().tolist() == [6, 5, 7]


@pytest.mark.parametrize("text, fragment, line", [
    ("2 1 5\n1 1 3", "self-loop", 2),
    ("3 2 10\n1 2 2\n2 1 4", "duplicate", 3),
    ("3 1 10\n1 4 2", "range", 2),
    ("3 1 10\n1 2 0", "demand", 2),
    ("3 1 0\n1 2 1", "capacity", 1),
    ("3 x 10\n", "", 1),
    ("3 2 10\n1 2 2\n", "", None),
    ("3 1 10\n1 2 2\n2 3 3\n", "", None),
])
def test_parse_errors_carry_line(text, fragment, line):
    with pytest.raises(InstanceError) as err:
        parse_instance(text)
    assert fragment in str(err.value).lower()
    if line is not None:
        assert err.value.line == line


def test_parse_normalizes_and_reads_sidecar():
    inst = parse_instance("# id=abc\n# family=lee\n# seed=4\n3 2 9\n# note\n3 1 5\n2 1 1\n")
    assert inst.id == "abc" and inst.family == "lee" and inst.meta == {"seed": "4"}
    assert [(e.u, e.v) for e in inst.edges] == [(1, 2), (1, 3)]


def test_round_trip_t1(T1):
    again = parse_instance(serialize_instance(T1))
    assert again == T1


def test_empty_instance_serializes_header_only():
    inst = Instance(3, [], 7)
    text = serialize_instance(inst)
    body = [line for line in text.splitlines() if not line.startswith("#")]
    assert body == ["3 0 7"]
    assert parse_instance(text) == inst


def test_instance_validation():
    with pytest.raises(InstanceError):
        Instance(2, [Edge(1, 2, 1)], 5, family="bogus")
    with pytest.raises(InstanceError):
        Instance(2, [Edge(1, 2, 1)], 5, id="has space")


def test_goldschmidt_complete_low():
    inst = generate_goldschmidt(15, "low", "random", 1.0, 7)
    assert inst.m == 105 and inst.capacity == 310
    assert {e.demand for e in inst.edges} <= {9, 12, 15, 18, 21}


def test_goldschmidt_high_range():
    inst = generate_goldschmidt(15, "high", "random", 0.3, 7)
    assert inst.capacity == 1244
    assert {e.demand for e in inst.edges} <= set(range(33, 52, 3))


@pytest.mark.parametrize("topology", ["random", "geometric"])
def test_goldschmidt_deterministic(topology):
    a = generate_goldschmidt(15, "low", topology, 0.3, 7)
    b = generate_goldschmidt(15, "low", topology, 0.3, 7)
    assert serialize_instance(a) == serialize_instance(b)
    assert serialize_instance(a) != serialize_instance(generate_goldschmidt(15, "low", topology, 0.3, 8))


@pytest.mark.parametrize("seed", range(5))
def test_geometric_edges_recheck_from_points(seed):
    inst = generate_goldschmidt(25, "low", "geometric", 0.3, seed)
    again = parse_instance(serialize_instance(inst))
    pts = decode_points(again.meta["points"])
    r = float(again.meta["radius"])
    assert pts.shape == (25, 2)
    expected = {(u, v) for u in range(1, 26) for v in range(u + 1, 26)
                if math.dist(pts[u - 1], pts[v - 1]) <= r}
    assert {(e.u, e.v) for e in again.edges} == expected
    assert set(threshold_edges(pts, r)) == expected


def test_distance_cdf_against_sampling():
    rng = np.random.default_rng(0)
    a, b = rng.random((200_000, 2)), rng.random((200_000, 2))
    dist = np.hypot(*(a - b).T)
    for r in (0.1, 0.3, 0.5, 0.9, 1.2):
        assert unit_square_distance_cdf(r) == pytest.approx(np.mean(dist <= r), abs=4e-3)
    assert unit_square_distance_cdf(0) == 0
    assert unit_square_distance_cdf(math.sqrt(2)) == pytest.approx(1.0)


@pytest.mark.parametrize("density", [0.05, 0.3, 0.7, 1.0])
def test_geometric_radius_inverts_cdf(density):
    assert unit_square_distance_cdf(geometric_radius(density)) == pytest.approx(density, abs=1e-9)


def test_lee_examples():
    inst = generate_lee(15, 30, 1)
    assert inst.m == 30 and inst.capacity == 48
    assert all(1 <= e.demand <= 30 for e in inst.edges)
    assert generate_lee(15, 105, 1).m == 105
    with pytest.raises(InstanceError):
        generate_lee(15, 106, 1)
    with pytest.raises(InstanceError):
        generate_lee(16, 30, 1)


@settings(max_examples=40, deadline=None)
@given(n=st.sampled_from([15, 20, 25]), m=st.sampled_from([30, 35]), seed=st.integers(0, 10**6))
def test_lee_round_trip(n, m, seed):
    inst = generate_lee(n, m, seed)
    assert parse_instance(serialize_instance(inst)) == inst
    assert serialize_instance(inst) == serialize_instance(generate_lee(n, m, seed))


def test_induced_relabels(T1):
    sub = T1.induced([2, 3])
    assert sub.n == 2 and [(e.u, e.v, e.demand) for e in sub.edges] == [(1, 2, 3)]
