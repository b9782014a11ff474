import itertools
import random

import pytest

from conftest import t1
from sonetls.instance import Edge, Instance
from sonetls.model import idp_report, idp_z0, srap_lower_bound, srap_report
from sonetls.oracle import idp_optimum, srap_optimum


def test_srap_examples():
    assert srap_optimum(t1(10))[0] == 3
    assert srap_optimum(t1(20))[0] == 1
    assert srap_optimum(t1(4)) is None


def test_idp_examples():
    adm, witness = idp_optimum(t1(5))
    assert adm == 5 and idp_report(t1(5), witness).feasible
    assert idp_optimum(t1(9))[0] == 3
    assert idp_optimum(t1(3)) is None


def test_size_limits():
    big = Instance(11, [], 5)
    with pytest.raises(ValueError):
        srap_optimum(big)
    many = Instance(6, [Edge(u, v, 1) for u, v in itertools.combinations(range(1, 7), 2)], 5)
    with pytest.raises(ValueError):
        idp_optimum(many)


def _partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


def _naive(inst, problem):
    count = inst.n if problem == "srap" else inst.m
    best = None
    for part in _partitions(list(range(count))):
        assign = [0] * count
        for r, block in enumerate(part):
            for i in block:
                assign[i] = r
        rep = (srap_report if problem == "srap" else idp_report)(inst, assign)
        if rep.feasible:
            z0 = len(part) if problem == "srap" else idp_z0(inst, assign)
            best = z0 if best is None else min(best, z0)
    return best


@pytest.mark.parametrize("seed", range(40))
def test_pruned_walk_matches_naive_enumeration(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 6)
    edges = [Edge(u, v, rng.randint(1, 20)) for u, v in itertools.combinations(range(1, n + 1), 2)
             if rng.random() < 0.6][:7]
    inst = Instance(n, edges, rng.randint(10, 60))
    s = srap_optimum(inst)
    assert (s[0] if s else None) == _naive(inst, "srap")
    if s:
        assert s[0] >= srap_lower_bound(inst) and srap_report(inst, s[1]).feasible
    if inst.m:
        i = idp_optimum(inst)
        assert (i[0] if i else None) == _naive(inst, "idp")
