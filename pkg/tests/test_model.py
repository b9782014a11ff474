import random

import pytest

from conftest import t1
from sonetls.instance import Edge, Instance, generate_goldschmidt, generate_lee
from sonetls.model import (IdpSolution, SolutionError, SrapSolution, certified_bound, format_solution,
                           idp_certified_bound, idp_lower_bound, idp_report, idp_z0, parse_solution,
                           proven_infeasible, srap_certified_bound, srap_lower_bound, srap_report,
                           srap_z0)
from sonetls.oracle import idp_optimum, srap_optimum

EDGELESS = Instance(3, [], 10)
STAR = Instance(4, [Edge(1, 2, 1), Edge(1, 3, 1), Edge(1, 4, 1)], 10)


def test_srap_lower_bound():
    assert srap_lower_bound(t1()) == 1
    assert srap_lower_bound(t1(4)) == 3
    assert srap_lower_bound(EDGELESS) == 0


def test_idp_lower_bound():
    assert idp_lower_bound(t1()) == 3
    assert idp_lower_bound(EDGELESS) == 0
    assert idp_lower_bound(STAR) == 4


def test_srap_report_examples(T1):
    rep = srap_report(T1, [0, 0, 0])
    assert list(rep.ring_loads.values()) == [18]
    assert (rep.federal_load, rep.total_violation, rep.feasible) == (0, 8, False)

    rep = srap_report(T1, [0, 1, 2])
    assert list(rep.ring_loads.values()) == [6, 5, 7]
    assert (rep.federal_load, rep.feasible) == (9, True)

    rep = srap_report(T1, [0, 0, 1])
    assert list(rep.ring_loads.values()) == [11, 7]
    assert (rep.federal_load, rep.total_violation, rep.feasible) == (7, 1, False)


def test_idp_report_examples():
    inst = t1(5)
    # canonical edge order: (1,2), (1,3), (2,3)
    rep = idp_report(inst, [0, 1, 0])
    assert list(rep.ring_loads.values()) == [5, 4] and rep.feasible
    assert idp_z0(inst, [0, 1, 0]) == 5
    rep = idp_report(inst, [0, 0, 0])
    assert list(rep.ring_loads.values()) == [9] and rep.total_violation == 4
    rep = idp_report(inst, [0, 1, 2])
    assert sorted(rep.ring_loads.values()) == [2, 3, 4] and rep.feasible
    assert idp_z0(inst, [0, 1, 2]) == 6


def test_z0(T1):
    assert srap_z0(SrapSolution(T1, [0, 1, 2])) == 3
    assert srap_z0([0, 0, 0]) == 1
    assert IdpSolution(T1, [0, 1, 2]).z0 == 6


def test_solution_rejects_bad_slots(T1):
    with pytest.raises(SolutionError):
        SrapSolution(T1, [0, 1])
    with pytest.raises(SolutionError):
        SrapSolution(T1, [0, 1, 3])


def _scratch_srap(sol):
    inst = sol.inst
    assign = [int(r) for r in sol.assign]
    rep = srap_report(inst, assign)
    loads = [0] * inst.n
    for r, load in rep.ring_loads.items():
        loads[r] = load
    return loads, rep.federal_load, len(set(assign))


@pytest.mark.parametrize("seed", range(10))
def test_srap_incremental_matches_scratch(seed):
    rng = random.Random(seed)
    inst = generate_goldschmidt(15, "low", "random", 0.4, seed)
    sol = SrapSolution(inst, [rng.randrange(inst.n) for _ in range(inst.n)])
    for _ in range(300):
        sol.relocate(rng.randrange(inst.n), rng.randrange(inst.n))
        loads, federal, k = _scratch_srap(sol)
        assert sol.ring_load.tolist() == loads
        assert (sol.federal, sol.k) == (federal, k)
    fresh = SrapSolution(inst, sol.assign)
    assert fresh.state() == sol.state()


@pytest.mark.parametrize("seed", range(10))
def test_idp_incremental_matches_scratch(seed):
    rng = random.Random(seed)
    inst = generate_lee(15, 30, seed)
    sol = IdpSolution(inst, [rng.randrange(inst.m) for _ in range(inst.m)])
    for _ in range(300):
        sol.relocate(rng.randrange(inst.m), rng.randrange(inst.m))
        assert sol.adm == idp_z0(inst, sol.assign.tolist())
    assert IdpSolution(inst, sol.assign).state() == sol.state()


def test_copy_is_independent(T1):
    sol = SrapSolution(T1, [0, 1, 2])
    other = sol.copy()
    other.relocate(0, 1)
    assert sol.assign.tolist() == [0, 1, 2] and sol.ring_load.tolist() == [6, 5, 7]


def test_bn_includes_federal(T1):
    assert SrapSolution(T1, [0, 1, 2]).bn() == 9
    assert SrapSolution(T1, [0, 0, 0]).bn() == 18


def test_certified_bounds_sound_against_oracle():
    rng = random.Random(3)
    for _ in range(150):
        n = rng.randint(2, 7)
        edges = [Edge(u, v, rng.randint(1, 30)) for u in range(1, n + 1)
                 for v in range(u + 1, n + 1) if rng.random() < 0.6]
        inst = Instance(n, edges, rng.randint(20, 120))
        s = srap_optimum(inst)
        if s is not None:
            assert srap_lower_bound(inst) <= srap_certified_bound(inst) <= s[0]
        if inst.m and inst.m <= 8:
            i = idp_optimum(inst)
            if i is not None:
                assert idp_lower_bound(inst) <= idp_certified_bound(inst) <= i[0]
    assert certified_bound(t1(), "srap") == 3  # weights 6, 5, 7 pairwise exceed 10


def test_proven_infeasible():
    assert proven_infeasible(t1(4), "srap")
    assert not proven_infeasible(t1(10), "srap")
    assert proven_infeasible(t1(3), "idp")
    assert not proven_infeasible(t1(4), "idp")


def test_solution_file_round_trip(T1):
    sol = SrapSolution(T1, [2, 0, 2])
    text = format_solution(sol)
    assert text == "srap instance 2\n1 1\n2 2\n3 1\n"
    back = parse_solution(text, T1)
    a, b = srap_report(T1, back), srap_report(T1, sol)
    assert sorted(a.ring_loads.values()) == sorted(b.ring_loads.values())
    assert a.federal_load == b.federal_load and back.z0 == sol.z0
    idp = IdpSolution(T1, [1, 1, 0])
    assert parse_solution(format_solution(idp), T1).adm == idp.adm


@pytest.mark.parametrize("text", [
    "srap instance 1\n1 1\n2 1\n",
    "srap instance 1\n1 1\n2 1\n2 1\n3 1\n",
    "srap instance 1\n1 1\n2 1\n4 1\n",
    "rings 1\n1 1\n",
    "",
])
def test_parse_solution_errors(T1, text):
    with pytest.raises(SolutionError):
        parse_solution(text, T1)
