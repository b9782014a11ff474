import random

import pytest

from conftest import t1
from sonetls.instance import generate_goldschmidt, generate_lee
from sonetls.model import SrapSolution, report
from sonetls.objective import KINDS, ObjectiveSpec
from sonetls.search import (SearchConfig, TabuList, classify, dmn, dmn2, empty_ring, random_moves,
                            restart_driver, run_search, solve, tabu_search)

Z5 = ObjectiveSpec("z5")


def cfg(**kw):
    kw.setdefault("time_limit", 1.0)
    return SearchConfig(**kw)


def test_tabu_search_reaches_t1_optimum():
    res = tabu_search(t1(), "srap", cfg(algorithm="bts", tenure=2))
    assert res.feasible and res.best == 3 and res.status == "feasible"
    assert report(t1(), res.solution).feasible


def test_zero_budget_returns_start():
    res = run_search(t1(), "srap", cfg(time_limit=1e-9))
    assert res.iterations == 0 and res.best == 1 and not res.feasible
    assert res.best_objective == 9 and res.status == "timeout"


def test_proven_infeasible_status():
    res = run_search(t1(4), "srap", cfg())
    assert not res.feasible and res.status == "infeasible" and res.iterations == 0
    res = run_search(t1(3), "idp", cfg())
    assert res.status == "infeasible"


def test_dmn_diversifies_and_finds_optimum():
    inst = generate_goldschmidt(15, "low", "random", 0.3, 3)  # certified bound 3 is not reached
    res = dmn(inst, "srap", cfg(max_nonimproving=1, max_iterations=300, time_limit=30))
    assert res.diversifications > 0 and res.feasible
    assert dmn(t1(), "srap", cfg(max_nonimproving=1)).best == 3


def test_dmn2_stops_at_lower_bound():
    res = dmn2(t1(20), "srap", cfg())
    assert res.status == "optimal" and res.best == 1 and res.stop_reason == "lower_bound"
    res = dmn2(t1(), "srap", cfg())
    assert res.best == 3 and res.feasible  # k_lb = 1 is out of reach


def test_restart_driver():
    assert restart_driver(t1(20), "srap", cfg()).status == "optimal"
    res = restart_driver(t1(), "srap", cfg())
    assert res.best == 3 and res.feasible


def test_restart_driver_shares_budget():
    inst = generate_goldschmidt(25, "low", "geometric", 0.3, 1)
    res = restart_driver(inst, "srap", cfg(algorithm="bts", time_limit=0.5, max_nonimproving=5))
    assert res.restarts > 0 and res.wall_time < 0.5 + 0.25


@pytest.mark.parametrize("algo", ["bts", "dmn", "dmn2"])
@pytest.mark.parametrize("problem", ["srap", "idp"])
def test_determinism(algo, problem):
    inst = generate_goldschmidt(15, "low", "random", 0.3, 2) if problem == "srap" else generate_lee(15, 30, 2)
    c = cfg(algorithm=algo, seed=11, max_iterations=250, time_limit=60, start="random")
    a, b = run_search(inst, problem, c), run_search(inst, problem, c)
    assert a.signature() == b.signature() and a.history == b.history


@pytest.mark.parametrize("kind", KINDS)
def test_history_monotone_and_best_verified(kind):
    inst = generate_goldschmidt(15, "low", "geometric", 0.3, 3)
    res = run_search(inst, "srap", cfg(objective=ObjectiveSpec(kind), max_iterations=400, time_limit=60))
    values = [v for _, v in res.history]
    assert values == sorted(values, reverse=True)
    if res.feasible:
        assert report(inst, res.solution).feasible and res.solution.z0 == res.best


def test_status_matches_bounds():
    assert classify(True, 3, 3, False) == "optimal"
    assert classify(True, 4, 3, False) == "high_quality"
    assert classify(True, 5, 3, False) == "feasible"
    assert classify(False, None, 3, True) == "infeasible"
    assert classify(False, None, 3, False) == "timeout"


def test_tabu_list_fifo():
    tl = TabuList(2, 3, 3)
    tl.push(0, 1)
    tl.push(1, 2)
    tl.push(2, 0)
    assert len(tl) == 2 and (0, 1) not in tl and (1, 2) in tl and (2, 0) in tl
    zero = TabuList(0, 3, 3)
    zero.push(0, 1)
    assert len(zero) == 0


def test_empty_ring_contract():
    rng = random.Random(0)
    inst = generate_goldschmidt(15, "low", "random", 0.3, 0)
    for _ in range(20):
        sol = SrapSolution(inst, [rng.randrange(4) for _ in range(inst.n)])
        k = sol.k
        p = empty_ring(sol, Z5, rng)
        assert sol.ring_size[p] == 0 and sol.k == k - 1
    assert empty_ring(SrapSolution(inst, [0] * inst.n), Z5, rng) is None


def test_random_moves_count_in_range():
    rng = random.Random(1)
    inst = generate_goldschmidt(15, "low", "random", 0.3, 0)
    sol = SrapSolution(inst, [i % 5 for i in range(inst.n)])
    for _ in range(200):
        k = sol.ring_count
        assert 1 <= random_moves(sol, rng) <= max(1, k)


@pytest.mark.parametrize("kwargs", [{"algorithm": "xts"}, {"start": "klb"}, {"tenure": -1},
                                    {"max_nonimproving": 0}, {"time_limit": 0}])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        SearchConfig(**kwargs)


def test_idp_search_and_warm_start():
    inst = generate_lee(15, 30, 5)
    res = solve(inst, "idp", cfg(time_limit=0.5))
    assert res.feasible and res.best >= res.lower_bound
    warm = SrapSolution(t1(), [0, 1, 2])
    res = solve(t1(), "srap", cfg(time_limit=1e-9), initial=warm)
    assert res.feasible and res.best == 3
