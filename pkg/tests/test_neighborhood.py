import random

import numpy as np
import pytest

from conftest import t1
from sonetls import kernels
from sonetls import _kernels_py
from sonetls.instance import Edge, Instance, generate_goldschmidt, generate_lee
from sonetls.model import IdpSolution, SrapSolution, idp_report, srap_report
from sonetls.neighborhood import (Move, StaleMoveError, apply_move, best_move, delta_evaluate,
                                  enumerate_moves, relocate, relocate_targets, swap)
from sonetls.objective import KINDS, ObjectiveSpec

Z5 = ObjectiveSpec("z5")


def test_conditional_swap_example():
    sol = SrapSolution(t1(), [0, 1, 2])
    moves = list(enumerate_moves(sol, Z5))
    first = [m for m in moves if m.item_a == 0 and m.to_a == 1]
    assert (first[0].kind, first[0].from_a) == ("relocate", 0) and not first[0].candidate_feasible
    assert first[0].value == 2 + 1  # two rings, ring {1,2} over by 1
    assert [m.item_b for m in first[1:]] == [1]


def test_all_in_one_offers_one_empty_ring():
    sol = SrapSolution(t1(), [0, 0, 0])
    moves = list(enumerate_moves(sol, Z5))
    assert [(m.kind, m.item_a, m.to_a) for m in moves] == [("relocate", i, 1) for i in range(3)]


def test_single_node_has_no_moves():
    sol = SrapSolution(Instance(1, [], 5), [0])
    assert list(enumerate_moves(sol, Z5)) == []
    assert best_move(sol, Z5) is None


def test_relocate_targets_on_four_nodes():
    inst = Instance(4, [Edge(1, 2, 1), Edge(3, 4, 1)], 10)
    sol = SrapSolution(inst, [0, 0, 2, 3])
    assert relocate_targets(sol, 0) == [1, 2, 3]
    assert relocate_targets(sol, 2) == [0, 3]  # singleton: no hop to another empty slot


def test_delta_examples():
    sol = SrapSolution(t1(), [0, 0, 1])
    value, feas = delta_evaluate(sol, relocate(2, 1, 0), ObjectiveSpec("z3"))
    assert (value, feas) == (1 * 10 + 18, False)

    idp = IdpSolution(t1(5), [0, 1, 0])
    value, feas = delta_evaluate(idp, relocate(1, 1, 0), Z5)
    assert not feas and value == (5 - 2) + 4


def _recompute(sol, move, spec, cur_feas):
    after = sol.copy()
    apply_move(after, move)
    rep = after.report()
    opened = move.kind == "relocate" and sol.ring_size[move.to_a] == 0
    from sonetls.objective import objective_value
    return objective_value(spec.code, after.z0, rep.bn, rep.total_violation, rep.feasible,
                           cur_feas, rep.ring_loads[move.to_a] if opened else -1,
                           sol.capacity, spec.alpha, spec.beta), rep.feasible


@pytest.mark.parametrize("problem", ["srap", "idp"])
def test_enumeration_values_match_recompute(problem):
    rng = random.Random(5)
    for trial in range(30):
        if problem == "srap":
            inst = generate_goldschmidt(15, "low", "random", 0.4, trial)
            sol = SrapSolution(inst, [rng.randrange(5) for _ in range(inst.n)])
        else:
            inst = generate_lee(15, 30, trial)
            sol = IdpSolution(inst, [rng.randrange(6) for _ in range(inst.m)])
        spec = ObjectiveSpec(KINDS[trial % 5], alpha=1.5, beta=3.0)
        cur = sol.feasible
        moves = list(enumerate_moves(sol, spec))
        for m in moves:
            assert (m.value, m.candidate_feasible) == _recompute(sol, m, spec, cur)
        # swaps appear exactly after infeasible relocates to the same ring
        relocs = {(m.item_a, m.to_a): m.candidate_feasible for m in moves if m.kind == "relocate"}
        swaps = {(m.item_a, m.to_a) for m in moves if m.kind == "swap"}
        for key, feas in relocs.items():
            has_partners = sol.ring_size[key[1]] > 0
            assert (key in swaps) == (not feas and has_partners)


def test_apply_inverse_restores_state():
    rng = random.Random(2)
    inst = generate_goldschmidt(15, "low", "random", 0.4, 2)
    sol = SrapSolution(inst, [rng.randrange(4) for _ in range(inst.n)])
    before = sol.state()
    for m in list(enumerate_moves(sol, Z5))[:60]:
        v0, _ = delta_evaluate(sol, m, Z5)
        apply_move(sol, m)
        apply_move(sol, m.inverse())
        assert sol.state() == before
        assert delta_evaluate(sol, m, Z5)[0] == v0


def test_apply_keeps_aggregates_exact():
    inst = t1()
    sol = SrapSolution(inst, [0, 1, 2])
    apply_move(sol, relocate(0, 0, 1))
    rep = srap_report(inst, sol.assign.tolist())
    assert sol.k == 2 and sol.federal == rep.federal_load
    assert [int(sol.ring_load[r]) for r in rep.ring_loads] == list(rep.ring_loads.values())


def test_stale_move_rejected():
    sol = SrapSolution(t1(), [0, 1, 2])
    mv = relocate(0, 0, 1)
    apply_move(sol, mv)
    with pytest.raises(StaleMoveError):
        apply_move(sol, mv)
    with pytest.raises(StaleMoveError):
        apply_move(sol, swap(1, 1, 2, 0))


def _reference_best(sol, spec, tabu, best_value):
    best = fallback = None
    for m in enumerate_moves(sol, spec):
        is_tabu = tabu[m.item_a, m.to_a] or (m.kind == "swap" and tabu[m.item_b, m.from_a])
        if fallback is None or m.value < fallback.value:
            fallback = m
        if (not is_tabu or m.value < best_value) and (best is None or m.value < best.value):
            best = m
    return best or fallback


@pytest.mark.parametrize("backend", sorted(kernels.backends()))
@pytest.mark.parametrize("problem", ["srap", "idp"])
def test_scan_matches_reference(backend, problem):
    mod = kernels.backends()[backend]
    rng = random.Random(9)
    for trial in range(40):
        if problem == "srap":
            inst = generate_goldschmidt(15, rng.choice(["low", "high"]), "random", 0.4, trial)
            sol = SrapSolution(inst, [rng.randrange(rng.randint(1, 6)) for _ in range(inst.n)])
        else:
            inst = generate_lee(15, 30, trial)
            sol = IdpSolution(inst, [rng.randrange(rng.randint(1, 8)) for _ in range(inst.m)])
        spec = ObjectiveSpec(KINDS[trial % 5], alpha=1.5, beta=2.5)
        tabu = (np.array([[rng.random() < 0.2 for _ in range(sol.num_slots)]
                          for _ in range(sol.num_items)])).astype(np.int64)
        best_value = rng.choice([-np.inf, sol.z0 + 2.0, 1e18])
        got = best_move(sol, spec, tabu, best_value, backend=mod)
        want = _reference_best(sol, spec, tabu, best_value)
        assert got == want


def test_backends_agree_exactly():
    mods = kernels.backends()
    if "cython" not in mods:
        pytest.skip("compiled kernel not built")
    rng = random.Random(4)
    for trial in range(30):
        inst = generate_goldschmidt(25, "low", "geometric", 0.3, trial)
        sol = SrapSolution(inst, [rng.randrange(5) for _ in range(inst.n)])
        spec = ObjectiveSpec(KINDS[trial % 5], alpha=1.3, beta=2.7)
        tabu = np.zeros((inst.n, inst.n), dtype=np.int64)
        assert best_move(sol, spec, tabu, backend=mods["cython"]) == \
            best_move(sol, spec, tabu, backend=_kernels_py)


def test_python_backend_selected_by_env():
    import subprocess, sys
    out = subprocess.run([sys.executable, "-c", "import sonetls.kernels as k; print(k.BACKEND)"],
                         env={"SONETLS_PURE_PYTHON": "1", "PATH": ""}, capture_output=True, text=True)
    assert out.stdout.strip() == "python"


def test_idp_report_after_moves():
    inst = t1(5)
    sol = IdpSolution(inst, [0, 1, 2])
    apply_move(sol, relocate(2, 2, 0))
    assert sol.adm == 5 and idp_report(inst, sol).feasible
