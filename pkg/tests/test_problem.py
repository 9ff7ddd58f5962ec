import dataclasses

import numpy as np
import pytest

from swarmrelay.energy import max_range_speed, swarm_travel_energy
from swarmrelay.link_budget import ServiceContext, service_rates
from swarmrelay.problem import (
    EvaluatedSolution,
    Evaluator,
    Solution,
    clamp_repair,
    constraint_violation,
    dominates,
    evaluate,
)

from conftest import random_solution


def ev_of(objs, feasible=True, violation=0.0):
    return EvaluatedSolution(solution=None, objectives=np.asarray(objs, float),
                             feasible=feasible, violation=violation)


# -- repair -------------------------------------------------------------------

def test_clamp_repair_examples(scenario):
    sol = random_solution(scenario, np.random.default_rng(0))
    sol.paa_w[0, 0] = 1.7
    sol.pos[0, 0, 2] = scenario.bounds[2, 0] - 50.0
    sol.recv = np.zeros(scenario.n_devices, dtype=int)  # 0.4 rounds to 0, clips to 1
    fixed = clamp_repair(sol, scenario)
    assert fixed.paa_w[0, 0] == 1.0
    assert fixed.pos[0, 0, 2] == scenario.bounds[2, 0]
    assert np.all(fixed.recv == 1)
    assert np.array_equal(fixed.order, sol.order)  # order untouched


def test_clamp_leaves_interior_values(scenario):
    sol = random_solution(scenario, np.random.default_rng(1))
    fixed = clamp_repair(sol, scenario)
    assert np.allclose(fixed.paa_w, sol.paa_w)
    assert np.allclose(fixed.pos, sol.pos)


# -- dominance ----------------------------------------------------------------

def test_dominates_examples():
    assert dominates(ev_of([1, 1, 1]), ev_of([2, 2, 2]))
    assert not dominates(ev_of([1, 2, 1]), ev_of([2, 1, 1]))
    assert not dominates(ev_of([2, 1, 1]), ev_of([1, 2, 1]))
    # feasibility first
    assert dominates(ev_of([9, 9, 9]), ev_of([0, 0, 0], feasible=False, violation=2.0))
    assert not dominates(ev_of([0, 0, 0], feasible=False, violation=2.0), ev_of([9, 9, 9]))
    # infeasible pair ordered by violation
    assert dominates(ev_of([5, 5, 5], False, 1.0), ev_of([0, 0, 0], False, 3.0))


def test_dominance_irreflexive_and_transitive():
    rng = np.random.default_rng(2)
    pool = [
        ev_of(rng.integers(0, 4, 3).astype(float),
              feasible=bool(rng.random() < 0.7),
              violation=float(rng.integers(0, 3)))
        for _ in range(40)
    ]
    for m in pool:
        if m.feasible:
            m.violation = 0.0
        elif m.violation == 0.0:
            m.violation = 1.0
    for a in pool:
        assert not dominates(a, a)
    for _ in range(3000):
        a, b, c = (pool[i] for i in rng.integers(0, len(pool), 3))
        if dominates(a, b) and dominates(b, c):
            assert dominates(a, c)


# -- evaluation ---------------------------------------------------------------

def test_evaluate_is_pure(scenario, quad10):
    sol = random_solution(scenario, np.random.default_rng(3))
    evaluator = Evaluator(scenario, quad10)
    a = evaluator.evaluate(sol)
    b = evaluator.evaluate(sol)
    assert np.array_equal(a.objectives, b.objectives)
    assert a.feasible == b.feasible and a.violation == b.violation


def test_coincident_uavs_flagged_infeasible(scenario, quad10):
    sol = random_solution(scenario, np.random.default_rng(4), spread=0.0)
    sol.pos[1, :, :] = sol.pos[0, :, :]
    out = evaluate(sol, scenario, quad10)
    assert out.violation > 0.0
    assert not out.feasible
    assert constraint_violation(sol.pos, scenario.d_min_uav) == pytest.approx(
        scenario.n_devices * scenario.d_min_uav
    )


def test_farther_column_costs_more_energy(scenario, quad10):
    rng = np.random.default_rng(5)
    sol = random_solution(scenario, rng)
    far = sol.copy()
    # push the whole column for one device further out, preserving separation
    far.pos[:, 2, 0] = np.clip(far.pos[:, 2, 0] + 30.0, *scenario.bounds[0])
    base = evaluate(sol, scenario, quad10)
    moved = evaluate(far, scenario, quad10)
    assert moved.f3 > base.f3


def test_rates_independent_of_visit_order(scenario, quad10):
    rng = np.random.default_rng(6)
    sol = random_solution(scenario, rng)
    shuffled = sol.copy()
    shuffled.order = rng.permutation(scenario.n_devices) + 1
    a = evaluate(sol, scenario, quad10)
    b = evaluate(shuffled, scenario, quad10)
    assert a.f1 == pytest.approx(b.f1, rel=0, abs=0)  # identical device/column pairing
    assert a.f2 == pytest.approx(b.f2, rel=0, abs=0)
    assert a.f3 != b.f3


def test_degenerate_column_still_evaluates(scenario, quad10):
    sol = random_solution(scenario, np.random.default_rng(7))
    sol.uvaa_w[:, 0] = 0.0
    out = evaluate(sol, scenario, quad10)
    assert out.degenerate
    assert np.isfinite(out.objectives).all()


def test_evaluate_pair_matches_single(scenario, quad10):
    rng = np.random.default_rng(8)
    a = random_solution(scenario, rng)
    b = a.copy()
    b.recv = rng.integers(1, scenario.n_uavs + 1, scenario.n_devices)
    b.order = rng.permutation(scenario.n_devices) + 1
    evaluator = Evaluator(scenario, quad10)
    ea, eb = evaluator.evaluate_pair(a, b)
    assert np.array_equal(ea.objectives, evaluator.evaluate(a).objectives)
    assert np.array_equal(eb.objectives, evaluator.evaluate(b).objectives)


def test_objectives_orientation(scenario, quad10):
    sol = random_solution(scenario, np.random.default_rng(9))
    out = evaluate(sol, scenario, quad10)
    assert out.objectives[0] == -out.f1
    assert out.objectives[1] == out.f2
    assert out.objectives[2] == out.f3
    assert out.f1 > 0 and out.f2 > 0 and out.f3 >= 0


def test_golden_pipeline_chain(scenario, quad5):
    """End-to-end: evaluate() equals the hand-chained per-service oracles."""
    sol = random_solution(scenario, np.random.default_rng(10))
    got = evaluate(sol, scenario, quad5)

    f1 = f2 = 0.0
    for d in range(scenario.n_devices):
        ctx = ServiceContext(scenario, d, int(sol.recv[d]), sol.pos[:, d, :],
                             sol.paa_w[:, d], sol.uvaa_w[:, d])
        r = service_rates(ctx, quad5)
        f1 += r.r_legit
        f2 += r.r_eaves
    f3 = swarm_travel_energy(sol.pos, scenario.uav_init, sol.order,
                             scenario.aero, max_range_speed(scenario.aero))
    assert got.f1 == pytest.approx(f1, rel=1e-7)
    assert got.f2 == pytest.approx(f2, rel=1e-7)
    assert got.f3 == pytest.approx(f3, rel=1e-9)


def test_golden_regression_triple(scenario, quad5):
    # frozen once from the oracle chain above on the bundled scenario
    sol = random_solution(scenario, np.random.default_rng(10))
    got = evaluate(sol, scenario, quad5)
    assert got.f1 == pytest.approx(84958487.15672074, rel=1e-6)
    assert got.f2 == pytest.approx(88485797.00356022, rel=1e-6)
    assert got.f3 == pytest.approx(3537.1893744333443, rel=1e-6)


def test_solution_flat_round_trip(scenario):
    sol = random_solution(scenario, np.random.default_rng(11))
    flat = sol.to_flat()
    back = Solution.from_flat(flat, scenario.paa.n_elements, scenario.n_uavs,
                              scenario.n_devices)
    assert np.array_equal(back.paa_w, sol.paa_w)
    assert np.array_equal(back.recv, sol.recv)
    assert np.array_equal(back.uvaa_w, sol.uvaa_w)
    assert np.array_equal(back.pos, sol.pos)
    assert np.array_equal(back.order, sol.order)
