import random

from conftest import assert_state_consistent, model_from
from loft.canon import make_set
from loft.engine import EvalContext
from loft.generate import generate_with_retry
from loft.search import solve
from loft.verify import verify_solution


def test_solver_output_verifies(knapsack_tiny):
    r = solve(knapsack_tiny, seed=1, eval_limit=8000)
    assert r.best_violation == 0
    report = verify_solution(knapsack_tiny, r.best)
    assert report.ok
    assert report.objective == r.best_objective


def test_attribute_breach_is_named():
    model = model_from("find s : set (maxSize 2) of int(1..9)\nsuch that |s| >= 0")
    report = verify_solution(model, {"s": make_set([1, 2, 3])})
    assert not report.ok
    assert any("maxSize" in f for f in report.failures)


def test_duplicate_members_rejected_structurally():
    model = model_from("find s : set (maxSize 5) of int(1..9)\nsuch that |s| >= 0")
    # bypass make_set's dedup: build the raw canonical tuple by hand
    report = verify_solution(model, {"s": ("set", (2, 2, 3))})
    assert not report.ok
    assert any("duplicate" in f for f in report.failures)


def test_missing_find_reported():
    model = model_from("find x : int(1..3)\nsuch that x >= 1")
    report = verify_solution(model, {})
    assert not report.ok and "missing value for x" in report.failures


def test_violated_constraint_is_printed():
    model = model_from("find x : int(1..9)\nsuch that x >= 5")
    report = verify_solution(model, {"x": 2})
    assert not report.ok
    assert any("x >= 5" in f for f in report.failures)


def test_verifier_agrees_with_engine_on_random_assignments(
        sonet_micro, knapsack_tiny, binpacking_tiny, tsp_small, meb_small):
    rng = random.Random(21)
    for model in (sonet_micro, knapsack_tiny, binpacking_tiny, tsp_small, meb_small):
        ctx = EvalContext(model)
        for _ in range(120):
            assignment = {n: generate_with_retry(d, rng)[0] for n, d in model.finds}
            ctx.reset(assignment)
            report = verify_solution(model, assignment)
            assert report.ok == (ctx.total_violation() == 0)
