import pytest

from conftest import model_from
from loft.canon import make_set
from loft.engine import EvalContext

WORKED = """
given n, y : int
find x : int(1..10)
such that x >= y
find s : set (size 5) of int(1..n)
such that 1 = sum i in s . toInt(i % 2 = 0)
"""


@pytest.fixture
def worked():
    model = model_from(WORKED, "letting n be 6\nletting y be 5")
    ctx = EvalContext(model)
    ctx.reset({"x": 1, "s": make_set([1, 2, 3, 4, 6])})
    return ctx


def test_worked_example_constraint_violations(worked):
    cons = worked.root.children
    assert cons[0].violation == 4  # max(y - x, 0) with y = 5, x = 1
    assert cons[1].violation == 2  # |1 - 3|


def test_worked_example_x_gets_amount_and_label(worked):
    vmap = worked.violation_map()
    x = worked.vars["x"]
    assert vmap.rolled(x) == 4
    assert vmap.labels_of(x) == {"too_small"}


def test_worked_example_even_elements_get_one_each(worked):
    vmap = worked.violation_map()
    s = worked.vars["s"]
    assert vmap.own(s) == 0
    assert vmap.rolled(s) == 3
    amounts = {m.val: vmap.rolled(m) for m in s.members}
    assert amounts == {1: 0, 2: 1, 3: 0, 4: 1, 6: 1}


def test_satisfied_constraint_contributes_nothing():
    model = model_from("given y : int\nfind x : int(1..10)\nsuch that x >= y",
                       "letting y be 5")
    ctx = EvalContext(model)
    ctx.reset({"x": 7})
    vmap = ctx.violation_map()
    assert vmap.rolled(ctx.vars["x"]) == 0
    assert vmap.labels_of(ctx.vars["x"]) == set()


def test_less_equal_labels_mirror():
    model = model_from("given y : int\nfind x : int(1..10)\nsuch that x <= y",
                       "letting y be 2")
    ctx = EvalContext(model)
    ctx.reset({"x": 6})
    vmap = ctx.violation_map()
    x = ctx.vars["x"]
    assert vmap.rolled(x) == 4
    assert vmap.labels_of(x) == {"too_large"}


def test_toint_absorbs_unreducible_direction():
    # x = 4: the toInt is false (already 0), a too_large violation is dropped
    model = model_from(
        "find x : int(1..10)\nsuch that 0 = toInt(x % 2 = 0) + toInt(x >= 100)")
    ctx = EvalContext(model)
    ctx.reset({"x": 4})
    vmap = ctx.violation_map()
    assert ctx.total_violation() == 1
    # only the true toInt (x % 2 = 0) forwards violation to x
    assert vmap.rolled(ctx.vars["x"]) == 1


def test_parameters_drop_violations():
    model = model_from("given y : int\nfind x : int(1..10)\nsuch that x >= y",
                       "letting y be 9")
    ctx = EvalContext(model)
    ctx.reset({"x": 1})
    vmap = ctx.violation_map()
    # the only recorded object is x itself
    assert len(vmap.amounts) == 1


def test_map_recomputed_after_moves(worked):
    ctx = worked
    vmap1 = ctx.violation_map()
    assert vmap1.rolled(ctx.vars["x"]) == 4
    ctx.apply(("assign", ctx.vars["x"], 5))
    vmap2 = ctx.violation_map()
    assert vmap2 is not vmap1
    assert vmap2.rolled(ctx.vars["x"]) == 0
