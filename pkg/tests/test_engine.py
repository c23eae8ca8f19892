import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import (BENCH, assert_state_consistent, ground_env, load_model,
                      model_from)
from loft.canon import make_func, make_part, make_seq, make_set
from loft.engine import EvalContext, VIOL_UNDEF, eliminate_integer_invariants
from loft.engine.comprehension import CompNode
from loft.engine.nodes import AndNode, OrNode, SumNode
from loft.generate import generate_with_retry
from loft.neighbourhoods import apply_structure, instantiate_structures, revert
from loft.values import VInt
from loft.speclang import ast as A
from loft.speclang import parse_params, parse_spec, instantiate


def count_nodes(ctx):
    n = sum(1 for _ in ctx.root.iter_nodes())
    if ctx.obj_root is not None:
        n += sum(1 for _ in ctx.obj_root.iter_nodes())
    return n


# -- tree construction --------------------------------------------------------


def test_sonet_tree_shape(sonet_micro):
    ctx = EvalContext(sonet_micro)
    ctx.reset({"network": make_set([])})
    root = ctx.root
    assert isinstance(root, AndNode)
    [forall] = root.children
    assert isinstance(forall, AndNode)
    [outer_comp] = forall.children
    assert isinstance(outer_comp, CompNode)
    assert outer_comp.template is not None  # the template is retained
    assert len(outer_comp.children) == 2    # one per demand pair
    for child in outer_comp.children:
        assert isinstance(child, OrNode)
        [inner_comp] = child.children
        assert isinstance(inner_comp, CompNode)
        assert len(inner_comp.children) == 0  # network is empty


def test_empty_quantifier_identities(sonet_micro):
    ctx = EvalContext(sonet_micro)
    ctx.reset({"network": make_set([])})
    # exists over the empty network is false, so the forAll is false
    assert ctx.root.value is False
    assert ctx.total_violation() == 2  # one per demand pair
    ctx.verify_caches()


def test_no_objective_tree_when_absent():
    model = model_from("find x : int(1..3)\nsuch that x >= 2")
    ctx = EvalContext(model)
    ctx.reset({"x": 1})
    assert ctx.obj_root is None
    assert ctx.objective_internal() == 0


def test_maximise_negates_internally(knapsack_tiny):
    ctx = EvalContext(knapsack_tiny)
    ctx.reset({"picked": make_set([0])})
    assert ctx.objective_internal() == -10
    assert ctx.objective_user() == 10


def test_sonet_walkthrough_assignment(sonet_micro):
    ctx = EvalContext(sonet_micro)
    ctx.reset({"network": make_set([make_set([1, 3, 8]), make_set([2, 3])])})
    assert ctx.root.value is False


# -- violation rules -----------------------------------------------------------


def test_cmp_violation_rules():
    model = model_from("given y : int\nfind x : int(1..10)\nsuch that x >= y",
                       "letting y be 5")
    ctx = EvalContext(model)
    ctx.reset({"x": 1})
    assert ctx.total_violation() == 4  # max(y - x, 0)
    ctx.reset({"x": 5})
    assert ctx.total_violation() == 0


def test_subseteq_violation_counts_missing_members():
    model = model_from(
        "find a : set (maxSize 5) of int(1..5)\n"
        "find b : set (maxSize 5) of int(1..5)\n"
        "such that a subsetEq b")
    ctx = EvalContext(model)
    ctx.reset({"a": make_set([1, 2, 3]), "b": make_set([2, 3])})
    assert ctx.total_violation() == 1
    ctx.reset({"a": make_set([1, 2, 3]), "b": make_set([])})
    assert ctx.total_violation() == 3


def test_division_by_zero_gives_huge_violation():
    model = model_from("find x : int(0..5)\nsuch that 1 / x = 1")
    ctx = EvalContext(model)
    ctx.reset({"x": 0})
    assert ctx.total_violation() == VIOL_UNDEF
    ctx.reset({"x": 1})
    assert ctx.total_violation() == 0


def test_disjunction_takes_minimum_violation():
    model = model_from("find x : int(1..10)\nsuch that (x >= 9) \\/ (x >= 4)")
    ctx = EvalContext(model)
    ctx.reset({"x": 1})
    assert ctx.total_violation() == 3  # min(8, 3)


def test_conjunction_sums_violations():
    model = model_from("find x : int(1..10)\nsuch that (x >= 9) /\\ (x >= 4)")
    ctx = EvalContext(model)
    ctx.reset({"x": 1})
    assert ctx.total_violation() == 11


def test_alldiff_counts_repeats():
    model = model_from(
        "find f : function (total) int(1..4) --> int(1..2)\n"
        "such that allDiff([i | (_, i) <- f])")
    ctx = EvalContext(model)
    ctx.reset({"f": make_func([(1, 1), (2, 1), (3, 2), (4, 2)])})
    assert ctx.total_violation() == 2  # four values, two distinct
    ctx.reset({"f": make_func([(1, 1), (2, 2), (3, 1), (4, 2)])})
    assert ctx.total_violation() == 2


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 10), st.integers(1, 10), st.data())
def test_bool_tree_violation_algebra(x, y, data):
    # random and/or trees of depth <= 4 over comparisons of two variables
    def gen_tree(depth):
        if depth == 0 or data.draw(st.booleans()):
            var = data.draw(st.sampled_from(["p", "q"]))
            bound = data.draw(st.integers(1, 10))
            return f"({var} >= {bound})", lambda vp, vq: max(
                bound - (vp if var == "p" else vq), 0)
        op = data.draw(st.sampled_from(["/\\", "\\/"]))
        lt, lv = gen_tree(depth - 1)
        rt, rv = gen_tree(depth - 1)
        if op == "/\\":
            return f"({lt} /\\ {rt})", lambda vp, vq: lv(vp, vq) + rv(vp, vq)
        return f"({lt} \\/ {rt})", lambda vp, vq: min(lv(vp, vq), rv(vp, vq))

    text, expect = gen_tree(4)
    model = model_from(f"find p : int(1..10)\nfind q : int(1..10)\nsuch that {text}")
    ctx = EvalContext(model)
    ctx.reset({"p": x, "q": y})
    assert ctx.total_violation() == expect(x, y)


# -- incremental propagation ----------------------------------------------------


def test_sum_member_change_is_local():
    model = model_from(
        "find s : sequence (size 3) of int(1..10)\n"
        "such that (sum i in s . i) >= 1")
    ctx = EvalContext(model)
    ctx.reset({"s": make_seq([2, 3, 4])})
    [cons] = ctx.root.children
    sum_node = cons.children[0]
    assert isinstance(sum_node, SumNode)
    assert sum_node.value == 9
    member = ctx.vars["s"].members[1]
    ctx.apply(("assign", member, 7))
    assert sum_node.value == 13
    assert sum_node.cmv == [(2, False), (7, False), (4, False)]
    ctx.verify_caches()


def test_sum_undefined_member_counter():
    model = model_from(
        "find f : function (total) int(1..3) --> int(0..5)\n"
        "such that (sum i : int(1..3) . 6 / f(i)) >= 1")
    ctx = EvalContext(model)
    ctx.reset({"f": make_func([(1, 1), (2, 2), (3, 3)])})
    assert ctx.total_violation() == 0
    member = ctx.vars["f"].images[1]
    tx = ctx.begin()
    ctx.apply(("assign", member, 0))
    ctx.end()
    assert ctx.total_violation() == VIOL_UNDEF  # sum became undefined
    ctx.verify_caches()
    ctx.revert(tx)
    assert ctx.total_violation() == 0  # cached value restored on redefinition
    ctx.verify_caches()


def test_subseteq_add_already_present_keeps_violation(sonet_micro):
    ctx = EvalContext(sonet_micro)
    ctx.reset({"network": make_set([make_set([1, 3])])})
    viol0 = ctx.total_violation()
    ring = ctx.vars["network"].members[0]
    ctx.apply(("append", ring, VInt(5)))  # 5 is in no demand pair
    assert ctx.total_violation() == viol0
    ctx.verify_caches()


def random_move_fuzz(model, steps, seed, check_every=25):
    rng = random.Random(seed)
    structures = instantiate_structures(model)
    ctx = EvalContext(model)
    ctx.reset({name: generate_with_retry(dom, rng)[0] for name, dom in model.finds})
    for step in range(steps):
        ns = structures[rng.randrange(len(structures))]
        move = apply_structure(ns, ctx, rng)
        if not move.abandoned and rng.random() < 0.4:
            revert(move, ctx)
        if step % check_every == 0:
            assert_state_consistent(ctx, model)
    assert_state_consistent(ctx, model)


def test_incremental_matches_full_eval_sonet(sonet_micro):
    random_move_fuzz(sonet_micro, 400, seed=101)


def test_incremental_matches_full_eval_knapsack(knapsack_tiny):
    random_move_fuzz(knapsack_tiny, 400, seed=102)


def test_incremental_matches_full_eval_binpacking(binpacking_tiny):
    random_move_fuzz(binpacking_tiny, 400, seed=103)


def test_incremental_matches_full_eval_tsp(tsp_small):
    random_move_fuzz(tsp_small, 400, seed=104)


def test_incremental_matches_full_eval_meb(meb_small):
    random_move_fuzz(meb_small, 400, seed=105)


def test_tree_size_scales_with_value_not_domain(knapsack_tiny):
    big = model_from(
        (BENCH / "knapsack.spec").read_text(),
        'letting items be new type enum {%s}\n'
        'letting gain be function(%s)\n'
        'letting weight be function(%s)\n'
        'letting capacity be 50' % (
            ", ".join(f'"i{k}"' for k in range(200)),
            ", ".join(f'"i{k}" --> {k % 7 + 1}' for k in range(200)),
            ", ".join(f'"i{k}" --> {k % 5 + 1}' for k in range(200)),
        ))
    ctx = EvalContext(big)
    ctx.reset({"picked": make_set([0, 1])})
    base = count_nodes(ctx)
    ctx.apply(("append", ctx.vars["picked"], VInt(7)))
    per_elem = count_nodes(ctx) - base
    assert per_elem > 0
    for k in range(5):
        ctx.apply(("append", ctx.vars["picked"], VInt(20 + k)))
    assert count_nodes(ctx) == base + 6 * per_elem  # linear in k, not in 200


def test_violation_map_rollup_conservation(sonet_micro):
    rng = random.Random(9)
    ctx = EvalContext(sonet_micro)
    ctx.reset({"network": generate_with_retry(
        sonet_micro.find_domains["network"], rng)[0]})
    vmap = ctx.violation_map()
    net = ctx.vars["network"]
    total = vmap.own(net) + sum(vmap.rolled(m) for m in net.members)
    assert vmap.rolled(net) == total
    for ring in net.members:
        inner = vmap.own(ring) + sum(vmap.rolled(m) for m in ring.members)
        assert vmap.rolled(ring) == inner


# -- integer variable elimination -------------------------------------------------


def test_elimination_replaces_implied_constraint_with_true():
    model = model_from(
        "find a : int(1..10)\nfind y : int(1..5)\nsuch that a = y + 2")
    out = eliminate_integer_invariants(model)
    assert [n for n, _ in out.finds] == ["y"]
    assert out.constraints == [A.Const(True, out.constraints[0].type)]
    assert out.eliminated and out.eliminated[0][0] == "a"


def test_elimination_keeps_membership_when_not_implied():
    model = model_from(
        "find a : int(1..10)\nfind y : int(1..20)\nsuch that a = y + 2")
    out = eliminate_integer_invariants(model)
    assert [n for n, _ in out.finds] == ["y"]
    [c] = out.constraints
    assert isinstance(c, A.BinOp) and c.op == "/\\"  # y+2 >= 1 /\ y+2 <= 10
    ctx = EvalContext(out)
    ctx.reset({"y": 20})
    assert ctx.total_violation() == 12  # 22 > 10
    ctx.reset({"y": 5})
    assert ctx.total_violation() == 0


def test_elimination_leaves_other_models_unchanged(sonet_micro):
    out = eliminate_integer_invariants(sonet_micro)
    assert out.finds == sonet_micro.finds
    assert out.constraints == sonet_micro.constraints


def test_elimination_substitutes_other_occurrences():
    model = model_from(
        "find a : int(1..30)\nfind y : int(1..5)\n"
        "such that a = y + 2, a >= 4\nminimising a")
    out = eliminate_integer_invariants(model)
    assert [n for n, _ in out.finds] == ["y"]
    ctx = EvalContext(out)
    ctx.reset({"y": 1})
    assert ctx.total_violation() == 1  # (y+2) >= 4 misses by one
    assert ctx.objective_internal() == 3


# -- partial one-way propagation ------------------------------------------------


def test_one_way_depths_update(meb_small):
    rng = random.Random(3)
    ctx = EvalContext(meb_small)
    n = len(meb_small.find_domains["depths"].inner[0].enum_values or []) or 5
    ctx.reset({
        "parents": make_func([(1, 1), (2, 1), (3, 2), (4, 3), (5, 4)]),
        "depths": make_func([(1, 1), (2, 2), (3, 3), (4, 4), (5, 5)]),
    })
    assert ctx.total_violation() == 0
    tx = ctx.begin()
    ctx.apply(("assign", ctx.vars["parents"].images[2], 1))
    ctx.end()
    assert [m.val for m in ctx.vars["depths"].images] == [1, 2, 2, 3, 4]
    assert ctx.total_violation() == 0
    ctx.verify_caches()
    ctx.revert(tx)
    assert [m.val for m in ctx.vars["depths"].images] == [1, 2, 3, 4, 5]


def test_one_way_not_registered_for_injective_targets():
    model = model_from(
        "find s : sequence (size 3, injective) of int(1..9)\n"
        "find y : int(1..7)\n"
        "such that s(1) = y + 2")
    ctx = EvalContext(model)
    ctx.reset({"s": make_seq([3, 1, 2]), "y": 1})
    assert ctx.links == []


def test_one_way_registered_for_plain_sequence_targets():
    model = model_from(
        "find s : sequence (size 3) of int(1..9)\n"
        "find y : int(1..7)\n"
        "such that s(1) = y + 2")
    ctx = EvalContext(model)
    ctx.reset({"s": make_seq([3, 1, 2]), "y": 1})
    assert len(ctx.links) == 1
    ctx.apply(("assign", ctx.vars["y"], 5))
    assert ctx.vars["s"].members[0].val == 7
    assert ctx.total_violation() == 0


def test_one_way_two_cycle_suppressed():
    model = model_from(
        "find f : function (total) int(1..2) --> int(0..100)\n"
        "such that f(1) = f(2) + 1, f(2) = f(1) + 1")
    ctx = EvalContext(model)
    ctx.reset({"f": make_func([(1, 50), (2, 50)])})
    assert len(ctx.links) == 2
    tx = ctx.begin()
    ctx.apply(("assign", ctx.vars["f"].images[1], 10))
    ctx.end()
    # each element fired at most once, and the contradictory pair cannot
    # both be satisfied: some violation remains
    assert ctx.total_violation() > 0
    assert_state_consistent(ctx, model)


def test_one_way_guard_blocks_update(meb_small):
    ctx = EvalContext(meb_small)
    ctx.reset({
        "parents": make_func([(1, 1), (2, 1), (3, 2), (4, 3), (5, 4)]),
        "depths": make_func([(1, 1), (2, 2), (3, 3), (4, 4), (5, 5)]),
    })
    # the guarded equality for child = initNode must never fire
    before = [m.val for m in ctx.vars["depths"].images]
    ctx.apply(("assign", ctx.vars["depths"].images[0], 1))
    assert [m.val for m in ctx.vars["depths"].images] == before
