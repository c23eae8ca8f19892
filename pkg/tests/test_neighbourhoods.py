import itertools
import random

import pytest

import loft.domains as D
from conftest import assert_state_consistent, model_from
from loft.canon import make_seq, make_set
from loft.engine import EvalContext
from loft.generate import generate_with_retry
from loft.neighbourhoods import (NeighbourhoodStructure, apply_structure,
                                 chains_for, instantiate_structures, revert)
from loft.neighbourhoods.templates import (ATOMIC, DIRECT, HIGHER_ORDER,
                                           SYNCHRONISED, chain_name)

INT16 = D.dint((1, 6))


# -- catalogue ------------------------------------------------------------------


def test_template_family_counts_match_the_catalogue():
    assert len(ATOMIC["bool"]) == 1
    assert len(ATOMIC["enum"]) == 1
    assert len(ATOMIC["int"]) == 2
    assert len(DIRECT["set"]) == 2 and len(DIRECT["mset"]) == 2
    assert len(DIRECT["sequence"]) == 5
    assert len(DIRECT["function"]) == 6
    assert len(DIRECT["partition"]) == 4
    assert len(HIGHER_ORDER) == 2
    assert len(SYNCHRONISED["set"]) == 2
    assert len(SYNCHRONISED["sequence"]) == 2
    assert len(SYNCHRONISED["function"]) == 1


def test_sonet_catalogue_is_exactly_eight(sonet_micro):
    names = {ns.name for ns in instantiate_structures(sonet_micro)}
    assert names == {
        "SetAdd", "SetRemove",
        "SetLiftSingle_SetAdd", "SetLiftSingle_SetRemove",
        "SetLiftMultiple_SetMove", "SetLiftMultiple_SetCrossover",
        "SetLiftSingle_SetLiftSingle_intAssignRandom",
        "SetLiftSingle_SetLiftSingle_intAssignRandomFromViolation",
    }


def test_fixed_size_set_loses_add_and_remove():
    names = {chain_name(c) for c in chains_for(D.dset(INT16, size=3))}
    assert names == {"SetLiftSingle_intAssignRandom",
                     "SetLiftSingle_intAssignRandomFromViolation"}


def test_min_equals_max_counts_as_fixed_size():
    names = {chain_name(c) for c in chains_for(D.dset(INT16, minSize=2, maxSize=2))}
    assert "SetAdd" not in names and "SetRemove" not in names


def test_injective_sequence_keeps_only_injectivity_preserving():
    dom = D.dseq(INT16, maxSize=5, injective=True)
    names = {chain_name(c) for c in chains_for(dom)}
    assert names == {"SequenceRemove", "SequenceReverseSub", "SequencePositionsSwap"}


def test_tsp_tour_structures():
    dom = D.dseq(D.dint((1, 5)), size=5, injective=True)
    names = {chain_name(c) for c in chains_for(dom)}
    assert names == {"SequenceReverseSub", "SequencePositionsSwap"}


def test_partition_gets_direct_templates_and_no_lifting():
    names = {chain_name(c) for c in chains_for(D.dpart(INT16))}
    assert names == {"PartitionMoveParts", "PartitionSwapParts",
                     "PartitionMergeParts", "PartitionSplitPart"}


def test_regular_partition_keeps_only_size_preserving():
    names = {chain_name(c) for c in chains_for(D.dpart(INT16, regular=True))}
    assert names == {"PartitionSwapParts"}


def test_total_function_loses_add_remove():
    dom = D.dfunc(D.dint((1, 4)), D.dint((1, 9)), total=True)
    names = {chain_name(c) for c in chains_for(dom)}
    assert "FunctionAdd" not in names and "FunctionRemove" not in names
    assert "FunctionSwap" in names and "FunctionUnifyImages" in names
    assert "FunctionRangeLiftSingle_intAssignRandom" in names
    assert "FunctionSwapAlongAxis" not in names  # preimage is not a tuple


def test_swap_along_axis_needs_tuple_preimage():
    dom = D.dfunc(D.dtuple(D.dint((1, 3)), D.dint((1, 3))), D.dint((1, 9)), total=True)
    names = {chain_name(c) for c in chains_for(dom)}
    assert "FunctionSwapAlongAxis" in names


def test_lift_multiple_only_wraps_synchronised():
    dom = D.dset(D.dset(INT16), maxSize=4)
    for chain in chains_for(dom):
        if chain[0] == "LiftMultiple":
            assert chain[2] in ("SetMove", "SetCrossover")


# -- move application -------------------------------------------------------------


def make_ctx(model, seed=0):
    rng = random.Random(seed)
    ctx = EvalContext(model)
    ctx.reset({n: generate_with_retry(d, rng)[0] for n, d in model.finds})
    return ctx, rng


def test_apply_then_revert_is_identity(sonet_micro):
    ctx, rng = make_ctx(sonet_micro, seed=1)
    structures = instantiate_structures(sonet_micro)
    before = (ctx.snapshot(), ctx.total_violation(), ctx.objective_internal(),
              ctx.vars["network"].h)
    for _ in range(300):
        ns = structures[rng.randrange(len(structures))]
        move = apply_structure(ns, ctx, rng)
        revert(move, ctx)
        after = (ctx.snapshot(), ctx.total_violation(), ctx.objective_internal(),
                 ctx.vars["network"].h)
        assert after == before


def test_double_revert_is_rejected(knapsack_tiny):
    ctx, rng = make_ctx(knapsack_tiny, seed=2)
    structures = instantiate_structures(knapsack_tiny)
    move = None
    while move is None or move.abandoned:
        move = apply_structure(structures[rng.randrange(len(structures))], ctx, rng)
    revert(move, ctx)
    with pytest.raises(AssertionError):
        revert(move, ctx)


def test_moves_never_leave_the_domain(binpacking_tiny, tsp_small, meb_small):
    for model in (binpacking_tiny, tsp_small, meb_small):
        ctx, rng = make_ctx(model, seed=3)
        structures = instantiate_structures(model)
        from loft.values import conforms_value
        for _ in range(250):
            ns = structures[rng.randrange(len(structures))]
            apply_structure(ns, ctx, rng)
            for name, dom in model.finds:
                assert conforms_value(dom, ctx.vars[name]) is None


def test_add_to_full_set_is_abandoned():
    model = model_from("find s : set (maxSize 2) of int(1..9)\n"
                       "such that |s| >= 0")
    ctx = EvalContext(model)
    ctx.reset({"s": make_set([1, 2])})
    ns = [x for x in instantiate_structures(model) if x.name == "SetAdd"][0]
    move = apply_structure(ns, ctx, EvalContext and random.Random(4))
    assert move.abandoned
    assert move.cost >= 50  # one per failed attempt
    revert(move, ctx)  # reverting an abandoned attempt is a no-op
    assert ctx.snapshot()["s"] == make_set([1, 2])


def test_int_assign_from_violation_respects_range():
    model = model_from("given y : int\nfind x : int(1..20)\nsuch that x >= y",
                       "letting y be 14")
    ctx = EvalContext(model)
    rng = random.Random(5)
    ns = [x for x in instantiate_structures(model)
          if x.name == "intAssignRandomFromViolation"][0]
    for _ in range(200):
        ctx.reset({"x": 10})
        move = apply_structure(ns, ctx, rng)
        if move.abandoned:
            continue
        # violation is 4, so the new value lies in [6, 14] minus {10}
        assert 6 <= ctx.vars["x"].val <= 14
        assert ctx.vars["x"].val != 10


def test_int_assign_from_violation_fails_when_satisfied():
    model = model_from("find x : int(1..20)\nsuch that x >= 1")
    ctx = EvalContext(model)
    ctx.reset({"x": 10})
    ns = [x for x in instantiate_structures(model)
          if x.name == "intAssignRandomFromViolation"][0]
    move = apply_structure(ns, ctx, random.Random(6))
    assert move.abandoned  # zero violation leaves an empty range


def test_reverse_sub_reachability_matches_enumeration():
    model = model_from("find s : sequence (size 4) of int(1..4)\nsuch that |s| >= 0")
    start = (1, 2, 3, 4)
    expected = set()
    for length in range(1, 5):
        for st in range(0, 4 - length + 1):
            lst = list(start)
            lst[st:st + length] = reversed(lst[st:st + length])
            expected.add(tuple(lst))
    ns = [x for x in instantiate_structures(model) if x.name == "SequenceReverseSub"][0]
    seen = set()
    rng = random.Random(7)
    ctx = EvalContext(model)
    for _ in range(400):
        ctx.reset({"s": make_seq(start)})
        move = apply_structure(ns, ctx, rng)
        assert not move.abandoned
        seen.add(tuple(ctx.snapshot()["s"][1]))
    assert seen == expected
    assert (1, 3, 2, 4) in seen


def test_set_add_remove_closure_reaches_all_subsets():
    model = model_from("find s : set of int(1..3)\nsuch that |s| >= 0")
    structures = {x.name: x for x in instantiate_structures(model)}
    rng = random.Random(8)
    ctx = EvalContext(model)
    reached = set()
    for _ in range(600):
        ctx.reset({"s": make_set([])})
        for _ in range(3):
            name = ("SetAdd", "SetRemove")[rng.randrange(2)]
            apply_structure(structures[name], ctx, rng)
            reached.add(ctx.snapshot()["s"])
    assert len(reached) == 8  # every subset of {1,2,3}


def test_lift_multiple_selects_exactly_two():
    model = model_from("find nets : set (maxSize 4) of set of int(1..6)\n"
                       "such that |nets| >= 0")
    ctx = EvalContext(model)
    rng = random.Random(9)
    ns = [x for x in instantiate_structures(model)
          if x.name == "SetLiftMultiple_SetMove"][0]
    moved = 0
    for _ in range(100):
        ctx.reset({"nets": make_set([make_set([1, 2]), make_set([3, 4]),
                                     make_set([5, 6])])})
        move = apply_structure(ns, ctx, rng)
        if move.abandoned:
            continue
        sizes = sorted(len(r[1]) for r in ctx.snapshot()["nets"][1])
        assert sizes == [1, 2, 3]  # one member shrank, exactly one other grew
        moved += 1
    assert moved > 0


def test_partition_moves_respect_attrs():
    dom_model = model_from(
        "find p : partition (minPartSize 2, maxPartSize 4) from int(1..8)\n"
        "such that |parts(p)| >= 1")
    ctx, rng = make_ctx(dom_model, seed=10)
    structures = instantiate_structures(dom_model)
    from loft.values import conforms_value
    for _ in range(300):
        ns = structures[rng.randrange(len(structures))]
        apply_structure(ns, ctx, rng)
        assert conforms_value(dom_model.find_domains["p"], ctx.vars["p"]) is None


def test_abandoned_costs_one_evaluation_of_attempts():
    model = model_from("find s : set (minSize 2, maxSize 2) of int(1..2)\n"
                       "such that |s| >= 0")
    # the only reachable value is {1,2}: any int reassignment collides
    ctx = EvalContext(model)
    ctx.reset({"s": make_set([1, 2])})
    ns = [x for x in instantiate_structures(model)
          if x.name == "SetLiftSingle_intAssignRandom"][0]
    move = apply_structure(ns, ctx, random.Random(11))
    assert move.abandoned
    assert ctx.snapshot()["s"] == make_set([1, 2])
