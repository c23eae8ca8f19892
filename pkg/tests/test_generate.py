import random

import pytest

import loft.domains as D
from loft.canon import make_set
from loft.generate import FAIL, calc_min_resource, generate_random, generate_with_retry


def test_min_resource_of_atoms_is_one():
    assert calc_min_resource(D.dint((1, 9))) == 1
    assert calc_min_resource(D.dbool()) == 1
    assert calc_min_resource(D.denum("e", ["a", "b"])) == 1


def test_min_resource_of_containers_adds_mandatory_members():
    assert calc_min_resource(D.dset(D.dint((1, 9)), minSize=2)) == 3
    assert calc_min_resource(D.dtuple(D.dint((1, 5)), D.dint((1, 5)))) == 2
    assert calc_min_resource(D.dseq(D.dint((1, 5)), size=4)) == 5
    # total functions and partitions carry no container cost
    assert calc_min_resource(D.dfunc(D.dint((1, 4)), D.dint((1, 9)), total=True)) == 4
    assert calc_min_resource(D.dpart(D.dint((1, 5)))) == 5


def test_zero_resource_always_fails_with_zero_consumed():
    rng = random.Random(0)
    for dom in (D.dint((1, 9)), D.dset(D.dint((1, 3))), D.dpart(D.dint((1, 4))),
                D.dfunc(D.dint((1, 2)), D.dint((1, 2)), total=True)):
        assert generate_random(dom, 0, rng) == (FAIL, 0)
        assert generate_random(dom, -5, rng) == (FAIL, 0)


def test_fixed_mset_exact_resource_accounting():
    rng = random.Random(1)
    v, consumed = generate_random(D.dmset(D.dint((1, 3)), size=2), 3, rng)
    assert v is not FAIL
    assert len(v[1]) == 2
    assert consumed == 3  # one for the container, one per element


def test_insufficient_resource_fails_partway():
    rng = random.Random(2)
    v, consumed = generate_random(D.dmset(D.dint((1, 3)), size=5), 3, rng)
    assert v is FAIL
    assert consumed > 0  # the attempt still reports what it spent


def test_set_samples_respect_attributes():
    rng = random.Random(3)
    dom = D.dset(D.dint((1, 10)), minSize=1, maxSize=3)
    for _ in range(1500):
        v, _ = generate_with_retry(dom, rng)
        assert dom.conforms(v) is None


def test_empty_fixed_set_is_immediate():
    rng = random.Random(4)
    v, consumed = generate_random(D.dset(D.dint((1, 5)), size=0), 10, rng)
    assert v == make_set([]) and consumed == 1


def test_int_values_cover_domain_uniformly():
    rng = random.Random(5)
    dom = D.dint((1, 4), (8, 9))
    seen = {generate_random(dom, 1, rng)[0] for _ in range(800)}
    assert seen == {1, 2, 3, 4, 8, 9}


def test_retry_grows_budget_until_success():
    # minimum resource far above the initial budget: must retry, then succeed
    deep = D.dset(D.dint((1, 2000)), minSize=700, maxSize=800)
    assert calc_min_resource(deep) > 1.1 * 1 + 500
    rng = random.Random(6)
    v, consumed = generate_with_retry(deep, rng)
    assert deep.conforms(v) is None
    assert consumed > 700


def test_cardinality_bias_mean_below_uniform_mean():
    rng = random.Random(7)
    dom = D.dset(D.dint((1, 100)), maxSize=50)
    total = 0
    n = 2000
    for _ in range(n):
        v, _ = generate_with_retry(dom, rng)
        total += len(v[1])
    assert total / n < 26


def test_regular_partition_two_pass():
    rng = random.Random(8)
    dom = D.dpart(D.denum("it", [f"i{k}" for k in range(12)]), regular=True)
    sizes_seen = set()
    for _ in range(300):
        v, _ = generate_with_retry(dom, rng)
        assert dom.conforms(v) is None
        sizes_seen.add(len(v[1]))
    assert len(sizes_seen) > 1  # cell count varies across samples


def test_irregular_partition_respects_part_bounds():
    rng = random.Random(9)
    dom = D.dpart(D.dint((1, 10)), minPartSize=2, maxPartSize=5)
    for _ in range(300):
        v, _ = generate_with_retry(dom, rng)
        assert dom.conforms(v) is None


def test_partial_function_generation():
    rng = random.Random(10)
    dom = D.dfunc(D.dint((1, 6)), D.dint((0, 3)), minSize=2, maxSize=4)
    for _ in range(300):
        v, _ = generate_with_retry(dom, rng)
        assert dom.conforms(v) is None


def test_total_function_over_tuple_grid():
    rng = random.Random(11)
    dom = D.dfunc(D.dtuple(D.dint((1, 3)), D.dint((1, 3))), D.dint((0, 9)), total=True)
    v, _ = generate_with_retry(dom, rng)
    assert dom.conforms(v) is None
    assert len(v[1]) == 9


def test_injective_sequence_generation():
    rng = random.Random(12)
    dom = D.dseq(D.dint((1, 6)), size=4, injective=True)
    for _ in range(300):
        v, _ = generate_with_retry(dom, rng)
        assert dom.conforms(v) is None


def test_benchmark_domain_sampling(sonet_micro, knapsack_tiny, binpacking_tiny,
                                    tsp_small, meb_small):
    rng = random.Random(13)
    for model in (sonet_micro, knapsack_tiny, binpacking_tiny, tsp_small, meb_small):
        for _, dom in model.finds:
            assert generate_random(dom, 0, rng) == (FAIL, 0)
            for _ in range(150):
                v, _ = generate_with_retry(dom, rng)
                assert dom.conforms(v) is None
