import random

from hypothesis import given, settings
from hypothesis import strategies as st

from loft.canon import hash_canon, make_func, make_mset, make_part, make_seq, make_set, make_tuple
from loft.hashing import MASK64, combine_ordered, int_hash, mix, murmur3_x64_128


def test_integer_hash_is_identity():
    assert hash_canon(5) == 5
    assert hash_canon(0) == 0
    assert hash_canon(-1) == MASK64  # two's complement reinterpretation


def test_bool_hash_is_toint():
    assert hash_canon(False) == 0
    assert hash_canon(True) == 1


def test_empty_set_hashes_to_zero():
    assert hash_canon(make_set([])) == 0
    assert hash_canon(make_mset([])) == 0


def test_mixing_separates_equal_sums():
    # without mixing, {2,8}, {4,6} and {1,2,3,4} would all hash to 10
    hs = {hash_canon(make_set(s)) for s in ([2, 8], [4, 6], [1, 2, 3, 4])}
    assert len(hs) == 3


def test_set_hash_is_storage_order_independent():
    a = sum(mix(hash_canon(x)) for x in [3, 1, 2]) & MASK64
    assert a == hash_canon(make_set([1, 2, 3]))


def test_sequence_hash_depends_on_positions():
    assert hash_canon(make_seq([1, 2])) != hash_canon(make_seq([2, 1]))
    assert hash_canon(make_seq([1, 2])) != hash_canon(make_set([1, 2]))


def test_function_hash_uses_pairs():
    f = make_func([(1, 5), (2, 6)])
    g = make_func([(1, 6), (2, 5)])
    assert hash_canon(f) != hash_canon(g)


def test_partition_hash_is_sum_of_mixed_part_hashes():
    p = make_part([[1, 2], [3]])
    part1 = (mix(1) + mix(2)) & MASK64
    part2 = mix(3) & MASK64
    assert hash_canon(p) == (mix(part1) + mix(part2)) & MASK64


def test_murmur_is_deterministic_and_length_sensitive():
    assert murmur3_x64_128(b"") == murmur3_x64_128(b"")
    assert murmur3_x64_128(b"a") != murmur3_x64_128(b"aa")
    long = bytes(range(256)) * 3
    a1 = murmur3_x64_128(long)
    assert a1 == murmur3_x64_128(bytes(long))
    assert a1 != murmur3_x64_128(long[:-1])


def test_combine_ordered_is_order_sensitive():
    assert combine_ordered((1, 2)) != combine_ordered((2, 1))


@given(st.integers(min_value=-(2 ** 63), max_value=2 ** 64 - 1))
def test_mix_stays_in_64_bits(v):
    assert 0 <= mix(int_hash(v)) <= MASK64


@settings(max_examples=200)
@given(st.lists(st.integers(min_value=-100, max_value=100)))
def test_set_hash_invariant_under_permutation(xs):
    rng = random.Random(42)
    total = 0
    for x in xs:
        total = (total + mix(int_hash(x))) & MASK64
    shuffled = list(xs)
    rng.shuffle(shuffled)
    total2 = 0
    for x in shuffled:
        total2 = (total2 + mix(int_hash(x))) & MASK64
    assert total == total2
