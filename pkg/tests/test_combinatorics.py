from math import comb

import pytest
from hypothesis import given, strategies as st

from rgoperad.combinatorics import (
    Permutation,
    SetPartition,
    all_permutations,
    block_permutation,
    canonicalize_partition,
    enumerate_set_partitions,
    nonempty_subsets,
    partition_from_subset,
    partition_permutation,
    shifted_permutation,
)


def test_small_partition_lists():
    assert [p.blocks for p in enumerate_set_partitions(1)] == [((1,),)]
    assert len(enumerate_set_partitions(3)) == 5
    assert len(enumerate_set_partitions(4)) == 15


def test_zero_rejected():
    with pytest.raises(ValueError):
        enumerate_set_partitions(0)


def test_bell_recurrence():
    bell = [1] + [len(enumerate_set_partitions(n)) for n in range(1, 9)]
    for n in range(8):
        assert bell[n + 1] == sum(comb(n, k) * bell[k] for k in range(n + 1))


def test_partitions_distinct_and_canonical():
    parts = enumerate_set_partitions(5)
    assert len({p.blocks for p in parts}) == len(parts)
    for p in parts:
        assert canonicalize_partition(p.blocks) == p


def test_enumeration_order_is_fixed():
    # restricted growth strings 000, 001, 010, 011, 012
    assert [p.blocks for p in enumerate_set_partitions(3)] == [
        ((1, 2, 3),),
        ((1, 2), (3,)),
        ((1, 3), (2,)),
        ((1,), (2, 3)),
        ((1,), (2,), (3,)),
    ]


def test_canonicalize_examples():
    assert canonicalize_partition([{2}, {1, 3}], 3).blocks == ((1, 3), (2,))
    assert canonicalize_partition([set(range(1, 5))]).blocks == ((1, 2, 3, 4),)
    assert canonicalize_partition([{3}, {1}, {2}]).blocks == ((1,), (2,), (3,))


@pytest.mark.parametrize("blocks", [[{1, 2}, {2, 3}], [{1}, {3}], [{1}, set()]])
def test_canonicalize_rejects_bad_blocks(blocks):
    with pytest.raises(ValueError):
        canonicalize_partition(blocks, 3)


def test_set_partition_rejects_noncanonical():
    with pytest.raises(ValueError):
        SetPartition(3, ((2,), (1, 3)))
    with pytest.raises(ValueError):
        SetPartition(3, ((3, 1), (2,)))


@given(st.integers(1, 6).flatmap(lambda n: st.tuples(st.just(n), st.randoms(use_true_random=False))))
def test_canonicalize_ignores_block_order(data):
    n, rnd = data
    p = rnd.choice(enumerate_set_partitions(n))
    shuffled = [list(b) for b in p.blocks]
    rnd.shuffle(shuffled)
    for b in shuffled:
        rnd.shuffle(b)
    q = canonicalize_partition(shuffled, n)
    assert q == p
    assert canonicalize_partition(q.blocks, n) == q


def test_partition_permutation_examples():
    assert partition_permutation(SetPartition(3, ((1, 3), (2,)))).images == (1, 3, 2)
    assert partition_permutation(SetPartition(3, ((1,), (2,), (3,)))).is_identity()
    assert partition_permutation(SetPartition(3, ((1, 2, 3),))).is_identity()


def test_partition_permutation_is_bijection():
    for n in range(1, 6):
        for p in enumerate_set_partitions(n):
            sigma = partition_permutation(p)
            assert sorted(sigma.images) == list(range(1, n + 1))


def test_partition_from_subset():
    assert partition_from_subset({2, 3}, 4).blocks == ((1,), (2, 3), (4,))
    assert partition_from_subset({1, 2, 3}, 3).blocks == ((1, 2, 3),)
    assert partition_from_subset({1}, 2).blocks == ((1,), (2,))
    with pytest.raises(ValueError):
        partition_from_subset(set(), 2)
    with pytest.raises(ValueError):
        partition_from_subset({5}, 2)


def test_nonempty_subsets_counts():
    assert len(list(nonempty_subsets(4))) == 15
    assert len(list(nonempty_subsets(4, 2, 3))) == 10


def test_permutation_basics():
    s = Permutation((2, 3, 1))
    assert s(1) == 2
    assert s.compose(s.inverse()).is_identity()
    assert s.compose(Permutation((1, 3, 2))).images == (2, 1, 3)
    with pytest.raises(ValueError):
        Permutation((1, 1, 2))
    assert len(list(all_permutations(4))) == 24


def test_block_and_shifted_permutations():
    # sigma = (2,1): expanding slot 1 into two slots
    assert block_permutation(Permutation((2, 1)), 1, 2).images == (3, 1, 2)
    assert block_permutation(Permutation((2, 1)), 2, 2).images == (2, 3, 1)
    assert shifted_permutation(Permutation((2, 1)), 2, 3).images == (1, 3, 2, 4)
