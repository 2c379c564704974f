from hypothesis import given
from hypothesis import strategies as st
import pytest

import oracles
from linsolcount.errors import BadPartition, TooLarge
from linsolcount.partitions import (
    Partition,
    PartitionFamily,
    enumerate_partitions,
    iter_rgs,
    partition_of,
)

BELL = [1, 1, 2, 5, 15, 52, 203, 877, 4140]


@pytest.mark.parametrize("m", range(1, 9))
def test_partition_count_is_bell(m):
    parts = enumerate_partitions(m)
    assert len(parts) == BELL[m] == len(set(parts))
    reference = {tuple(sorted(tuple(sorted(c)) for c in p))
                 for p in oracles.set_partitions(range(1, m + 1))}
    assert {tuple(p.classes) for p in parts} == reference


def test_partition_cap():
    with pytest.raises(TooLarge):
        enumerate_partitions(13)


def test_rgs_order_is_lexicographic():
    rgs = list(iter_rgs(4))
    assert rgs == sorted(rgs)
    assert rgs[0] == (0, 0, 0, 0) and rgs[-1] == (0, 1, 2, 3)


def test_canonical_ordering_by_class_minimum():
    p = Partition([[5, 3], [2], [4, 1]])
    assert p.classes == ((1, 4), (2,), (3, 5))
    assert p == Partition([[2], [1, 4], [3, 5]])
    assert str(p) == "({1,4},{2},{3,5})"
    with pytest.raises(BadPartition):
        Partition([[1, 2], [2, 3]])
    with pytest.raises(BadPartition):
        Partition([[1], [3]])


def test_partition_of_examples():
    assert partition_of((1, 2, 3, 3, 3)) == Partition([[1], [2], [3, 4, 5]])
    assert partition_of((7, 7, 7)) == Partition([[1, 2, 3]])
    assert partition_of((5, 3, 5)) == Partition([[1, 3], [2]])


@given(st.lists(st.integers(0, 4), min_size=1, max_size=8))
def test_rgs_and_code_round_trip(x):
    p = partition_of(x)
    assert Partition.from_rgs(p.rgs()) == p
    assert tuple(sorted(tuple(c) for c in p.classes)) == oracles.shape(x)
    assert p.code() == sum(label * len(x) ** i for i, label in enumerate(p.rgs()))


def test_codes_are_distinct():
    for m in range(1, 7):
        codes = [p.code() for p in enumerate_partitions(m)]
        assert len(set(codes)) == len(codes)


def test_family_membership_and_order():
    fam = PartitionFamily(3, [Partition([[1], [2, 3]]), Partition.discrete(3)])
    assert Partition.discrete(3) in fam and len(fam) == 2
    assert [p.rgs() for p in fam] == [(0, 1, 1), (0, 1, 2)]
    assert fam.issubset(PartitionFamily(3, enumerate_partitions(3)))
    with pytest.raises(BadPartition):
        PartitionFamily(4, [Partition.discrete(3)])
