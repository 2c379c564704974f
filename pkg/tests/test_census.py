import json
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from linsolcount import census
from linsolcount import exact_linalg as el
from linsolcount.census import (
    SupportTable,
    count_intersecting,
    count_proper,
    count_typed,
    enumerate_solutions,
    exact_mean,
    exact_moments,
    exact_variance,
    growth_exponent,
    lemma1_check,
    solve_box,
)
from linsolcount.errors import BoxTooLarge, Inconsistent, ZeroCount
from linsolcount.partitions import Partition, PartitionFamily
from linsolcount.system_properties import SystemSpec, partition_family

AP3 = SystemSpec([[1, -2, 1]])
SCHUR = SystemSpec([[1, 1, -1]])
SIDON = SystemSpec([[1, 1, -1, -1]])
DISCRETE3 = PartitionFamily.discrete(3)


def test_enumeration_examples():
    assert len(enumerate_solutions(AP3, 5)) == 13
    assert len(enumerate_solutions(SCHUR, 5)) == 10
    assert len(enumerate_solutions(SIDON, 3)) == 19
    for spec, n in ((AP3, 5), (SCHUR, 5), (SIDON, 3)):
        assert [tuple(r) for r in enumerate_solutions(spec, n).values.tolist()] == \
            oracles.solutions(spec.A.tolist(), spec.b, n)


def test_solution_records():
    sols = enumerate_solutions(SCHUR, 5)
    s = next(x for x in sols if x.values == (2, 2, 4))
    assert s.support == (2, 4) and s.shape == Partition([[1, 2], [3]])
    assert len(s.support) == len(s.shape)


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 2).flatmap(lambda r: st.tuples(
    st.lists(st.lists(st.integers(-3, 3), min_size=r + 2, max_size=r + 2),
             min_size=r, max_size=r),
    st.lists(st.integers(-3, 3), min_size=r, max_size=r),
    st.integers(1, 6))))
def test_enumeration_matches_nested_loops(case):
    rows, b, n = case
    want = oracles.solutions(rows, b, n)
    try:
        got = solve_box(rows, b, n)
    except Inconsistent:
        assert want == [] and el.solve_particular(rows, b) is None
        return
    assert [tuple(r) for r in got.values.tolist()] == want
    typed = count_typed(got, partition_family(rows))
    assert count_proper(got) <= typed <= len(got)
    assert count_proper(got) <= n ** (len(rows[0]) - el.rank(rows))


def test_completeness_on_wider_boxes():
    rng = random.Random(2)
    for _ in range(25):
        m = rng.randint(2, 4)
        rows = [[rng.randint(-3, 3) for _ in range(m)]]
        b = [rng.randint(-4, 4)]
        n = rng.randint(1, 12 if m < 4 else 8)
        if el.solve_particular(rows, b) is None:
            continue
        assert [tuple(r) for r in solve_box(rows, b, n).values.tolist()] == \
            oracles.solutions(rows, b, n)


def test_inconsistent_and_guard(monkeypatch):
    with pytest.raises(Inconsistent):
        solve_box([[1, 0], [1, 0]], [1, 2], 3)
    with pytest.raises(BoxTooLarge):
        enumerate_solutions(SIDON, 500)
    with pytest.raises(BoxTooLarge):
        enumerate_solutions(AP3, 50, limit=100)
    monkeypatch.setenv(census.BOX_ENV, "10")
    with pytest.raises(BoxTooLarge):
        enumerate_solutions(AP3, 5)


def test_proper_and_typed_counts():
    assert count_proper(enumerate_solutions(AP3, 5)) == 8
    assert count_proper(enumerate_solutions(SCHUR, 5)) == 8
    assert count_proper(enumerate_solutions(SIDON, 4)) == 8
    schur = enumerate_solutions(SCHUR, 5)
    assert count_typed(schur, partition_family(SCHUR.A)) == 10
    assert count_typed(enumerate_solutions(AP3, 5), partition_family(AP3.A)) == 8
    assert count_typed(schur, PartitionFamily(3)) == 0


def test_shape_count_examples():
    assert lemma1_check(SCHUR, Partition([[1, 2], [3]]), 5) == (2, 2)
    assert lemma1_check(AP3, Partition([[1, 3], [2]]), 5) == (0, 0)
    assert lemma1_check(SIDON, Partition.discrete(4), 6) == (count_proper(enumerate_solutions(SIDON, 6)),) * 2


def test_intersecting_counts():
    sols = enumerate_solutions(AP3, 5)
    proper = [x for x in oracles.solutions([[1, -2, 1]], [0], 5) if len(set(x)) == 3]
    # every proper progression in [5] passes through 3, including (3,4,5) and (5,4,3)
    assert sum(3 in x for x in proper) == 8
    assert count_intersecting(sols, DISCRETE3, {3}) == 8
    assert count_intersecting(sols, DISCRETE3, set()) == 0
    assert count_intersecting(sols, DISCRETE3, range(1, 6)) == count_typed(sols, DISCRETE3)
    # two hits: (1,2,3) and (3,2,1) contain both 2 and 3, and so do (2,3,4), (4,3,2)
    assert count_intersecting(sols, DISCRETE3, {2, 3}, min_hits=2) == 4


def test_intersection_scaling():
    grid = [40, 80, 160]
    one = [count_intersecting(enumerate_solutions(AP3, n), DISCRETE3, {n // 2}) for n in grid]
    two = [count_intersecting(enumerate_solutions(AP3, n), DISCRETE3, {n // 2, n // 2 + 2}, 2)
           for n in grid]
    slope1 = np.polyfit(np.log(grid), np.log(one), 1)[0]
    slope2 = np.polyfit(np.log(grid), np.log(two), 1)[0]
    assert slope1 <= 1 + 0.1 and slope2 <= 0 + 0.1


def test_value_index_consistent_with_supports():
    sols = enumerate_solutions(SIDON, 6)
    for v in range(1, 7):
        ids = sols.containing(v)
        assert list(ids) == [i for i in range(len(sols)) if v in sols[i].support]
    assert len(sols.containing(0)) == 0


def test_growth_exponents():
    fit = growth_exponent(AP3, "proper", [50, 100, 200, 400])
    assert fit.theoretical == 2 and abs(fit.slope - 2) <= 0.1
    fit = growth_exponent(SIDON, "proper", [20, 40, 80])
    assert abs(fit.slope - 3) <= 0.15
    fit = growth_exponent(SCHUR, "proper", [50, 100, 200, 400])
    assert abs(fit.slope - 2) <= 0.1
    with pytest.raises(ZeroCount):
        growth_exponent(SIDON, "proper", [2, 3, 4])


@pytest.mark.parametrize("spec,family,n", [
    (AP3, DISCRETE3, 5), (AP3, None, 6), (SCHUR, partition_family(SCHUR.A), 8),
    (SIDON, partition_family(SIDON.A), 6), (SystemSpec([[1, 1, 1, 1, -1]], [6]), None, 6),
])
@pytest.mark.parametrize("p", [Fraction(1, 2), Fraction(1, 3), Fraction(9, 10), 0, 1])
def test_exact_moments_match_all_pairs(spec, family, n, p):
    sols = enumerate_solutions(spec, n)
    mask = sols.typed_mask(family)
    listed = [tuple(v) for v in sols.values[mask].tolist()]
    mean, var = oracles.exact_moments(listed, p)
    assert exact_mean(sols, family, p) == mean
    assert exact_variance(sols, family, p) == var >= 0


def test_exact_moment_examples():
    sols = enumerate_solutions(AP3, 5)
    mom = exact_moments(sols, DISCRETE3, Fraction(1, 2))
    assert mom.mean == 1 and mom.variance == Fraction(7, 2)
    assert mom.to_dict()["variance"] == "7/2"
    assert exact_mean(sols, DISCRETE3, 1) == 8 and exact_mean(sols, DISCRETE3, 0) == 0


def test_support_table_counts():
    sols = enumerate_solutions(SCHUR, 9)
    table = sols.support_table(sols.typed_mask(None))
    assert table.total() == len(sols)
    rng = np.random.default_rng(0)
    for _ in range(20):
        member = np.zeros(10, dtype=bool)
        member[1:] = rng.random(9) < 0.6
        want = sum(all(member[v] for v in x) for x in sols.values.tolist())
        assert table.count_in(member) == want


def test_exports():
    sols = enumerate_solutions(AP3, 3)
    assert sols.to_lines() == "1 1 1\n1 2 3\n2 2 2\n3 2 1\n3 3 3\n"
    assert json.loads(sols.to_json()) == [[1, 1, 1], [1, 2, 3], [2, 2, 2], [3, 2, 1], [3, 3, 3]]
