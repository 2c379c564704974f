import random
from fractions import Fraction
from itertools import permutations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from linsolcount import exact_linalg as el
from linsolcount.errors import BadPartition, DegenerateDenominator, DimensionMismatch, TooLarge
from linsolcount.exact_linalg import IntMatrix
from linsolcount.partitions import Partition, PartitionFamily, enumerate_partitions
from linsolcount.system_properties import (
    SystemSpec,
    admissible_family,
    check_theorem_preconditions,
    contract,
    density,
    is_abundant,
    is_irredundant,
    is_positive,
    is_strictly_balanced,
    partition_family,
    positive_partition_family,
    positive_witness,
    property_report,
)

AP3 = [[1, -2, 1]]
SCHUR = [[1, 1, -1]]
SIDON = [[1, 1, -1, -1]]
AP4 = [[1, -2, 1, 0], [0, 1, -2, 1]]
FIVE = [[1, 1, 1, 1, -1]]


def test_system_spec_defaults_and_checks():
    s = SystemSpec(AP3)
    assert s.b == (0,) and s.homogeneous and (s.r, s.m) == (1, 3)
    with pytest.raises(DimensionMismatch):
        SystemSpec([[1, 2], [3, 4]])
    with pytest.raises(DimensionMismatch):
        SystemSpec(AP3, [1, 2])


def test_positivity_examples():
    assert is_positive(AP3)
    # small exhaustive search agrees that a positive witness exists
    assert oracles.has_positive_solution(AP3, 10)
    assert not is_positive([[1, 1, 1]])
    assert not oracles.has_positive_solution([[1, 1, 1]], 6)
    assert is_positive(FIVE)
    assert IntMatrix(FIVE).dot((1, 2, 3, 4, 10)) == (0,)
    assert not is_positive([[2, -2]])  # (1,1) solves it but x1 = x2 always


@settings(max_examples=150, deadline=None)
@given(st.lists(st.integers(-3, 3), min_size=2, max_size=5))
def test_witness_is_positive_integer_kernel_vector(row):
    w = positive_witness([row])
    if w is not None:
        assert all(isinstance(v, int) and v >= 1 for v in w)
        assert IntMatrix([row]).dot(w) == (0,)
    if oracles.has_positive_solution([row], 4):
        assert w is not None


def _separating_solution_exists(rows, i, j, box=3):
    from itertools import product
    m = len(rows[0])
    return any(x[i] != x[j] and all(sum(a * v for a, v in zip(r, x)) == 0 for r in rows)
               for x in product(range(-box, box + 1), repeat=m))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(-2, 2), min_size=2, max_size=4))
def test_irredundancy_matches_witness_search(row):
    m = len(row)
    expected = all(_separating_solution_exists([row], i, j)
                   for i in range(m) for j in range(i + 1, m))
    # a small box suffices: the kernel has a basis with entries bounded by 2
    assert is_irredundant([row]) == expected


def test_positivity_invariant_under_column_permutation_and_row_scaling():
    rng = random.Random(3)
    for _ in range(150):
        m = rng.randint(2, 5)
        r = rng.randint(1, m - 1)
        A = [[rng.randint(-3, 3) for _ in range(m)] for _ in range(r)]
        perm = list(range(m))
        rng.shuffle(perm)
        B = [[row[k] for k in perm] for row in A]
        C = [[v * f for v in row] for row, f in
             zip(A, (rng.choice([-3, -1, 2, 5]) for _ in A))]
        assert is_positive(A) == is_positive(B) == is_positive(C)


def test_abundance_examples():
    assert is_abundant(AP3)
    assert is_abundant(SIDON)
    assert not is_abundant([[1, -1]])
    assert not is_abundant([[0, 0, 0]])


@pytest.mark.parametrize("rows,expected", [
    (AP3, Fraction(3, 2)), (SIDON, Fraction(4, 3)), (SCHUR, Fraction(3, 2)),
    (AP4, Fraction(2)), (FIVE, Fraction(5, 4)),
])
def test_density_matches_exhaustive_oracle(rows, expected):
    assert density(rows) == expected == oracles.density(rows)


def test_density_degenerate_denominator():
    with pytest.raises(DegenerateDenominator):
        density([[1, 0, 0], [0, 1, 0]])


def test_density_lower_bound_on_positive_pool():
    rng = random.Random(11)
    seen = 0
    for _ in range(300):
        m = rng.randint(3, 5)
        A = [[rng.randint(-3, 3) for _ in range(m)]]
        if is_positive(A):
            seen += 1
            rk = el.rank(A)
            assert density(A) >= Fraction(m, m - rk)
            assert density(A) == oracles.density(A)
    assert seen > 20


def test_contract_examples():
    assert contract(FIVE, Partition([[1], [2], [3, 4, 5]])).tolist() == [[1, 1, 1]]
    assert contract(AP3, Partition([[1, 3], [2]])).tolist() == [[2, -2]]
    assert contract(AP4, Partition.discrete(4)) == IntMatrix(AP4)
    with pytest.raises(BadPartition):
        contract(AP3, Partition.discrete(4))


@pytest.mark.parametrize("rows", [AP3, SCHUR, SIDON, AP4, FIVE, [[0, 0, 0]], [[1, 2, 3], [0, 1, 1]]])
def test_partition_family_matches_oracle(rows):
    fam = partition_family(rows)
    got = {tuple(p.classes) for p in fam}
    assert got == set(oracles.rank_preserving_partitions(rows))
    pos = positive_partition_family(rows)
    assert pos.issubset(fam)
    assert Partition.discrete(len(rows[0])) in fam
    assert (Partition.discrete(len(rows[0])) in pos) == is_positive(rows)
    for p in enumerate_partitions(len(rows[0])):
        assert el.rank(contract(rows, p)) <= el.rank(rows)


def test_partition_family_examples():
    fam = partition_family(AP3)
    assert len(fam) == 4 and Partition([[1, 2, 3]]) not in fam
    assert len(partition_family(SCHUR)) == 5
    assert len(partition_family([[0, 0, 0, 0]])) == 15
    y = Partition([[1], [2], [3, 4, 5]])
    assert y in partition_family(FIVE) and y not in positive_partition_family(FIVE)
    assert Partition([[1, 3], [2]]) not in positive_partition_family(AP3)
    with pytest.raises(TooLarge):
        partition_family([[1] * 13])


def test_strictly_balanced():
    assert is_strictly_balanced(AP3)
    # three free-ish columns: Q = {1,2,3} has ratio 3/2 > 5/4 = full ratio
    padded = [[1, -2, 1, 0, 0]]
    assert is_positive(padded)
    assert oracles.density(padded) == Fraction(3, 2) > Fraction(5, 4)
    assert not is_strictly_balanced(padded)


def test_sidon_is_not_strictly_balanced():
    # merging the two left coordinates gives (2 -1 -1): positive, and its
    # density 3/2 beats the full ratio 4/3
    merged = contract(SIDON, Partition([[1, 2], [3], [4]]))
    assert merged.tolist() == [[2, -1, -1]]
    assert Partition([[1, 2], [3], [4]]) in partition_family(SIDON)
    assert is_positive(merged) and oracles.density(merged.tolist()) == Fraction(3, 2)
    assert oracles.density(SIDON) == Fraction(4, 3)
    assert not is_strictly_balanced(SIDON)


def test_property_report():
    rep = property_report(AP3).to_dict()
    assert rep["density"] == "3/2" and rep["positive"] and rep["abundant"]
    assert rep["strictly_balanced"] and rep["partition_family_size"] == 4
    assert rep["positive_partition_family_size"] == 1
    rep = property_report([[1, 1, 1]])
    assert not rep.positive and rep.density is None


def test_preconditions():
    ok = check_theorem_preconditions(SystemSpec(AP3), PartitionFamily.discrete(3), 20)
    assert ok.passed and ok.failed is None and "[1,20]" in ok.caveat
    five = SystemSpec(FIVE, [6])
    bad = check_theorem_preconditions(five, partition_family(FIVE), 20)
    assert not bad.passed and bad.failed == "nonpositive_types_empty"
    # the offending type: x = (1, 2, 3, 3, 3)-like solutions of 1 1 1 contracted
    assert IntMatrix(FIVE).dot((1, 2, 3, 3, 3)) == (6,)


def test_preconditions_fail_at_integer_solvability():
    spec = SystemSpec([[2, -2, 2, -2]], [3])
    rep = check_theorem_preconditions(spec, PartitionFamily.discrete(4), 10)
    assert rep.failed in ("positive", "integer_solvable")
    spec = SystemSpec([[2, -4, 2]], [3])
    rep = check_theorem_preconditions(spec, PartitionFamily.discrete(3), 10)
    assert rep.failed == "integer_solvable"


def test_admissible_family_drops_nonpositive_types_with_solutions():
    fam = admissible_family(FIVE, [6], 20)
    assert Partition([[1], [2], [3, 4, 5]]) not in fam
    assert Partition.discrete(5) in fam
    assert check_theorem_preconditions(SystemSpec(FIVE, [6]), fam, 20).passed


def test_preconditions_report_every_check():
    rep = check_theorem_preconditions(SystemSpec([[2, 0]], [3]), PartitionFamily.discrete(2), 5)
    checks = dict(rep.to_dict()["checks"])
    assert checks["integer_solvable"] is False
    # (2 0) is not positive either, and that check comes first
    assert rep.failed == "positive"
