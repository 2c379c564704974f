"""Structural predicates of integer systems ``Ax = b``.

Positivity, abundance, density, partition contraction and the families
of rank-preserving and positive partitions, plus the hypothesis check that
gates the normal-limit experiments.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Optional, Sequence

from . import exact_linalg as el
from .errors import (
    BadPartition,
    DegenerateDenominator,
    DimensionMismatch,
    Inconsistent,
    TooLarge,
)
from .exact_linalg import IntMatrix, as_matrix
from .partitions import (
    MAX_PARTITION_M,
    Partition,
    PartitionFamily,
    enumerate_partitions,
    partition_of,
)

__all__ = [
    "SystemSpec",
    "PropertyReport",
    "PreconditionReport",
    "positive_witness",
    "is_positive",
    "is_irredundant",
    "is_abundant",
    "density",
    "contract",
    "partition_family",
    "positive_partition_family",
    "admissible_family",
    "is_strictly_balanced",
    "partition_of",
    "enumerate_partitions",
    "property_report",
    "check_theorem_preconditions",
]


@dataclass(frozen=True)
class SystemSpec:
    """A system ``Ax = b`` with more columns than rows."""

    A: IntMatrix
    b: tuple[int, ...] = None
    family: Optional[PartitionFamily] = None

    def __post_init__(self):
        A = as_matrix(self.A)
        object.__setattr__(self, "A", A)
        b = tuple(int(v) for v in self.b) if self.b is not None else (0,) * A.rows
        object.__setattr__(self, "b", b)
        if len(b) != A.rows:
            raise DimensionMismatch(f"b has length {len(b)}, A has {A.rows} rows")
        if A.cols <= A.rows:
            raise DimensionMismatch(f"need more columns than rows, got {A.rows}x{A.cols}")
        if self.family is not None and self.family.m != A.cols:
            raise BadPartition("partition family is over the wrong ground set")

    @property
    def m(self) -> int:
        return self.A.cols

    @property
    def r(self) -> int:
        return self.A.rows

    @property
    def homogeneous(self) -> bool:
        return not any(self.b)


def positive_witness(A) -> Optional[tuple[int, ...]]:
    """An integer ``x`` with ``Ax = 0`` and every entry >= 1, or None.

    Solves ``A y = -A 1, y >= 0`` exactly and returns ``x = y + 1`` scaled
    to integers.  The homogeneous cone is scale invariant, so rational
    feasibility of ``x >= 1`` is the same as an all-positive integer solution.
    """
    A = as_matrix(A)
    shift = [-s for s in A.dot([1] * A.cols)]
    y = el.nonnegative_solution(A, shift)
    if y is None:
        return None
    return el.integer_scaled([v + 1 for v in y])


def is_irredundant(A) -> bool:
    """Every pair of coordinates is separated by some homogeneous solution."""
    A = as_matrix(A)
    rk = el.rank(A)
    for i, j in combinations(range(A.cols), 2):
        e = [0] * A.cols
        e[i], e[j] = 1, -1
        if el.rank(el.with_row(A, e)) == rk:
            return False
    return True


def is_positive(A) -> bool:
    A = as_matrix(A)
    return positive_witness(A) is not None and is_irredundant(A)


def is_abundant(A) -> bool:
    A = as_matrix(A)
    rk = el.rank(A)
    if rk == 0:
        return False
    m = A.cols
    for k in (1, 2):
        for drop in combinations(range(1, m + 1), min(k, m)):
            if el.rank(el.select_columns(A, el.complement(m, drop))) != rk:
                return False
    return True


def _subset_ratios(A: IntMatrix):
    """Yield ``(Q, |Q| / (|Q| - r_Q))`` over every nonempty Q."""
    m = A.cols
    rk = el.rank(A)
    for size in range(1, m + 1):
        for Q in combinations(range(1, m + 1), size):
            r_Q = rk - el.rank(el.select_columns(A, el.complement(m, Q)))
            denom = size - r_Q
            if denom <= 0:
                raise DegenerateDenominator(f"|Q| - r_Q = {denom} for Q={Q}")
            yield Q, Fraction(size, denom)


def density(A) -> Fraction:
    """``max |Q| / (|Q| - r_Q)`` over all nonempty column sets, exactly.

    Meaningful for positive matrices; a zero denominator raises
    :class:`DegenerateDenominator`.
    """
    return max(ratio for _, ratio in _subset_ratios(as_matrix(A)))


def contract(A, p: Partition) -> IntMatrix:
    """Sum the columns within each class of ``p``; classes in min-order."""
    A = as_matrix(A)
    if not isinstance(p, Partition):
        p = Partition(p)
    if p.m != A.cols:
        raise BadPartition(f"partition of [{p.m}] for a matrix with {A.cols} columns")
    return IntMatrix([[sum(row[i - 1] for i in c) for c in p.classes] for row in A])


@lru_cache(maxsize=256)
def _family_cached(A: IntMatrix) -> tuple[tuple[Partition, ...], tuple[Partition, ...]]:
    if A.cols > MAX_PARTITION_M:
        raise TooLarge(f"{A.cols} columns exceeds the partition cap {MAX_PARTITION_M}")
    rk = el.rank(A)
    keep, positive = [], []
    for p in enumerate_partitions(A.cols):
        C = contract(A, p)
        if el.rank(C) == rk:
            keep.append(p)
            if is_positive(C):
                positive.append(p)
    return tuple(keep), tuple(positive)


def partition_family(A) -> PartitionFamily:
    """All partitions whose contraction keeps the rank of ``A``."""
    A = as_matrix(A)
    return PartitionFamily(A.cols, _family_cached(A)[0])


def positive_partition_family(A) -> PartitionFamily:
    """Members of :func:`partition_family` whose contraction is positive."""
    A = as_matrix(A)
    return PartitionFamily(A.cols, _family_cached(A)[1])


def _has_proper_solution(A: IntMatrix, b: Sequence[int], n_max: int) -> bool:
    from .census import solve_box  # census depends on this module

    try:
        sols = solve_box(A, b, n_max)
    except Inconsistent:
        return False
    return bool(sols.proper_mask().any())


def admissible_family(A, b: Sequence[int], n_max: int,
                      family: Optional[PartitionFamily] = None) -> PartitionFamily:
    """Drop partitions that would break the positivity hypothesis.

    Keeps every member of ``family`` (default: all rank-preserving
    partitions) that is positive, or whose contraction has no proper
    solution inside ``[n_max]``.
    """
    A = as_matrix(A)
    family = partition_family(A) if family is None else family
    pos = positive_partition_family(A)
    keep = [p for p in family
            if p in pos or not _has_proper_solution(contract(A, p), b, n_max)]
    return PartitionFamily(A.cols, keep)


def is_strictly_balanced(A) -> bool:
    """Full ratio ``m/(m - rank)`` beats every proper subset and every
    positive non-discrete contraction."""
    A = as_matrix(A)
    m = A.cols
    full = None
    rest = []
    for Q, ratio in _subset_ratios(A):
        if len(Q) == m:
            full = ratio
        else:
            rest.append(ratio)
    if rest and full <= max(rest):
        return False
    for p in positive_partition_family(A):
        if not p.is_discrete and full <= density(contract(A, p)):
            return False
    return True


@dataclass
class PropertyReport:
    rank: int
    positive: bool
    abundant: bool
    density: Optional[Fraction]
    strictly_balanced: Optional[bool]
    n_partitions: Optional[int]
    n_positive_partitions: Optional[int]
    witness: Optional[tuple[int, ...]] = None

    def to_dict(self) -> dict:
        return {
            "rank": self.rank,
            "positive": self.positive,
            "abundant": self.abundant,
            "density": None if self.density is None else fraction_str(self.density),
            "strictly_balanced": self.strictly_balanced,
            "partition_family_size": self.n_partitions,
            "positive_partition_family_size": self.n_positive_partitions,
            "positive_witness": None if self.witness is None else list(self.witness),
        }


def fraction_str(q: Fraction) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def property_report(A) -> PropertyReport:
    A = as_matrix(A)
    witness = positive_witness(A)
    positive = witness is not None and is_irredundant(A)
    small = A.cols <= MAX_PARTITION_M
    return PropertyReport(
        rank=el.rank(A),
        positive=positive,
        abundant=is_abundant(A),
        density=density(A) if positive else None,
        strictly_balanced=is_strictly_balanced(A) if positive and small else None,
        n_partitions=len(partition_family(A)) if small else None,
        n_positive_partitions=len(positive_partition_family(A)) if small else None,
        witness=witness if positive else None,
    )


@dataclass
class PreconditionReport:
    passed: bool
    failed: Optional[str]
    checks: list[tuple[str, bool]] = field(default_factory=list)
    caveat: str = ""

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "failed": self.failed,
            "checks": {name: ok for name, ok in self.checks},
            "caveat": self.caveat,
        }


def check_theorem_preconditions(spec: SystemSpec, family: PartitionFamily,
                                n_max: int) -> PreconditionReport:
    """Check the hypotheses of the normal-limit theorem for ``(A, b, family)``.

    Every check is evaluated; ``failed`` names the first one that fails in
    the order positive, abundant, integer_solvable, family_in_partition_family,
    discrete_in_family, nonpositive_types_empty.

    Proper solutions of non-positive contractions are only searched for in
    ``[n_max]``; emptiness over all of Z is not decided.
    """
    A, b = spec.A, spec.b
    caveat = (f"proper solutions of non-positive contractions searched in [1,{n_max}] only")
    checks: list[tuple[str, bool]] = []

    def tests():
        yield "positive", lambda: is_positive(A)
        yield "abundant", lambda: is_abundant(A)
        yield "integer_solvable", lambda: el.solvable_over_integers(A, b)
        yield "family_in_partition_family", lambda: family.issubset(partition_family(A))
        yield "discrete_in_family", lambda: Partition.discrete(A.cols) in family
        yield "nonpositive_types_empty", lambda: all(
            p in positive_partition_family(A)
            or not _has_proper_solution(contract(A, p), b, n_max)
            for p in family)

    for name, test in tests():
        checks.append((name, bool(test())))
    failed = next((name for name, ok in checks if not ok), None)
    return PreconditionReport(failed is None, failed, checks, caveat)
