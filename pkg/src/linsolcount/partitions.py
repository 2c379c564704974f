"""Ordered set partitions of ``{1, ..., m}``.

A partition is stored with its classes sorted internally and ordered by
their minimum element, so two partitions are equal iff they are the same
set partition.  Internally a partition is also identified with its
restricted growth string (RGS): ``rgs[i]`` is the class number of ``i+1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import BadPartition, TooLarge

MAX_PARTITION_M = 12


@dataclass(frozen=True, order=True)
class Partition:
    classes: tuple[tuple[int, ...], ...]

    def __init__(self, classes: Iterable[Iterable[int]]):
        cls = [tuple(sorted(int(i) for i in c)) for c in classes]
        if any(not c for c in cls):
            raise BadPartition("empty partition class")
        cls.sort(key=lambda c: c[0])
        flat = [i for c in cls for i in c]
        if sorted(flat) != list(range(1, len(flat) + 1)):
            raise BadPartition(f"classes {cls} do not partition 1..{len(flat)}")
        object.__setattr__(self, "classes", tuple(cls))

    @property
    def m(self) -> int:
        return sum(len(c) for c in self.classes)

    def __len__(self) -> int:
        return len(self.classes)

    def __iter__(self):
        return iter(self.classes)

    @property
    def is_discrete(self) -> bool:
        return len(self.classes) == self.m

    @classmethod
    def discrete(cls, m: int) -> "Partition":
        return cls([i] for i in range(1, m + 1))

    @classmethod
    def from_rgs(cls, rgs: Sequence[int]) -> "Partition":
        blocks: dict[int, list[int]] = {}
        for i, label in enumerate(rgs, start=1):
            blocks.setdefault(label, []).append(i)
        return cls(blocks.values())

    def rgs(self) -> tuple[int, ...]:
        out = [0] * self.m
        for label, c in enumerate(self.classes):
            for i in c:
                out[i - 1] = label
        return tuple(out)

    def code(self) -> int:
        """Integer key of the RGS in base ``m``; matches the census shape codes."""
        m = self.m
        return sum(label * m**i for i, label in enumerate(self.rgs()))

    def tolist(self) -> list[list[int]]:
        return [list(c) for c in self.classes]

    def __str__(self):
        return "(" + ",".join("{" + ",".join(map(str, c)) + "}" for c in self.classes) + ")"


def partition_of(x: Sequence[int]) -> Partition:
    """The partition grouping equal coordinates of ``x``."""
    first: dict[int, int] = {}
    rgs = []
    for v in x:
        rgs.append(first.setdefault(v, len(first)))
    return Partition.from_rgs(rgs)


def iter_rgs(m: int) -> Iterator[tuple[int, ...]]:
    """Restricted growth strings of length ``m`` in lexicographic order."""
    if m == 0:
        yield ()
        return
    a = [0] * m
    b = [1] * m  # b[i] = 1 + max(a[:i])
    while True:
        yield tuple(a)
        j = m - 1
        while j > 0 and a[j] == b[j]:
            j -= 1
        if j == 0:
            return
        a[j] += 1
        for k in range(j + 1, m):
            a[k] = 0
            b[k] = max(b[j], a[j] + 1)


def enumerate_partitions(m: int) -> list[Partition]:
    if m > MAX_PARTITION_M:
        raise TooLarge(f"m={m} exceeds the partition cap {MAX_PARTITION_M}")
    if m < 1:
        raise ValueError("m must be positive")
    return [Partition.from_rgs(a) for a in iter_rgs(m)]


class PartitionFamily:
    """A set of partitions of the same ``[m]``; iteration is in canonical order."""

    __slots__ = ("m", "_members")

    def __init__(self, m: int, partitions: Iterable[Partition] = ()):
        members = frozenset(partitions)
        for p in members:
            if p.m != m:
                raise BadPartition(f"partition {p} is not over [{m}]")
        self.m = m
        self._members = members

    @classmethod
    def discrete(cls, m: int) -> "PartitionFamily":
        return cls(m, [Partition.discrete(m)])

    def __contains__(self, p) -> bool:
        return p in self._members

    def __len__(self) -> int:
        return len(self._members)

    def __iter__(self) -> Iterator[Partition]:
        return iter(sorted(self._members, key=lambda p: p.rgs()))

    def __eq__(self, other):
        if not isinstance(other, PartitionFamily):
            return NotImplemented
        return self.m == other.m and self._members == other._members

    def __hash__(self):
        return hash((self.m, self._members))

    def __repr__(self):
        return f"PartitionFamily({self.m}, [{', '.join(str(p) for p in self)}])"

    def issubset(self, other: "PartitionFamily") -> bool:
        return self._members <= other._members

    def codes(self) -> list[int]:
        return [p.code() for p in self]

    def tolist(self) -> list[list[list[int]]]:
        return [p.tolist() for p in self]
