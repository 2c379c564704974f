"""Compounded matrices: block systems whose proper solutions are pairs (or
chains) of solutions overlapping in a prescribed set of coordinates.

Column layout of ``compound(A, B, M)``: columns of A outside the domain
of M (ascending), then the shared columns (ascending in the domain), then
columns of B outside the image (ascending).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from . import exact_linalg as el
from .errors import BadEmbedding, NotAbundant, RankIdentityViolation
from .exact_linalg import IntMatrix, as_matrix
from .system_properties import is_abundant


@dataclass(frozen=True)
class Embedding:
    """Injective map from columns of A to columns of B, as sorted 1-based pairs."""

    pairs: tuple[tuple[int, int], ...] = ()

    def __init__(self, pairs: Iterable[tuple[int, int]] = ()):
        pairs = tuple(sorted((int(p), int(q)) for p, q in pairs))
        dom = [p for p, _ in pairs]
        img = [q for _, q in pairs]
        if len(set(dom)) != len(dom) or len(set(img)) != len(img):
            raise BadEmbedding(f"embedding {pairs} is not injective")
        object.__setattr__(self, "pairs", pairs)

    @classmethod
    def identity(cls, Q: Iterable[int]) -> "Embedding":
        return cls((q, q) for q in Q)

    @property
    def domain(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.pairs)

    @property
    def image(self) -> tuple[int, ...]:
        return tuple(q for _, q in self.pairs)

    def __len__(self):
        return len(self.pairs)

    def check(self, mA: int, mB: int) -> None:
        for p, q in self.pairs:
            if not (1 <= p <= mA and 1 <= q <= mB):
                raise BadEmbedding(f"pair ({p}, {q}) outside [{mA}] x [{mB}]")


@dataclass
class CompoundResult:
    matrix: IntMatrix
    rho_A: dict[int, int]
    rho_B: dict[int, int]
    predicted_rank: Optional[int] = None
    notes: list[str] = field(default_factory=list)

    @property
    def rank(self) -> int:
        return el.rank(self.matrix)


def compound(A, B, M: Embedding = Embedding()) -> CompoundResult:
    A, B = as_matrix(A), as_matrix(B)
    if not isinstance(M, Embedding):
        M = Embedding(M)
    M.check(A.cols, B.cols)
    dom = set(M.domain)
    img = set(M.image)
    a_only = [j for j in range(1, A.cols + 1) if j not in dom]
    b_only = [j for j in range(1, B.cols + 1) if j not in img]

    rho_A, rho_B = {}, {}
    top, bottom = [[] for _ in range(A.rows)], [[] for _ in range(B.rows)]
    col = 0
    for j in a_only:
        col += 1
        rho_A[col] = j
        for i in range(A.rows):
            top[i].append(A[i, j - 1])
        for i in range(B.rows):
            bottom[i].append(0)
    for p, q in M.pairs:
        col += 1
        rho_A[col] = p
        rho_B[col] = q
        for i in range(A.rows):
            top[i].append(A[i, p - 1])
        for i in range(B.rows):
            bottom[i].append(B[i, q - 1])
    for j in b_only:
        col += 1
        rho_B[col] = j
        for i in range(A.rows):
            top[i].append(0)
        for i in range(B.rows):
            bottom[i].append(B[i, j - 1])
    return CompoundResult(IntMatrix(top + bottom, cols=col), rho_A, rho_B)


def self_compound(A, Q: Iterable[int]) -> CompoundResult:
    """``A`` compounded with itself along the identity on ``Q``.

    The rank always equals ``rank(A) + rank(A^{complement of Q})``; a
    mismatch raises :class:`RankIdentityViolation`.
    """
    A = as_matrix(A)
    Q = sorted(set(Q))
    res = compound(A, A, Embedding.identity(Q))
    res.predicted_rank = el.rank(A) + el.rank(el.select_columns(A, el.complement(A.cols, Q)))
    if res.rank != res.predicted_rank:
        raise RankIdentityViolation(f"rank {res.rank} != {res.predicted_rank} for Q={Q}")
    return res


def milky_way_matrix(A, i: int, t: int) -> CompoundResult:
    """``t + 2`` copies of ``A`` all sharing the single column ``i``.

    Built left to right: ``A x_{id} A``, then ``t`` further copies each glued
    on the current shared column.  Rank is ``rank(A) + (t+1) rank(A^{-i})``.
    """
    A = as_matrix(A)
    if t < 1:
        raise ValueError("t must be at least 1")
    if not is_abundant(A):
        raise NotAbundant("milky-way construction needs an abundant matrix")
    m = A.cols
    res = compound(A, A, Embedding.identity([i]))
    for j in range(1, t + 1):
        shared = j * m - j + 1
        if res.rho_B.get(shared) != i:
            raise RankIdentityViolation(f"shared column not at {shared}")
        res = compound(res.matrix, A, Embedding([(shared, i)]))
    rest = el.rank(el.select_columns(A, el.complement(m, [i])))
    res.predicted_rank = el.rank(A) + (t + 1) * rest
    if res.rank != res.predicted_rank:
        raise RankIdentityViolation(f"rank {res.rank} != {res.predicted_rank}")
    return res


def always_zero_coordinates(A) -> tuple[int, ...]:
    """Coordinates (1-based) that vanish on every solution of ``Ax = 0``."""
    A = as_matrix(A)
    basis = el.null_space_basis(A)
    return tuple(j + 1 for j in range(A.cols) if all(v[j] == 0 for v in basis))


def has_nowhere_zero_null_vector(A) -> bool:
    return not always_zero_coordinates(A)


def extend_Q(A, Q: Iterable[int]) -> tuple[int, ...]:
    """Grow ``Q`` by the always-zero coordinates of the remaining columns."""
    A = as_matrix(A)
    Q = sorted(set(Q))
    rest = el.complement(A.cols, Q)
    zero = always_zero_coordinates(el.select_columns(A, rest))
    return tuple(sorted(set(Q) | {rest[z - 1] for z in zero}))
