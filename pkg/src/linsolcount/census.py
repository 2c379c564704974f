"""Enumeration and classification of solutions inside a box ``[n]^m``.

Solutions are held column-wise in a numpy array rather than as Python
objects; the random-set experiments need millions of them.  The exact
first and second moments of the solution count in a binomial random set
are computed here with rational arithmetic.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from . import exact_linalg as el
from .errors import BoxTooLarge, Inconsistent, ZeroCount
from .exact_linalg import IntMatrix, as_matrix
from .partitions import Partition, PartitionFamily
from .system_properties import SystemSpec, contract

DEFAULT_MAX_BOX = 10**8
BOX_ENV = "LINSOLCOUNT_MAX_BOX"
_CHUNK = 1 << 20
_I63 = 2**62


def max_box() -> int:
    return int(os.environ.get(BOX_ENV, DEFAULT_MAX_BOX))


@dataclass(frozen=True)
class Solution:
    values: tuple[int, ...]
    support: tuple[int, ...]
    shape: Partition


def _value_dtype(n: int):
    if n < 2**15:
        return np.int16
    if n < 2**31:
        return np.int32
    return np.int64


class SolutionList:
    """All solutions of ``Ax = b`` in ``[1, n]^m``, sorted by value tuple."""

    def __init__(self, A: IntMatrix, b: Sequence[int], n: int, values: np.ndarray,
                 system: Optional[SystemSpec] = None):
        self.A = A
        self.b = tuple(b)
        self.n = n
        self.values = values
        self.system = system

    @property
    def m(self) -> int:
        return self.A.cols

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, i: int) -> Solution:
        vals = tuple(int(v) for v in self.values[i])
        return Solution(vals, tuple(sorted(set(vals))), Partition.from_rgs(self._rgs(vals)))

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    @staticmethod
    def _rgs(vals):
        first: dict[int, int] = {}
        return [first.setdefault(v, len(first)) for v in vals]

    @cached_property
    def sorted_values(self) -> np.ndarray:
        return np.sort(self.values, axis=1)

    @cached_property
    def _first_occurrence(self) -> np.ndarray:
        """Mask over ``sorted_values`` marking the first copy of each value."""
        s = self.sorted_values
        new = np.ones(s.shape, dtype=bool)
        if s.shape[1] > 1:
            new[:, 1:] = s[:, 1:] != s[:, :-1]
        return new

    @cached_property
    def support_sizes(self) -> np.ndarray:
        return self._first_occurrence.sum(axis=1).astype(np.int64)

    @cached_property
    def shape_codes(self) -> np.ndarray:
        """RGS code of each solution's partition (see :meth:`Partition.code`)."""
        v = self.values
        S, m = v.shape
        labels = np.zeros((S, m), dtype=np.int8)
        nxt = np.zeros(S, dtype=np.int8)
        code = np.zeros(S, dtype=np.int64)
        for j in range(m):
            lab = np.full(S, -1, dtype=np.int8)
            for i in range(j):
                hit = (lab < 0) & (v[:, i] == v[:, j])
                lab[hit] = labels[hit, i]
            fresh = lab < 0
            lab[fresh] = nxt[fresh]
            nxt[fresh] += 1
            labels[:, j] = lab
            code += lab.astype(np.int64) * m**j
        return code

    def proper_mask(self) -> np.ndarray:
        return self.support_sizes == self.m

    def typed_mask(self, family: Optional[PartitionFamily]) -> np.ndarray:
        """Solutions whose partition lies in ``family`` (None means all)."""
        if family is None:
            return np.ones(len(self), dtype=bool)
        if len(family) == 0:
            return np.zeros(len(self), dtype=bool)
        if len(family) == 1 and next(iter(family)).is_discrete:
            return self.proper_mask()
        return np.isin(self.shape_codes, np.array(family.codes(), dtype=np.int64))

    def shape_counts(self) -> dict[Partition, int]:
        _, first, counts = np.unique(self.shape_codes, return_index=True, return_counts=True)
        rep = {self[int(i)].shape: int(k) for i, k in zip(first, counts)}
        return dict(sorted(rep.items(), key=lambda kv: kv[0].rgs()))

    @cached_property
    def _index(self) -> tuple[np.ndarray, np.ndarray]:
        new = self._first_occurrence
        vals = self.sorted_values[new].astype(np.int64)
        ids = np.nonzero(new)[0].astype(np.int64)
        order = np.argsort(vals, kind="stable")
        offsets = np.zeros(self.n + 2, dtype=np.int64)
        np.cumsum(np.bincount(vals, minlength=self.n + 1), out=offsets[1:])
        return offsets, ids[order]

    def containing(self, value: int) -> np.ndarray:
        """Ids of solutions whose support contains ``value`` (ascending)."""
        if not 1 <= value <= self.n:
            return np.zeros(0, dtype=np.int64)
        offsets, ids = self._index
        return ids[offsets[value]:offsets[value + 1]]

    @property
    def index(self) -> dict[int, np.ndarray]:
        return {v: self.containing(v) for v in range(1, self.n + 1)}

    def support_table(self, mask: Optional[np.ndarray] = None) -> "SupportTable":
        return SupportTable.build(self, mask)

    def to_lines(self) -> str:
        return "".join(" ".join(map(str, row)) + "\n" for row in self.values.tolist())

    def to_json(self) -> str:
        return json.dumps(self.values.tolist())


def _dense_ids(rows: np.ndarray, base: int) -> np.ndarray:
    """Map equal rows to equal nonnegative ids."""
    width = rows.shape[1]
    if base**width < _I63:
        keys = np.zeros(len(rows), dtype=np.int64)
        for j in range(width):
            keys = keys * base + rows[:, j].astype(np.int64)
        return keys
    _, inv = np.unique(rows, axis=0, return_inverse=True)
    return inv.reshape(-1).astype(np.int64)


def _group_sum(keys: np.ndarray, weights: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if len(keys) == 0:
        return keys, weights
    order = np.argsort(keys, kind="stable")
    k = keys[order]
    starts = np.concatenate(([0], np.nonzero(k[1:] != k[:-1])[0] + 1))
    return k[starts], np.add.reduceat(weights[order], starts)


@dataclass
class SupportTable:
    """Distinct supports grouped by size, each with the number of solutions sharing it.

    ``by_size[k] = (V, w)``: ``V`` has shape ``(k, N_k)`` (column-major for
    fast per-position gathers) and ``w[i]`` counts solutions with support
    ``V[:, i]``.
    """

    n: int
    by_size: dict

    @classmethod
    def build(cls, sols: SolutionList, mask: Optional[np.ndarray] = None) -> "SupportTable":
        sizes = sols.support_sizes
        if mask is None:
            mask = np.ones(len(sols), dtype=bool)
        by_size = {}
        for k in np.unique(sizes[mask]).tolist():
            sel = mask & (sizes == k)
            rows = sols.sorted_values[sel][sols._first_occurrence[sel]].reshape(-1, k)
            keys = _dense_ids(rows, sols.n + 1)
            order = np.argsort(keys, kind="stable")
            ks = keys[order]
            starts = np.concatenate(([0], np.nonzero(ks[1:] != ks[:-1])[0] + 1)) if len(ks) else ks
            uniq = rows[order][starts]
            counts = np.diff(np.concatenate((starts, [len(ks)]))).astype(np.int64)
            by_size[k] = (np.ascontiguousarray(uniq.T), counts)
        return cls(sols.n, by_size)

    def total(self) -> int:
        return sum(int(w.sum()) for _, w in self.by_size.values())

    def count_in(self, member: np.ndarray) -> int:
        """Weighted number of supports contained in the set with boolean
        membership ``member`` (indexed by value, length ``n + 1``)."""
        total = 0
        for V, w in self.by_size.values():
            inside = member[V[0]]
            for row in V[1:]:
                inside &= member[row]
            total += int(w[inside].sum())
        return total


def solve_box(A, b: Sequence[int], n: int, limit: Optional[int] = None,
              system: Optional[SystemSpec] = None) -> SolutionList:
    """Every ``x`` in ``[1, n]^m`` with ``Ax = b``.

    The free columns (complement of the lexicographically first column
    basis) range over the box; the pivot columns are recovered exactly from
    an integer adjugate-style inverse and kept when integral and in range.
    """
    A = as_matrix(A)
    b = tuple(int(v) for v in b)
    m = A.cols
    if n < 1:
        raise ValueError("n must be at least 1")
    if el.solve_particular(A, b) is None:
        raise Inconsistent("b is not in the column space of A")
    pivots = el.column_basis(A)
    free = [j for j in range(1, m + 1) if j not in set(pivots)]
    rk, f = len(pivots), len(free)
    grid = n**f
    limit = max_box() if limit is None else limit
    if grid > limit:
        raise BoxTooLarge(f"{n}^{f} = {grid} free assignments exceeds the guard {limit}")

    if rk:
        AP = el.select_columns(A, pivots)
        rows = el.row_basis(AP)
        inv = el.inverse(IntMatrix([AP.row(i) for i in rows]))
        D = math.lcm(*(x.denominator for row in inv for x in row))
        adj = [[int(x * D) for x in row] for row in inv]
        bR = [b[i] for i in rows]
        FR = [[A.row(i)[j - 1] for j in free] for i in rows]
        c0 = [sum(a * v for a, v in zip(row, bR)) for row in adj]
        C = [[sum(adj[r][t] * FR[t][j] for t in range(rk)) for j in range(f)] for r in range(rk)]
    else:
        D, c0, C = 1, [], []

    bound = max([abs(c) + n * sum(abs(x) for x in row) for c, row in zip(c0, C)] + [n])
    dtype = np.int64 if bound < _I63 else object
    c0a = np.array(c0, dtype=dtype).reshape(rk)
    Ca = np.array(C, dtype=dtype).reshape(rk, f)
    powers = [n ** (f - 1 - j) for j in range(f)]
    piv_idx = [p - 1 for p in pivots]
    free_idx = [j - 1 for j in free]

    out_dtype = _value_dtype(n)
    chunks = []
    for start in range(0, grid, _CHUNK):
        idx = np.arange(start, min(grid, start + _CHUNK), dtype=np.int64)
        xF = np.empty((len(idx), f), dtype=dtype)
        for j, pw in enumerate(powers):
            xF[:, j] = (idx // pw) % n + 1
        num = c0a - xF @ Ca.T if rk else np.zeros((len(idx), 0), dtype=dtype)
        ok = (num % D == 0).all(axis=1)
        xP = num[ok] // D
        ok_range = ((xP >= 1) & (xP <= n)).all(axis=1)
        block = np.empty((int(ok_range.sum()), m), dtype=np.int64)
        block[:, piv_idx] = xP[ok_range]
        block[:, free_idx] = xF[ok][ok_range]
        chunks.append(block.astype(out_dtype))

    values = np.concatenate(chunks) if chunks else np.zeros((0, m), dtype=out_dtype)
    if len(values):
        values = values[np.lexsort(values.T[::-1])]
    return SolutionList(A, b, n, values, system)


def enumerate_solutions(spec: SystemSpec, n: int, limit: Optional[int] = None) -> SolutionList:
    return solve_box(spec.A, spec.b, n, limit=limit, system=spec)


def count_proper(sols: SolutionList) -> int:
    return int(sols.proper_mask().sum())


def count_typed(sols: SolutionList, family: PartitionFamily) -> int:
    return int(sols.typed_mask(family).sum())


def lemma1_check(spec: SystemSpec, p: Partition, n: int) -> tuple[int, int]:
    """``(#solutions of shape p in [n]^m, #proper solutions of A_p in [n]^|p|)``."""
    sols = enumerate_solutions(spec, n)
    left = int((sols.shape_codes == p.code()).sum())
    right = count_proper(solve_box(contract(spec.A, p), spec.b, n))
    return left, right


def count_intersecting(sols: SolutionList, family: Optional[PartitionFamily],
                       Z: Iterable[int], min_hits: int = 1) -> int:
    """Type-``family`` solutions whose support meets ``Z`` in >= ``min_hits`` values."""
    Z = np.array(sorted(set(Z)), dtype=np.int64)
    if len(Z) == 0:
        return 0
    hits = (np.isin(sols.sorted_values, Z) & sols._first_occurrence).sum(axis=1)
    return int((sols.typed_mask(family) & (hits >= min_hits)).sum())


Kind = Union[str, PartitionFamily]


def _count_kind(sols: SolutionList, kind: Kind) -> int:
    if isinstance(kind, PartitionFamily):
        return count_typed(sols, kind)
    if kind == "proper":
        return count_proper(sols)
    if kind == "all":
        return len(sols)
    raise ValueError(f"unknown kind {kind!r}")


@dataclass
class GrowthFit:
    slope: float
    theoretical: int
    n_grid: list[int]
    counts: list[int]


def growth_exponent(spec: SystemSpec, kind: Kind, n_grid: Sequence[int]) -> GrowthFit:
    """Least-squares slope of ``log count`` against ``log n``."""
    n_grid = list(n_grid)
    if len(n_grid) < 3 or sorted(set(n_grid)) != n_grid:
        raise ValueError("need at least three increasing grid points")
    counts = [_count_kind(enumerate_solutions(spec, n), kind) for n in n_grid]
    if min(counts) == 0:
        raise ZeroCount(f"zero count on grid {n_grid}: {counts}")
    slope = float(np.polyfit(np.log(n_grid), np.log(counts), 1)[0])
    return GrowthFit(slope, spec.m - el.rank(spec.A), n_grid, counts)


def exact_mean(sols: SolutionList, family: Optional[PartitionFamily], p) -> Fraction:
    """``E[X] = sum over type-family solutions of p^|support|``."""
    p = Fraction(p)
    sizes = sols.support_sizes[sols.typed_mask(family)]
    ks, counts = np.unique(sizes, return_counts=True)
    return sum((int(c) * p ** int(k) for k, c in zip(ks, counts)), Fraction(0))


def _int_gram(C: np.ndarray) -> list[list[int]]:
    """``C.T @ C`` computed without int64 overflow."""
    colsum = C.sum(axis=0)
    if len(C) and int(colsum.max()) * int(C.max()) >= _I63:
        C = C.astype(object)
    G = C.T @ C
    return [[int(v) for v in row] for row in G]


def exact_variance(sols: SolutionList, family: Optional[PartitionFamily], p,
                   table: Optional[SupportTable] = None) -> Fraction:
    """Exact ``Var(X)`` for the count of type-family solutions in ``[n]_p``.

    Uses ``p^-|I| - 1 = sum over nonempty U in I of u^|U|`` with
    ``u = (1-p)/p``, which turns the sum over intersecting pairs into

        Var = sum_{U nonempty} u^|U| * (sum_{x : U in {x}} p^|{x}|)^2.

    The inner sums only depend on how many supports of each size contain
    ``U``, so everything reduces to integer Gram matrices per ``|U|`` and no
    pair of solutions is ever visited.  ``table`` may pass in a prebuilt
    support table for the same family.
    """
    p = Fraction(p)
    if p == 0 or p == 1:
        return Fraction(0)
    u = (1 - p) / p
    if table is None:
        table = sols.support_table(sols.typed_mask(family))
    sizes = sorted(table.by_size)
    if not sizes:
        return Fraction(0)
    kmax = max(sizes)
    total = Fraction(0)
    for j in range(1, kmax + 1):
        rows, labels, weights = [], [], []
        for k in sizes:
            if k < j:
                continue
            V, w = table.by_size[k]
            for pos in combinations(range(k), j):
                rows.append(V[list(pos)].T)
                labels.append(np.full(len(w), k, dtype=np.int64))
                weights.append(w)
        rows = np.concatenate(rows)
        labels = np.concatenate(labels)
        weights = np.concatenate(weights)
        ids = _dense_ids(rows, table.n + 1)
        uniq_ids, inv = np.unique(ids, return_inverse=True)
        gid = inv.reshape(-1).astype(np.int64) * (kmax + 1) + labels
        g, sums = _group_sum(gid, weights)
        C = np.zeros((len(uniq_ids), kmax + 1), dtype=np.int64)
        C[g // (kmax + 1), g % (kmax + 1)] = sums
        G = _int_gram(C)
        inner = sum((p ** (k + l) * G[k][l] for k in range(kmax + 1) for l in range(kmax + 1)
                     if G[k][l]), Fraction(0))
        total += u**j * inner
    return total


@dataclass
class ExactMoments:
    mean: Fraction
    variance: Fraction
    n: int
    p: Fraction

    def to_dict(self) -> dict:
        from .system_properties import fraction_str

        return {"mean": fraction_str(self.mean), "variance": fraction_str(self.variance),
                "n": self.n, "p": fraction_str(self.p)}


def exact_moments(sols: SolutionList, family: Optional[PartitionFamily], p) -> ExactMoments:
    p = Fraction(p)
    return ExactMoments(exact_mean(sols, family, p), exact_variance(sols, family, p), sols.n, p)
