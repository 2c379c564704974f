"""Structural probes on tuples of solutions.

Support hypergraphs, their vertex cover number, the milky-way shape (disjoint
sunflowers with one-vertex cores), the share of intersecting solution pairs
that overlap in exactly one value, and a ranking of overlap patterns
``(p, q, M)`` by their weighted pair counts.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations
from typing import Iterable, Optional, Sequence

import numpy as np

from . import census
from . import exact_linalg as el
from .census import Solution, SolutionList
from .compounded import Embedding, compound
from .errors import Inconsistent, TooLarge
from .partitions import Partition, PartitionFamily
from .system_properties import SystemSpec, contract, fraction_str

MAX_COVER_VERTICES = 20
MAX_TRIPLE_M = 6
EXACT_PAIRS_UP_TO = 2000


def _support(x) -> frozenset:
    if isinstance(x, Solution):
        return frozenset(x.support)
    return frozenset(int(v) for v in x)


@dataclass(frozen=True)
class SolutionHypergraph:
    """One edge per solution (with multiplicity); vertices are the union."""

    edges: tuple[frozenset, ...]

    @classmethod
    def from_solutions(cls, chi: Iterable) -> "SolutionHypergraph":
        edges = tuple(_support(x) for x in chi)
        if any(not e for e in edges):
            raise ValueError("empty edge")
        return cls(edges)

    @property
    def vertices(self) -> frozenset:
        return frozenset().union(*self.edges)

    def components(self) -> list[list[int]]:
        """Edge indices grouped by connected component, in first-edge order."""
        parent = list(range(len(self.edges)))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        owner: dict[int, int] = {}
        for i, e in enumerate(self.edges):
            for v in e:
                if v in owner:
                    parent[find(i)] = find(owner[v])
                else:
                    owner[v] = i
        groups: dict[int, list[int]] = {}
        for i in range(len(self.edges)):
            groups.setdefault(find(i), []).append(i)
        return list(groups.values())


def vertex_cover_number(H: SolutionHypergraph) -> int:
    """Smallest number of vertices meeting every edge, by exhaustive search."""
    verts = sorted(H.vertices)
    if len(verts) > MAX_COVER_VERTICES:
        raise TooLarge(f"{len(verts)} vertices, exhaustive cover capped at {MAX_COVER_VERTICES}")
    bit = {v: 1 << i for i, v in enumerate(verts)}
    masks = [sum(bit[v] for v in e) for e in H.edges]
    for size in range(len(verts) + 1):
        for chosen in combinations(range(len(verts)), size):
            c = sum(1 << i for i in chosen)
            if all(e & c for e in masks):
                return size
    return len(verts)  # unreachable: the full vertex set is a cover


def is_sunflower_with_point_core(edges: Sequence[frozenset]) -> bool:
    if len(edges) < 2:
        return True
    core = frozenset.intersection(*edges)
    if len(core) != 1:
        return False
    return all(a & b == core for a, b in combinations(edges, 2))


def is_s_milky_way(chi: Sequence, s: int) -> bool:
    """The supports form exactly ``s`` disjoint sunflowers with one-point cores.

    A component made of a single edge counts as a (trivial) sunflower.
    """
    H = SolutionHypergraph.from_solutions(chi)
    comps = H.components()
    if len(comps) != s:
        return False
    return all(is_sunflower_with_point_core([H.edges[i] for i in c]) for c in comps)


@dataclass(frozen=True)
class PairFraction:
    """``hits`` of ``pairs`` intersecting ordered pairs overlap properly in one value."""

    hits: int
    pairs: int
    exact: bool

    @property
    def value(self) -> float:
        # no eligible pairs: vacuously every pair is of the good kind
        return 1.0 if self.pairs == 0 else self.hits / self.pairs


def _overlap_sizes(sols: SolutionList, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    X = sols.sorted_values[xs]
    Y = sols.sorted_values[ys]
    first = sols._first_occurrence[xs]
    shared = (X[:, :, None] == Y[:, None, :]).any(axis=2)
    return (shared & first).sum(axis=1)


def milky_way_fraction(sols: SolutionList, family: Optional[PartitionFamily],
                       sample_pairs: int, seed: int) -> PairFraction:
    """Share of intersecting ordered pairs ``x != y`` of type-family solutions
    that are both proper and share exactly one value.

    Up to ``EXACT_PAIRS_UP_TO`` solutions every pair is inspected.  Beyond
    that, pairs are drawn uniformly: pick a value ``v`` with probability
    proportional to ``deg(v)^2``, two solutions through ``v`` independently,
    and accept with probability ``1/|overlap|`` (rejecting ``x == y``).
    """
    mask = sols.typed_mask(family)
    chosen = np.nonzero(mask)[0]
    if len(chosen) == 0:
        raise ValueError("no solutions of the requested types")
    proper = sols.proper_mask()

    if len(chosen) <= EXACT_PAIRS_UP_TO:
        inc = np.zeros((len(chosen), sols.n + 1), dtype=np.int32)
        rows = np.repeat(np.arange(len(chosen)), sols.m)
        inc[rows, sols.values[chosen].astype(np.int64).ravel()] = 1
        overlap = inc @ inc.T
        np.fill_diagonal(overlap, 0)
        pp = proper[chosen]
        good = (overlap == 1) & pp[:, None] & pp[None, :]
        return PairFraction(int(good.sum()), int((overlap > 0).sum()), True)

    offsets, ids = sols._index
    owner = np.repeat(np.arange(sols.n + 1), np.diff(offsets))
    keep = mask[ids]
    ids, owner = ids[keep], owner[keep]
    deg = np.bincount(owner, minlength=sols.n + 1)
    starts = np.concatenate(([0], np.cumsum(deg)[:-1]))
    weight = deg.astype(float) ** 2
    cdf = np.cumsum(weight)
    if cdf[-1] == 0:
        return PairFraction(0, 0, False)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    hits = taken = 0
    batch = max(1024, sample_pairs)
    while taken < sample_pairs:
        v = np.minimum(np.searchsorted(cdf, rng.random(batch) * cdf[-1], side="right"), sols.n)
        x = ids[starts[v] + (rng.random(batch) * deg[v]).astype(np.int64)]
        y = ids[starts[v] + (rng.random(batch) * deg[v]).astype(np.int64)]
        k = _overlap_sizes(sols, x, y)
        accept = (x != y) & (rng.random(batch) * k < 1)
        x, y, k = x[accept], y[accept], k[accept]
        take = min(len(x), sample_pairs - taken)
        good = (k[:take] == 1) & proper[x[:take]] & proper[y[:take]]
        hits += int(good.sum())
        taken += take
    return PairFraction(hits, taken, False)


@dataclass(frozen=True)
class TripleScore:
    first: Partition
    second: Partition
    embedding: Embedding
    count: int
    score: Fraction
    equal_sizes: bool
    equal_overlap_rank: bool

    @property
    def shared(self) -> int:
        return len(self.embedding)

    def to_dict(self) -> dict:
        return {
            "first": self.first.tolist(),
            "second": self.second.tolist(),
            "embedding": [list(pq) for pq in self.embedding.pairs],
            "shared": self.shared,
            "count": self.count,
            "score": fraction_str(self.score),
            "score_float": float(self.score),
            "equal_sizes": self.equal_sizes,
            "equal_overlap_rank": self.equal_overlap_rank,
        }


def _partial_bijections(a: int, b: int):
    for k in range(1, min(a, b) + 1):
        for dom in combinations(range(1, a + 1), k):
            for img in permutations(range(1, b + 1), k):
                yield Embedding(zip(dom, img))


def _overlap_rank(C, P: Sequence[int]) -> int:
    """``rank(C) - rank(C without the columns P)``."""
    return el.rank(C) - el.rank(el.select_columns(C, el.complement(C.cols, P)))


def leading_triple_scores(spec: SystemSpec, family: Optional[PartitionFamily], n: int,
                          p) -> list[TripleScore]:
    """Score every overlap pattern ``(first, second, M)`` with nonempty ``M``.

    The score is ``p^(|first| + |second| - |M|)`` times the number of proper
    solutions of the compounded contraction in ``[n]``, i.e. the weight of
    solution pairs of those types overlapping exactly as ``M`` prescribes.
    Sorted by descending score, ties broken by (first, second, M).  At fixed
    ``n`` this is only a proxy for which patterns dominate asymptotically.
    """
    if spec.m > MAX_TRIPLE_M:
        raise TooLarge(f"{spec.m} columns, triple scoring capped at {MAX_TRIPLE_M}")
    p = Fraction(p)
    family = PartitionFamily.discrete(spec.m) if family is None else family
    b2 = tuple(spec.b) + tuple(spec.b)
    parts = list(family)
    contracted = {q: contract(spec.A, q) for q in parts}
    out = []
    for q1 in parts:
        for q2 in parts:
            C1, C2 = contracted[q1], contracted[q2]
            for M in _partial_bijections(C1.cols, C2.cols):
                res = compound(C1, C2, M)
                try:
                    cnt = census.count_proper(census.solve_box(res.matrix, b2, n))
                except Inconsistent:
                    cnt = 0
                size = C1.cols + C2.cols - len(M)
                out.append(TripleScore(
                    q1, q2, M, cnt, p**size * cnt,
                    equal_sizes=len(q1) == len(q2),
                    equal_overlap_rank=_overlap_rank(C1, M.domain) == _overlap_rank(C2, M.image),
                ))
    out.sort(key=lambda t: (-t.score, t.first.rgs(), t.second.rgs(), t.embedding.pairs))
    return out
