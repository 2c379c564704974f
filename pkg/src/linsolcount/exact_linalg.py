"""Exact integer and rational linear algebra.

Everything here runs on Python integers and :class:`fractions.Fraction`;
there is no floating point anywhere in this module.  Column indices at the
public surface are 1-based, matching the way systems are written down
(``A^Q`` with ``Q`` a subset of ``{1, ..., m}``).
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Iterable, Optional, Sequence

from .errors import DimensionMismatch, EmptyQ, IndexOutOfRange

RationalVector = tuple  # tuple[Fraction, ...], canonical by construction


class IntMatrix:
    """Immutable ``rows x cols`` matrix of Python integers.

    ``cols == 0`` is allowed so that ``A^Q`` with ``Q`` empty is
    representable; its rank is zero.
    """

    __slots__ = ("_data", "rows", "cols")

    def __init__(self, data: Iterable[Iterable[int]], cols: Optional[int] = None):
        rows = tuple(tuple(int(v) for v in row) for row in data)
        if not rows:
            raise DimensionMismatch("matrix needs at least one row")
        width = len(rows[0]) if cols is None else cols
        if any(len(row) != width for row in rows):
            raise DimensionMismatch("ragged matrix rows")
        self._data = rows
        self.rows = len(rows)
        self.cols = width

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], rows: int) -> "IntMatrix":
        return cls([[col[i] for col in columns] for i in range(rows)], cols=len(columns))

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def entries(self) -> tuple[int, ...]:
        return tuple(v for row in self._data for v in row)

    def tolist(self) -> list[list[int]]:
        return [list(row) for row in self._data]

    def row(self, i: int) -> tuple[int, ...]:
        """Row ``i`` (0-based, as in iteration order)."""
        return self._data[i]

    def column(self, j: int) -> tuple[int, ...]:
        """Column ``j`` (1-based)."""
        if not 1 <= j <= self.cols:
            raise IndexOutOfRange(f"column {j} outside 1..{self.cols}")
        return tuple(row[j - 1] for row in self._data)

    def columns(self) -> list[tuple[int, ...]]:
        return [tuple(row[j] for row in self._data) for j in range(self.cols)]

    @property
    def T(self) -> "IntMatrix":
        if self.cols == 0:
            raise DimensionMismatch("cannot transpose a matrix without columns")
        return IntMatrix(zip(*self._data))

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self._data[i][j]

    def __iter__(self):
        return iter(self._data)

    def __eq__(self, other):
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.shape == other.shape and self._data == other._data

    def __hash__(self):
        return hash((self.shape, self._data))

    def __repr__(self):
        return f"IntMatrix({self.tolist()!r})"

    def dot(self, x: Sequence) -> tuple:
        if len(x) != self.cols:
            raise DimensionMismatch(f"vector of length {len(x)} for {self.cols} columns")
        return tuple(sum(a * v for a, v in zip(row, x)) for row in self._data)


def as_matrix(A) -> IntMatrix:
    return A if isinstance(A, IntMatrix) else IntMatrix(A)


def rank(A) -> int:
    """Rank over the rationals, by fraction-free (Bareiss) elimination."""
    A = as_matrix(A)
    if A.cols == 0:
        return 0
    M = [list(row) for row in A]
    nrows, ncols = A.rows, A.cols
    r = 0
    prev = 1
    for c in range(ncols):
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        pr = M[r]
        for i in range(r + 1, nrows):
            row = M[i]
            f = row[c]
            for j in range(c + 1, ncols):
                # exact division is guaranteed by Sylvester's identity
                row[j] = (pr[c] * row[j] - f * pr[j]) // prev
            row[c] = 0
        prev = pr[c]
        r += 1
    return r


def rref(A) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q; pivot columns are 0-based.

    The pivot columns are the lexicographically first column basis.
    """
    M = [[Fraction(v) for v in row] for row in A]
    nrows = len(M)
    ncols = len(M[0]) if M else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = 1 / M[r][c]
        M[r] = [v * inv for v in M[r]]
        for i in range(nrows):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
    return M, pivots


def _check_colset(A: IntMatrix, Q: Iterable[int]) -> tuple[int, ...]:
    Q = tuple(sorted(set(Q)))
    for q in Q:
        if not 1 <= q <= A.cols:
            raise IndexOutOfRange(f"column {q} outside 1..{A.cols}")
    return Q


def complement(m: int, Q: Iterable[int]) -> tuple[int, ...]:
    Qs = set(Q)
    return tuple(j for j in range(1, m + 1) if j not in Qs)


def select_columns(A, Q: Iterable[int]) -> IntMatrix:
    """``A^Q``: keep the columns listed in ``Q`` (1-based), in the given order."""
    A = as_matrix(A)
    Q = list(Q)
    for q in Q:
        if not 1 <= q <= A.cols:
            raise IndexOutOfRange(f"column {q} outside 1..{A.cols}")
    return IntMatrix([[row[q - 1] for q in Q] for row in A], cols=len(Q))


def rank_deficit(A, Q: Iterable[int]) -> int:
    """``r_Q = rank(A) - rank(A^{[m] minus Q})``."""
    A = as_matrix(A)
    Q = _check_colset(A, Q)
    if not Q:
        raise EmptyQ("r_Q needs a nonempty column set")
    return rank(A) - rank(select_columns(A, complement(A.cols, Q)))


def null_space_basis(A) -> list[RationalVector]:
    """A basis of ``{x : Ax = 0}`` over Q, one vector per free column."""
    A = as_matrix(A)
    if A.cols == 0:
        return []
    R, pivots = rref(A)
    free = [j for j in range(A.cols) if j not in set(pivots)]
    basis = []
    for f in free:
        v = [Fraction(0)] * A.cols
        v[f] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -R[i][f]
        basis.append(tuple(v))
    return basis


def integer_scaled(v: Sequence[Fraction]) -> tuple[int, ...]:
    """Clear denominators: multiply by their least common multiple."""
    d = lcm(*(Fraction(x).denominator for x in v)) if v else 1
    return tuple(int(Fraction(x) * d) for x in v)


def solve_particular(A, b: Sequence[int]) -> Optional[RationalVector]:
    """Some rational ``x`` with ``Ax = b`` (free variables set to 0), or None."""
    A = as_matrix(A)
    if len(b) != A.rows:
        raise DimensionMismatch(f"b has length {len(b)}, expected {A.rows}")
    aug = [[Fraction(v) for v in row] + [Fraction(bi)] for row, bi in zip(A, b)]
    R, pivots = rref(aug)
    if A.cols in pivots:
        return None
    x = [Fraction(0)] * A.cols
    for i, pc in enumerate(pivots):
        x[pc] = R[i][A.cols]
    return tuple(x)


def _column_hermite(A: IntMatrix):
    """Unimodular column reduction ``H = A U`` with H lower echelon.

    Returns ``(H, U, pivots)`` where ``pivots`` lists ``(row, col)`` pairs
    (0-based) and the pivot entries are positive.
    """
    m = A.cols
    H = [list(row) for row in A]
    U = [[int(i == j) for j in range(m)] for i in range(m)]

    def colop(dst, src, q):  # col_dst -= q * col_src
        for row in H:
            row[dst] -= q * row[src]
        for row in U:
            row[dst] -= q * row[src]

    def swap(a, b):
        for row in H:
            row[a], row[b] = row[b], row[a]
        for row in U:
            row[a], row[b] = row[b], row[a]

    pivots = []
    k = 0
    for i in range(A.rows):
        if k == m:
            break
        row = H[i]
        while True:
            nz = [j for j in range(k, m) if row[j] != 0]
            if not nz:
                break
            j0 = min(nz, key=lambda j: abs(row[j]))
            if j0 != k:
                swap(j0, k)
            done = True
            for j in range(k + 1, m):
                if row[j] != 0:
                    colop(j, k, row[j] // row[k])
                    if row[j] != 0:
                        done = False
            if done:
                break
        if row[k] == 0:
            continue
        if row[k] < 0:
            for r_ in H:
                r_[k] = -r_[k]
            for r_ in U:
                r_[k] = -r_[k]
        pivots.append((i, k))
        k += 1
    return H, U, pivots


def integer_solution(A, b: Sequence[int]) -> Optional[tuple[int, ...]]:
    """An integer solution of ``Ax = b`` or None, via column Hermite reduction."""
    A = as_matrix(A)
    if len(b) != A.rows:
        raise DimensionMismatch(f"b has length {len(b)}, expected {A.rows}")
    if A.cols == 0:
        return () if all(v == 0 for v in b) else None
    H, U, pivots = _column_hermite(A)
    pivot_col = dict(pivots)
    y = [0] * A.cols
    for i in range(A.rows):
        c = pivot_col.get(i)
        if c is None:
            if sum(h * v for h, v in zip(H[i], y)) != b[i]:
                return None
            continue
        rem = b[i] - sum(H[i][j] * y[j] for j in range(c))
        q, r = divmod(rem, H[i][c])
        if r:
            return None
        y[c] = q
    return tuple(sum(u * v for u, v in zip(row, y)) for row in U)


def solvable_over_integers(A, b: Sequence[int]) -> bool:
    return integer_solution(A, b) is not None


def column_basis(A) -> tuple[int, ...]:
    """Lexicographically first set of 1-based columns forming a basis."""
    A = as_matrix(A)
    if A.cols == 0:
        return ()
    _, pivots = rref(A)
    return tuple(p + 1 for p in pivots)


def row_basis(A) -> tuple[int, ...]:
    """Lexicographically first set of 0-based independent rows."""
    A = as_matrix(A)
    if A.cols == 0:
        return ()
    _, pivots = rref(A.T)
    return tuple(pivots)


def inverse(B) -> list[list[Fraction]]:
    """Inverse of a square nonsingular integer matrix over Q."""
    B = as_matrix(B)
    n = B.rows
    if B.cols != n:
        raise DimensionMismatch("inverse of a non-square matrix")
    aug = [[Fraction(v) for v in row] + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(B)]
    R, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ArithmeticError("singular matrix")
    return [row[n:] for row in R]


def stack(*blocks: IntMatrix) -> IntMatrix:
    """Vertical concatenation of matrices with equal column counts."""
    cols = {blk.cols for blk in blocks}
    if len(cols) != 1:
        raise DimensionMismatch("stacked blocks differ in width")
    return IntMatrix([row for blk in blocks for row in blk], cols=cols.pop())


def with_row(A, row: Sequence[int]) -> IntMatrix:
    A = as_matrix(A)
    return stack(A, IntMatrix([row], cols=A.cols))


def nonnegative_solution(A, b: Sequence[int]) -> Optional[RationalVector]:
    """Exact feasibility of ``{y : Ay = b, y >= 0}``.

    Phase one of the simplex method on a Fraction tableau with Bland's
    rule, so it terminates and the answer is exact.  Returns a feasible
    vertex or None.
    """
    A = as_matrix(A)
    if len(b) != A.rows:
        raise DimensionMismatch(f"b has length {len(b)}, expected {A.rows}")
    r, n = A.rows, A.cols
    T = []
    for i, row in enumerate(A):
        sign = -1 if b[i] < 0 else 1
        T.append([Fraction(sign * v) for v in row]
                 + [Fraction(int(k == i)) for k in range(r)]
                 + [Fraction(sign * b[i])])
    basis = [n + i for i in range(r)]
    width = n + r
    obj = [-sum(T[i][j] for i in range(r)) if j < n else Fraction(0) for j in range(width)]
    obj.append(-sum(T[i][width] for i in range(r)))

    while True:
        enter = next((j for j in range(width) if obj[j] < 0), None)
        if enter is None:
            break
        leave = None
        best = None
        for i in range(r):
            if T[i][enter] > 0:
                ratio = T[i][width] / T[i][enter]
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave is None:  # cannot happen in phase one: objective is bounded below
            break
        piv = T[leave][enter]
        T[leave] = [v / piv for v in T[leave]]
        prow = T[leave]
        for i in range(r):
            if i != leave and T[i][enter] != 0:
                f = T[i][enter]
                T[i] = [a - f * c for a, c in zip(T[i], prow)]
        f = obj[enter]
        obj = [a - f * c for a, c in zip(obj, prow)]
        basis[leave] = enter

    if obj[width] != 0:
        return None
    y = [Fraction(0)] * n
    for i, var in enumerate(basis):
        if var < n:
            y[var] = T[i][width]
    return tuple(y)
