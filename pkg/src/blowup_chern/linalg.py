"""Exact sparse linear algebra over the rationals.

Matrices are stored as a sparse map ``(row, col) -> Fraction`` with no stored
zeros.  Elimination is fraction based with a Markowitz-style pivot choice
(sparsest column, then sparsest row), which keeps fill-in low on the very
sparse coboundary matrices built elsewhere in the package.  Pivoting only
affects speed; every result is exact.
"""

from __future__ import annotations

import heapq
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

Vector = list  # list[Fraction]


def as_rational(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    return Fraction(value)


class SparseRatMatrix:
    """Immutable sparse matrix with rational entries."""

    __slots__ = ("rows", "cols", "_entries")

    def __init__(self, rows: int, cols: int, entries: Mapping[tuple[int, int], object] | None = None):
        if rows < 0 or cols < 0:
            raise ValueError("matrix dimensions must be non-negative")
        self.rows = rows
        self.cols = cols
        store: dict[tuple[int, int], Fraction] = {}
        for (r, c), v in (entries or {}).items():
            if not (0 <= r < rows and 0 <= c < cols):
                raise IndexError(f"entry ({r}, {c}) outside a {rows}x{cols} matrix")
            v = as_rational(v)
            if v:
                store[(r, c)] = v
        self._entries = dict(sorted(store.items()))

    @classmethod
    def from_dense(cls, data: Sequence[Sequence[object]], cols: int | None = None) -> "SparseRatMatrix":
        rows = len(data)
        if cols is None:
            cols = len(data[0]) if rows else 0
        entries = {}
        for r, row in enumerate(data):
            if len(row) != cols:
                raise ValueError("ragged dense matrix")
            for c, v in enumerate(row):
                entries[(r, c)] = v
        return cls(rows, cols, entries)

    @classmethod
    def from_columns(cls, rows: int, columns: Sequence[Mapping[int, object]]) -> "SparseRatMatrix":
        entries = {}
        for c, col in enumerate(columns):
            for r, v in col.items():
                entries[(r, c)] = v
        return cls(rows, len(columns), entries)

    @classmethod
    def identity(cls, n: int) -> "SparseRatMatrix":
        return cls(n, n, {(i, i): 1 for i in range(n)})

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def nnz(self) -> int:
        return len(self._entries)

    def entries(self) -> dict[tuple[int, int], Fraction]:
        return dict(self._entries)

    def __getitem__(self, key: tuple[int, int]) -> Fraction:
        r, c = key
        if not (0 <= r < self.rows and 0 <= c < self.cols):
            raise IndexError(key)
        return self._entries.get(key, Fraction(0))

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseRatMatrix):
            return NotImplemented
        return self.shape == other.shape and self._entries == other._entries

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, tuple(self._entries.items())))

    def __repr__(self) -> str:
        return f"SparseRatMatrix({self.rows}x{self.cols}, nnz={self.nnz})"

    def to_dense(self) -> list[list[Fraction]]:
        out = [[Fraction(0)] * self.cols for _ in range(self.rows)]
        for (r, c), v in self._entries.items():
            out[r][c] = v
        return out

    def row_dicts(self) -> list[dict[int, Fraction]]:
        out: list[dict[int, Fraction]] = [{} for _ in range(self.rows)]
        for (r, c), v in self._entries.items():
            out[r][c] = v
        return out

    def transpose(self) -> "SparseRatMatrix":
        return SparseRatMatrix(self.cols, self.rows, {(c, r): v for (r, c), v in self._entries.items()})

    def hstack(self, other: "SparseRatMatrix") -> "SparseRatMatrix":
        if other.rows != self.rows:
            raise ValueError("row count mismatch")
        entries = dict(self._entries)
        entries.update({(r, c + self.cols): v for (r, c), v in other._entries.items()})
        return SparseRatMatrix(self.rows, self.cols + other.cols, entries)

    def permuted(self, row_perm: Sequence[int], col_perm: Sequence[int]) -> "SparseRatMatrix":
        """Entry (r, c) moves to (row_perm[r], col_perm[c])."""
        return SparseRatMatrix(
            self.rows, self.cols, {(row_perm[r], col_perm[c]): v for (r, c), v in self._entries.items()}
        )

    def scale_row(self, row: int, factor) -> "SparseRatMatrix":
        factor = as_rational(factor)
        return SparseRatMatrix(
            self.rows,
            self.cols,
            {(r, c): (v * factor if r == row else v) for (r, c), v in self._entries.items()},
        )

    def apply(self, vec: Sequence[object]) -> list[Fraction]:
        if len(vec) != self.cols:
            raise ValueError(f"vector of length {len(vec)} for a matrix with {self.cols} columns")
        out = [Fraction(0)] * self.rows
        for (r, c), v in self._entries.items():
            x = vec[c]
            if x:
                out[r] += v * x
        return out

    __matmul__ = apply


def _eliminate(rows: list[dict[int, Fraction]], pivot_cols: int) -> list[tuple[int, dict[int, Fraction]]]:
    """Forward elimination in place.

    Returns the pivot rows in elimination order as ``(pivot_col, row)`` with
    the pivot entry scaled to 1.  Only columns ``< pivot_cols`` are eligible
    as pivots.  A pivot row never contains an earlier pivot column.
    """
    col_rows: dict[int, set[int]] = {}
    for r, row in enumerate(rows):
        for c in row:
            col_rows.setdefault(c, set()).add(r)
    heap = [(len(rs), c) for c, rs in col_rows.items() if c < pivot_cols]
    heapq.heapify(heap)
    pivots: list[tuple[int, dict[int, Fraction]]] = []
    done: set[int] = set()
    while heap:
        count, c = heapq.heappop(heap)
        if c in done:
            continue
        current = col_rows.get(c)
        if not current:
            continue
        if len(current) != count:
            heapq.heappush(heap, (len(current), c))
            continue
        r = min(current, key=lambda idx: (len(rows[idx]), idx))
        prow = rows[r]
        inv = 1 / prow[c]
        prow = {k: v * inv for k, v in prow.items()}
        for k in prow:
            col_rows[k].discard(r)
        rows[r] = {}
        done.add(c)
        touched: set[int] = set()
        for r2 in list(col_rows[c]):
            row2 = rows[r2]
            f = row2[c]
            for k, v in prow.items():
                nv = row2.get(k, 0) - f * v
                if nv:
                    if k not in row2:
                        col_rows[k].add(r2)
                    row2[k] = nv
                elif k in row2:
                    del row2[k]
                    col_rows[k].discard(r2)
                touched.add(k)
        for k in touched:
            if k < pivot_cols and k not in done and col_rows[k]:
                heapq.heappush(heap, (len(col_rows[k]), k))
        pivots.append((c, prow))
    return pivots


def rank(m: SparseRatMatrix) -> int:
    """Exact rank over the rationals."""
    if m.nnz == 0:
        return 0
    return len(_eliminate(m.row_dicts(), m.cols))


def _back_substitute(pivots, free_values: dict[int, dict[int, Fraction]]) -> dict[int, dict[int, Fraction]]:
    """Solve pivot variables as linear forms in the free parameters."""
    values = dict(free_values)
    for c, prow in reversed(pivots):
        acc: dict[int, Fraction] = {}
        for k, v in prow.items():
            if k == c:
                continue
            for t, w in values.get(k, {}).items():
                nv = acc.get(t, 0) - v * w
                if nv:
                    acc[t] = nv
                else:
                    acc.pop(t, None)
        values[c] = acc
    return values


def kernel_basis(m: SparseRatMatrix) -> list[list[Fraction]]:
    """Basis of the right null space; one vector per non-pivot column."""
    pivots = _eliminate(m.row_dicts(), m.cols)
    pivot_set = {c for c, _ in pivots}
    free = [c for c in range(m.cols) if c not in pivot_set]
    values = _back_substitute(pivots, {f: {f: Fraction(1)} for f in free})
    basis = []
    for f in free:
        vec = [Fraction(0)] * m.cols
        for c, form in values.items():
            x = form.get(f)
            if x:
                vec[c] = x
        basis.append(vec)
    return basis


def solve(m: SparseRatMatrix, b: Sequence[object]) -> list[Fraction] | None:
    """One exact solution of ``m x = b``, or ``None`` when b is not in the column space."""
    if len(b) != m.rows:
        raise ValueError(f"right-hand side has length {len(b)}, matrix has {m.rows} rows")
    rhs = m.cols
    rows = m.row_dicts()
    for r, v in enumerate(b):
        v = as_rational(v)
        if v:
            rows[r][rhs] = v
    pivots = _eliminate(rows, rhs)
    if any(row for row in rows if row):
        return None
    values = _back_substitute(pivots, {rhs: {rhs: Fraction(-1)}})
    x = [Fraction(0)] * m.cols
    for c, form in values.items():
        if c < rhs:
            x[c] = form.get(rhs, Fraction(0))
    return x


def span_rank(vectors: Iterable[Mapping[int, object]], dim: int) -> int:
    """Rank of a family of sparse vectors of length ``dim``."""
    rows = [{k: as_rational(v) for k, v in vec.items() if v} for vec in vectors]
    return len(_eliminate(rows, dim))


class EchelonSpan:
    """Incrementally maintained span of sparse vectors keyed by sortable column labels.

    Each stored row is normalised so that its smallest key (its lead) has
    coefficient 1 and no other stored row has the same lead.
    """

    def __init__(self):
        self._rows: dict = {}

    def __len__(self) -> int:
        return len(self._rows)

    def reduce(self, vec: Mapping) -> dict:
        vec = {k: as_rational(v) for k, v in vec.items() if v}
        rows = self._rows
        while True:
            hits = [k for k in vec if k in rows]
            if not hits:
                return vec
            k = min(hits)
            f = vec[k]
            for kk, v in rows[k].items():
                nv = vec.get(kk, 0) - f * v
                if nv:
                    vec[kk] = nv
                else:
                    vec.pop(kk, None)

    def add(self, vec: Mapping) -> bool:
        """Insert ``vec``; returns whether it enlarged the span."""
        red = self.reduce(vec)
        if not red:
            return False
        lead = min(red)
        inv = 1 / red[lead]
        self._rows[lead] = {k: v * inv for k, v in red.items()}
        return True

    def contains(self, vec: Mapping) -> bool:
        return not self.reduce(vec)
