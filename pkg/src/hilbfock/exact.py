"""Exact rational sparse linear algebra: vectors, matrices, solving, span tracking.

Scalars are ``fractions.Fraction`` (arbitrary-precision, always reduced,
positive denominator), serialized as "p/q" with the denominator omitted
when it is 1 and the sign carried by the numerator.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator

from .errors import DimensionMismatch

Rational = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)
HALF = Fraction(1, 2)


def rat(x) -> Fraction:
    """Coerce an int, string ("p/q") or Fraction to an exact rational."""
    return x if isinstance(x, Fraction) else Fraction(x)


def rat_str(x) -> str:
    """Canonical "p/q" form; denominator omitted when 1."""
    q = rat(x)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


class SparseVec:
    """Sparse rational vector over nonnegative integer indices; no stored zeros."""

    __slots__ = ("entries",)

    def __init__(self, entries: dict | Iterable[tuple[int, Fraction]] | None = None):
        self.entries: dict[int, Fraction] = {}
        if entries:
            items = entries.items() if isinstance(entries, dict) else entries
            for i, c in items:
                self.add_entry(i, c)

    @classmethod
    def unit(cls, i: int) -> "SparseVec":
        return cls([(i, ONE)])

    def add_entry(self, i: int, c) -> None:
        if i < 0:
            raise DimensionMismatch("SparseVec index", ">= 0", i)
        c = rat(c)
        if not c:
            return
        cur = self.entries.get(i)
        if cur is None:
            self.entries[i] = c
        else:
            s = cur + c
            if s:
                self.entries[i] = s
            else:
                del self.entries[i]

    def get(self, i: int) -> Fraction:
        return self.entries.get(i, ZERO)

    def items(self) -> Iterator[tuple[int, Fraction]]:
        return iter(self.entries.items())

    def items_sorted(self) -> list[tuple[int, Fraction]]:
        return sorted(self.entries.items())

    def support(self) -> list[int]:
        return sorted(self.entries)

    def is_zero(self) -> bool:
        return not self.entries

    def copy(self) -> "SparseVec":
        v = SparseVec()
        v.entries = dict(self.entries)
        return v

    def scale(self, c) -> "SparseVec":
        c = rat(c)
        v = SparseVec()
        if c:
            v.entries = {i: x * c for i, x in self.entries.items()}
        return v

    def add_scaled(self, other: "SparseVec", c=ONE) -> "SparseVec":
        v = self.copy()
        v.iadd_scaled(other, c)
        return v

    def iadd_scaled(self, other: "SparseVec", c=ONE) -> None:
        c = rat(c)
        if not c:
            return
        for i, x in other.entries.items():
            self.add_entry(i, x * c)

    def dot(self, other: "SparseVec") -> Fraction:
        a, b = self.entries, other.entries
        if len(b) < len(a):
            a, b = b, a
        return sum((c * b[i] for i, c in a.items() if i in b), ZERO)

    def __add__(self, other: "SparseVec") -> "SparseVec":
        return self.add_scaled(other)

    def __sub__(self, other: "SparseVec") -> "SparseVec":
        return self.add_scaled(other, -ONE)

    def __neg__(self) -> "SparseVec":
        return self.scale(-ONE)

    def __eq__(self, other) -> bool:
        return isinstance(other, SparseVec) and self.entries == other.entries

    def __bool__(self) -> bool:
        return bool(self.entries)

    def __repr__(self) -> str:
        inner = ", ".join(f"{i}: {rat_str(c)}" for i, c in self.items_sorted())
        return "SparseVec({%s})" % inner


class Matrix:
    """Column-major exact matrix; columns are SparseVec over row indices."""

    __slots__ = ("nrows", "cols")

    def __init__(self, nrows: int, cols: list[SparseVec]):
        self.nrows = nrows
        self.cols = cols

    @property
    def ncols(self) -> int:
        return len(self.cols)

    @classmethod
    def zero(cls, nrows: int, ncols: int) -> "Matrix":
        return cls(nrows, [SparseVec() for _ in range(ncols)])

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls(n, [SparseVec.unit(i) for i in range(n)])

    def column(self, j: int) -> SparseVec:
        return self.cols[j]

    def entry(self, i: int, j: int) -> Fraction:
        return self.cols[j].get(i)

    def apply(self, v: SparseVec) -> SparseVec:
        out = SparseVec()
        for j, c in v.entries.items():
            if j >= self.ncols:
                raise DimensionMismatch("Matrix.apply", f"< {self.ncols} columns", j)
            out.iadd_scaled(self.cols[j], c)
        return out

    def compose(self, other: "Matrix") -> "Matrix":
        """self @ other (apply ``other`` first)."""
        return Matrix(self.nrows, [self.apply(c) for c in other.cols])

    def add_scaled(self, other: "Matrix", c=ONE) -> "Matrix":
        if other.nrows != self.nrows or other.ncols != self.ncols:
            raise DimensionMismatch(
                "Matrix.add", (self.nrows, self.ncols), (other.nrows, other.ncols)
            )
        return Matrix(self.nrows, [a.add_scaled(b, c) for a, b in zip(self.cols, other.cols)])

    def __add__(self, other: "Matrix") -> "Matrix":
        return self.add_scaled(other)

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self.add_scaled(other, -ONE)

    def scale(self, c) -> "Matrix":
        return Matrix(self.nrows, [col.scale(c) for col in self.cols])

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.cols)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Matrix)
            and self.nrows == other.nrows
            and self.cols == other.cols
        )

    def rows(self) -> list[SparseVec]:
        out = [SparseVec() for _ in range(self.nrows)]
        for j, col in enumerate(self.cols):
            for i, c in col.entries.items():
                out[i].add_entry(j, c)
        return out

    def transpose(self) -> "Matrix":
        return Matrix(self.ncols, self.rows())


class LinearSolver:
    """Row reduction of an exact matrix with transform tracking.

    Pivots are chosen deterministically: columns are scanned in increasing
    index order and the first remaining row with a nonzero entry is used.
    Solutions set all free variables to zero.
    """

    def __init__(self, A: Matrix):
        self.nrows = A.nrows
        self.ncols = A.ncols
        work = [(row, SparseVec.unit(i)) for i, row in enumerate(A.rows())]
        reduced: list[tuple[int, SparseVec, SparseVec]] = []  # (pivot_col, row, transform)
        for col in range(self.ncols):
            hit = None
            for idx, (row, _) in enumerate(work):
                if row.get(col):
                    hit = idx
                    break
            if hit is None:
                continue
            row, t = work.pop(hit)
            inv = ONE / row.get(col)
            row, t = row.scale(inv), t.scale(inv)
            for r2, t2 in work:
                c = r2.get(col)
                if c:
                    r2.iadd_scaled(row, -c)
                    t2.iadd_scaled(t, -c)
            for _, r2, t2 in reduced:
                c = r2.get(col)
                if c:
                    r2.iadd_scaled(row, -c)
                    t2.iadd_scaled(t, -c)
            reduced.append((col, row, t))
        self.pivots = reduced
        self.pivot_cols = [p for p, _, _ in reduced]
        # every surviving work row is zero; solvability requires its transform kill b
        self.null_transforms = [t for _row, t in work]
        self.rank = len(reduced)

    def solve(self, b: SparseVec) -> SparseVec | None:
        """Some x with A x = b, free variables zero; None when inconsistent."""
        for i in b.support():
            if i >= self.nrows:
                raise DimensionMismatch("solve rhs", f"< {self.nrows} rows", i)
        for t in self.null_transforms:
            if t.dot(b):
                return None
        x = SparseVec()
        for col, _row, t in self.pivots:
            x.add_entry(col, t.dot(b))
        return x

    def kernel(self) -> list[SparseVec]:
        """Basis of ker A, one vector per free column, deterministic order."""
        pivot_set = set(self.pivot_cols)
        out = []
        for free in range(self.ncols):
            if free in pivot_set:
                continue
            v = SparseVec.unit(free)
            for col, row, _ in self.pivots:
                c = row.get(free)
                if c:
                    v.add_entry(col, -c)
            out.append(v)
        return out


def solve(A: Matrix, b: SparseVec) -> SparseVec | None:
    """Exact solution of A x = b, or None when b is outside the column span."""
    return LinearSolver(A).solve(b)


class SpanBuilder:
    """Incremental rational span with reduced pivot rows and insertion witnesses.

    Every ``insert`` call consumes one insertion index; witnesses express
    pivot rows as combinations of the vectors inserted so far, so a
    non-growing insert returns the exact coordinates of its vector in the
    earlier insertions.
    """

    def __init__(self):
        self._rows: list[tuple[int, SparseVec, SparseVec]] = []  # (pivot, row, witness)
        self.n_inserted = 0

    @property
    def rank(self) -> int:
        return len(self._rows)

    def _reduce(self, v: SparseVec) -> tuple[SparseVec, SparseVec]:
        residual = v.copy()
        combo = SparseVec()
        for pivot, row, wit in self._rows:
            c = residual.get(pivot)
            if c:
                residual.iadd_scaled(row, -c)
                combo.iadd_scaled(wit, c)
        return residual, combo

    def express(self, v: SparseVec) -> SparseVec | None:
        """Coordinates of v over the inserted vectors, or None if outside the span."""
        residual, combo = self._reduce(v)
        return None if residual else combo

    def insert(self, v: SparseVec) -> tuple[bool, SparseVec | None]:
        """Add v; returns (grew, coords-in-earlier-insertions-when-not-grew)."""
        idx = self.n_inserted
        self.n_inserted += 1
        residual, combo = self._reduce(v)
        if residual.is_zero():
            return False, combo
        pivot = residual.support()[0]
        lead = residual.get(pivot)
        row = residual.scale(ONE / lead)
        wit = SparseVec.unit(idx)
        wit.iadd_scaled(combo, -ONE)
        wit = wit.scale(ONE / lead)
        for _, r2, w2 in self._rows:
            c = r2.get(pivot)
            if c:
                r2.iadd_scaled(row, -c)
                w2.iadd_scaled(wit, -c)
        self._rows.append((pivot, row, wit))
        self._rows.sort(key=lambda t: t[0])
        return True, None

    def contains(self, v: SparseVec) -> bool:
        return self.express(v) is not None
