"""Exact sparse linear algebra over the rationals and over prime fields.

Vectors are plain dicts ``{index: value}`` with no stored zeros.  Over the
rationals the elimination is fraction-free: rows are kept as primitive
integer vectors and combined by cross-multiplication, so no rational
arithmetic happens until back-substitution.  Over ``GF(p)`` rows are kept
monic at the pivot.

Pivots are always the smallest column index of a reduced row, which makes
every echelon form, kernel basis and particular solution canonical for a
given column order.
"""

from __future__ import annotations

import heapq
import os
import random
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence

__all__ = [
    "QQ",
    "GF",
    "Field",
    "SparseMatrix",
    "Echelon",
    "rank",
    "kernel_basis",
    "solve",
    "solve_many",
    "multimodular_rank",
    "random_primes",
    "InconsistentPrimes",
]


# ---------------------------------------------------------------------------
# fields


class Field:
    """Coefficient field tag.  ``p == 0`` means the rationals."""

    __slots__ = ("p",)

    def __init__(self, p: int = 0):
        self.p = p

    @property
    def exact(self) -> bool:
        return self.p == 0

    def __repr__(self):
        return "QQ" if self.p == 0 else f"GF({self.p})"

    def __eq__(self, other):
        return isinstance(other, Field) and other.p == self.p

    def __hash__(self):
        return hash(("Field", self.p))

    def convert(self, x):
        """Map an int/Fraction into this field."""
        if self.p == 0:
            return Fraction(x)
        p = self.p
        if isinstance(x, Fraction):
            den = x.denominator % p
            if den == 0:
                raise ZeroDivisionError(f"denominator {x.denominator} vanishes mod {p}")
            return x.numerator * pow(den, -1, p) % p
        return int(x) % p

    def vector(self, v: dict) -> dict:
        out = {}
        for i, x in v.items():
            y = self.convert(x)
            if y:
                out[i] = y
        return out


QQ = Field(0)


def GF(p: int) -> Field:
    return Field(p)


# Primes just below 2**30 keep products inside two CPython digits.
_PRIME_POOL = (
    1073741789, 1073741783, 1073741741, 1073741723, 1073741719, 1073741717,
    1073741689, 1073741671, 1073741663, 1073741651, 1073741621, 1073741587,
    1073741567, 1073741561, 1073741527, 1073741503, 1073741477, 1073741467,
    1073741441, 1073741419, 1073741399, 1073741387, 1073741381, 1073741371,
)


def random_primes(count: int, seed: int | None = None) -> list[int]:
    """Pick ``count`` distinct word-size primes (deterministic for a seed)."""
    if count > len(_PRIME_POOL):
        raise ValueError(f"at most {len(_PRIME_POOL)} primes available")
    rng = random.Random(seed)
    return sorted(rng.sample(_PRIME_POOL, count), reverse=True)


# ---------------------------------------------------------------------------
# sparse matrix


class SparseMatrix:
    """Column-stored sparse matrix with exact rational entries.

    ``cols[j]`` maps row index to a nonzero :class:`Fraction` (or int).
    """

    __slots__ = ("nrows", "ncols", "cols")

    def __init__(self, nrows: int, ncols: int, entries: dict | None = None):
        self.nrows = nrows
        self.ncols = ncols
        self.cols: list[dict] = [{} for _ in range(ncols)]
        if entries:
            for (i, j), v in entries.items():
                if not (0 <= i < nrows and 0 <= j < ncols):
                    raise IndexError(f"entry ({i}, {j}) outside {nrows}x{ncols}")
                if v:
                    self.cols[j][i] = Fraction(v)

    @classmethod
    def from_columns(cls, nrows: int, columns: Sequence[dict]) -> "SparseMatrix":
        m = cls(nrows, 0)
        m.ncols = len(columns)
        m.cols = [{i: v for i, v in c.items() if v} for c in columns]
        return m

    @classmethod
    def from_rows(cls, ncols: int, rows: Sequence[dict]) -> "SparseMatrix":
        m = cls(len(rows), ncols)
        for i, r in enumerate(rows):
            for j, v in r.items():
                if v:
                    m.cols[j][i] = v
        return m

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence]) -> "SparseMatrix":
        nrows = len(rows)
        ncols = len(rows[0]) if nrows else 0
        m = cls(nrows, ncols)
        for i, r in enumerate(rows):
            if len(r) != ncols:
                raise ValueError("ragged dense matrix")
            for j, v in enumerate(r):
                if v:
                    m.cols[j][i] = Fraction(v)
        return m

    @classmethod
    def identity(cls, n: int) -> "SparseMatrix":
        return cls.from_columns(n, [{j: Fraction(1)} for j in range(n)])

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    @property
    def entries(self) -> dict:
        return {(i, j): v for j, c in enumerate(self.cols) for i, v in c.items()}

    def nnz(self) -> int:
        return sum(len(c) for c in self.cols)

    def rows(self) -> list[dict]:
        out = [{} for _ in range(self.nrows)]
        for j, c in enumerate(self.cols):
            for i, v in c.items():
                out[i][j] = v
        return out

    def to_dense(self) -> list[list]:
        out = [[Fraction(0)] * self.ncols for _ in range(self.nrows)]
        for j, c in enumerate(self.cols):
            for i, v in c.items():
                out[i][j] = Fraction(v)
        return out

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix.from_columns(self.ncols, self.rows())

    def apply(self, x: dict) -> dict:
        """Matrix times sparse column vector."""
        out: dict = {}
        for j, xj in x.items():
            for i, v in self.cols[j].items():
                s = out.get(i, 0) + v * xj
                if s:
                    out[i] = s
                else:
                    out.pop(i, None)
        return out

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        return SparseMatrix.from_columns(self.nrows, [self.apply(c) for c in other.cols])

    def __add__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        cols = []
        for a, b in zip(self.cols, other.cols):
            c = dict(a)
            for i, v in b.items():
                s = c.get(i, 0) + v
                if s:
                    c[i] = s
                else:
                    c.pop(i, None)
            cols.append(c)
        return SparseMatrix.from_columns(self.nrows, cols)

    def scale(self, s) -> "SparseMatrix":
        if not s:
            return SparseMatrix(self.nrows, self.ncols)
        return SparseMatrix.from_columns(self.nrows, [{i: v * s for i, v in c.items()} for c in self.cols])

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def is_zero(self) -> bool:
        return not any(self.cols)

    def hstack(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.nrows != other.nrows:
            raise ValueError("row count mismatch")
        return SparseMatrix.from_columns(self.nrows, list(self.cols) + list(other.cols))

    def select_columns(self, idx: Iterable[int]) -> "SparseMatrix":
        return SparseMatrix.from_columns(self.nrows, [self.cols[j] for j in idx])

    def __eq__(self, other):
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return self.shape == other.shape and all(
            {i: Fraction(v) for i, v in a.items()} == {i: Fraction(v) for i, v in b.items()}
            for a, b in zip(self.cols, other.cols)
        )

    def __repr__(self):
        return f"SparseMatrix({self.nrows}x{self.ncols}, nnz={self.nnz()})"


# ---------------------------------------------------------------------------
# echelon engine


def _primitive(v: dict) -> dict:
    """Integer vector divided by its content, sign fixed by the leading entry."""
    g = 0
    for x in v.values():
        g = gcd(g, x)
        if g == 1:
            break
    lead = v[min(v)]
    if lead < 0:
        g = -g
    if g == 1:
        return v
    return {i: x // g for i, x in v.items()}


def _to_integer(v: dict) -> dict:
    den = 1
    for x in v.values():
        if isinstance(x, Fraction) and x.denominator != 1:
            den = lcm(den, x.denominator)
    if den == 1:
        return {i: int(x) for i, x in v.items() if x}
    return {i: int(x * den) for i, x in v.items() if x}


class Echelon:
    """Incrementally built echelon basis of a subspace.

    Stored rows have pairwise distinct pivots, each pivot being the minimum
    index of its row.  Later rows are reduced against earlier ones, earlier
    rows are never touched, so the basis is deterministic for a given input
    order.
    """

    __slots__ = ("field", "rows", "_p")

    def __init__(self, field: Field = QQ):
        self.field = field
        self.rows: dict[int, dict] = {}
        self._p = field.p

    def __len__(self):
        return len(self.rows)

    @property
    def pivots(self) -> list[int]:
        return sorted(self.rows)

    def _prepare(self, v: dict) -> dict:
        if self._p:
            return self.field.vector(v)
        return _to_integer(v)

    def reduce(self, v: dict, prepared: bool = False) -> dict:
        """Residual of ``v`` after eliminating every pivot position."""
        if not prepared:
            v = self._prepare(v)
        else:
            v = dict(v)
        rows = self.rows
        if not v or not rows:
            return v
        p = self._p
        heap = [c for c in v if c in rows]
        heapq.heapify(heap)
        while heap:
            c = heapq.heappop(heap)
            a = v.get(c)
            if a is None:
                continue
            row = rows[c]
            if p:
                for j, x in row.items():
                    s = (v.get(j, 0) - a * x) % p
                    if s:
                        if j not in v and j in rows:
                            heapq.heappush(heap, j)
                        v[j] = s
                    else:
                        v.pop(j, None)
            else:
                b = row[c]
                g = gcd(a, b)
                ma, mb = b // g, a // g
                if ma != 1:
                    for j in v:
                        v[j] *= ma
                for j, x in row.items():
                    s = v.get(j, 0) - mb * x
                    if s:
                        if j not in v and j in rows:
                            heapq.heappush(heap, j)
                        v[j] = s
                    else:
                        v.pop(j, None)
            # popping c itself is guaranteed by the update above
        if not p and v:
            v = _primitive(v)
        return v

    def add(self, v: dict, prepared: bool = False) -> int | None:
        """Insert ``v``; return the new pivot, or ``None`` if ``v`` was dependent."""
        r = self.reduce(v, prepared)
        if not r:
            return None
        c = min(r)
        if self._p:
            inv = pow(r[c], -1, self._p)
            if inv != 1:
                p = self._p
                r = {j: x * inv % p for j, x in r.items()}
        self.rows[c] = r
        return c

    def contains(self, v: dict) -> bool:
        return not self.reduce(v)

    def residual(self, v: dict) -> dict:
        """Linear normal form of ``v``: subtract exact multiples of the rows
        so that every pivot coordinate vanishes (no rescaling of ``v``)."""
        p = self._p
        v = self.field.vector(v) if p else {i: Fraction(x) for i, x in v.items() if x}
        rows = self.rows
        heap = [c for c in v if c in rows]
        heapq.heapify(heap)
        while heap:
            c = heapq.heappop(heap)
            a = v.get(c)
            if a is None:
                continue
            row = rows[c]
            factor = a if p else a / row[c]
            for j, x in row.items():
                s = v.get(j, 0) - factor * x
                if p:
                    s %= p
                if s:
                    if j not in v and j in rows:
                        heapq.heappush(heap, j)
                    v[j] = s
                else:
                    v.pop(j, None)
        return v


# ---------------------------------------------------------------------------
# matrix-level operations


def _row_echelon(m: SparseMatrix, field: Field, extra: Sequence[dict] = ()) -> Echelon:
    """Row echelon form of ``[m | extra]`` where ``extra`` are additional columns."""
    rows = m.rows()
    base = m.ncols
    for t, col in enumerate(extra):
        for i, v in col.items():
            if v:
                rows[i][base + t] = v
    ech = Echelon(field)
    for r in rows:
        if r:
            ech.add(r)
    return ech


def rank(m: SparseMatrix, field: Field = QQ) -> int:
    """Rank of ``m`` over ``field`` (rationals by default)."""
    if m.nrows <= m.ncols:
        ech = Echelon(field)
        for r in m.rows():
            if r:
                ech.add(r)
        return len(ech)
    ech = Echelon(field)
    for c in m.cols:
        if c:
            ech.add(c)
    return len(ech)


def _back_substitute(ech: Echelon, free_values: dict, field: Field) -> dict:
    """Solve the echelon system for the pivot variables given the free ones.

    ``free_values`` maps column -> value for non-pivot columns (absent = 0).
    """
    p = field.p
    x = dict(free_values)
    for c in sorted(ech.rows, reverse=True):
        row = ech.rows[c]
        s = 0
        for j, a in row.items():
            if j != c:
                xj = x.get(j)
                if xj:
                    s += a * xj
        if p:
            val = (-s) % p  # rows are monic
        else:
            val = Fraction(-s, row[c]) if s else 0
        if val:
            x[c] = val
    return x


def kernel_basis(m: SparseMatrix, field: Field = QQ) -> list[dict]:
    """Canonical basis of the right null space of ``m``.

    One vector per non-pivot column ``f`` of the reduced row echelon form,
    with coordinate ``f`` equal to 1 and all other non-pivot coordinates 0.
    """
    ech = _row_echelon(m, field)
    pivots = set(ech.rows)
    one = Fraction(1) if field.exact else 1
    basis = []
    for f in range(m.ncols):
        if f in pivots:
            continue
        basis.append(_back_substitute(ech, {f: one}, field))
    return basis


def solve(m: SparseMatrix, b: Sequence | dict, field: Field = QQ) -> dict | None:
    """Canonical solution of ``m x = b`` (free coordinates zero) or ``None``."""
    if not isinstance(b, dict):
        if len(b) != m.nrows:
            raise ValueError(f"right-hand side has length {len(b)}, expected {m.nrows}")
        b = {i: v for i, v in enumerate(b) if v}
    sols = solve_many(m, [b], field)
    return sols[0]


def solve_many(m: SparseMatrix, rhs: Sequence[dict], field: Field = QQ) -> list[dict | None]:
    """Solve ``m x = b`` for several right-hand sides with one elimination.

    The negated right-hand sides are appended as extra columns; a system is
    consistent iff no row pivoting in the appended block touches its column.
    """
    n = m.ncols
    ech = _row_echelon(m, field, [{i: -v for i, v in b.items()} for b in rhs])
    sub = Echelon(field)
    sub.rows = {c: r for c, r in ech.rows.items() if c < n}
    tail = [r for c, r in ech.rows.items() if c >= n]
    one = Fraction(1) if field.exact else 1
    out: list[dict | None] = []
    for t in range(len(rhs)):
        col = n + t
        if any(col in r for r in tail):
            out.append(None)
            continue
        x = _back_substitute(sub, {col: one}, field)
        out.append({j: v for j, v in x.items() if j < n and v})
    return out


# ---------------------------------------------------------------------------
# multi-modular rank


class InconsistentPrimes(RuntimeError):
    """Raised when modular computations disagree and no majority exists."""


def multimodular_rank(m: SparseMatrix, nprimes: int = 3, seed: int | None = None) -> int:
    """Rank from several random primes; the maximum is the rational rank
    unless every prime divides the same minors."""
    if nprimes < 1:
        raise ValueError("need at least one prime")
    ranks = [rank(m, GF(p)) for p in random_primes(nprimes, seed)]
    return max(ranks)


def threads() -> int:
    """Parallelism cap from ``POLELOG_THREADS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("POLELOG_THREADS", "1")))
    except ValueError:
        return 1
