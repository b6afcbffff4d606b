"""Exact integer matrices and the Smith normal form.

Everything here works on Python ints, so intermediate growth during
reduction never overflows. Matrices are immutable values.
"""
from __future__ import annotations

import operator
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import ShapeError


def _init(m, data: tuple, cols: int):
    object.__setattr__(m, "rows", len(data))
    object.__setattr__(m, "cols", cols)
    object.__setattr__(m, "_data", data)
    object.__setattr__(m, "_hash", None)


class IntMatrix:
    """Immutable dense integer matrix.

    Rows are stored as a tuple of tuples. ``IntMatrix([[1, 2], [3, 4]])``
    builds a 2x2 matrix; an empty shape needs ``IntMatrix.zeros(r, c)``.
    """

    __slots__ = ("rows", "cols", "_data", "_hash")

    def __init__(self, entries: Iterable[Iterable[int]], cols: int | None = None):
        data = tuple(tuple(operator.index(x) for x in row) for row in entries)
        if cols is None:
            if not data:
                raise ShapeError("cannot infer column count of an empty matrix")
            cols = len(data[0])
        for i, row in enumerate(data):
            if len(row) != cols:
                raise ShapeError(f"row {i} has length {len(row)}, expected {cols}")
        _init(self, data, cols)

    def __setattr__(self, name, value):
        raise AttributeError("IntMatrix is immutable")

    # construction helpers

    @classmethod
    def _raw(cls, data: tuple, cols: int) -> "IntMatrix":
        m = cls.__new__(cls)
        _init(m, data, cols)
        return m

    @classmethod
    def from_flat(cls, rows: int, cols: int, entries: Sequence[int]) -> "IntMatrix":
        if len(entries) != rows * cols:
            raise ShapeError(f"{len(entries)} entries for a {rows}x{cols} matrix")
        return cls((entries[i * cols:(i + 1) * cols] for i in range(rows)), cols=cols)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls._raw(tuple((0,) * cols for _ in range(rows)), cols)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls._raw(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)), n)

    @classmethod
    def diag(cls, values: Sequence[int], rows: int | None = None,
             cols: int | None = None) -> "IntMatrix":
        rows = len(values) if rows is None else rows
        cols = rows if cols is None else cols
        out = [[0] * cols for _ in range(rows)]
        for i, v in enumerate(values):
            out[i][i] = v
        return cls(out, cols=cols)

    @classmethod
    def hstack(cls, mats: Sequence["IntMatrix"], rows: int | None = None) -> "IntMatrix":
        if not mats:
            if rows is None:
                raise ShapeError("hstack of nothing needs an explicit row count")
            return cls.zeros(rows, 0)
        r = mats[0].rows
        if any(m.rows != r for m in mats):
            raise ShapeError("hstack needs equal row counts")
        data = tuple(sum((m._data[i] for m in mats), ()) for i in range(r))
        return cls._raw(data, sum(m.cols for m in mats))

    @classmethod
    def block_diag(cls, *mats: "IntMatrix") -> "IntMatrix":
        cols = sum(m.cols for m in mats)
        out = []
        offset = 0
        for m in mats:
            for row in m._data:
                out.append((0,) * offset + row + (0,) * (cols - offset - m.cols))
            offset += m.cols
        return cls._raw(tuple(out), cols)

    # accessors

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def entries(self) -> tuple[int, ...]:
        """Row-major flat entries."""
        return sum(self._data, ())

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self._data]

    def row(self, i: int) -> tuple[int, ...]:
        return self._data[i]

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self._data)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self._data[i][j]

    def __iter__(self):
        return iter(self._data)

    @property
    def T(self) -> "IntMatrix":
        if not (self.rows and self.cols):
            return IntMatrix.zeros(self.cols, self.rows)
        return IntMatrix._raw(tuple(zip(*self._data)), self.rows)

    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_identity(self) -> bool:
        return self.is_square() and all(
            x == (i == j) for i, r in enumerate(self._data) for j, x in enumerate(r))

    def is_zero(self) -> bool:
        return not any(any(r) for r in self._data)

    # arithmetic

    def __eq__(self, other):
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.cols == other.cols and self._data == other._data

    def __hash__(self):
        if self._hash is None:
            object.__setattr__(self, "_hash", hash((self.cols, self._data)))
        return self._hash

    def __repr__(self):
        return f"IntMatrix({self.tolist()!r})"

    def _check_same_shape(self, other: "IntMatrix"):
        if self.shape != other.shape:
            raise ShapeError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        self._check_same_shape(other)
        return IntMatrix._raw(tuple(tuple(a + b for a, b in zip(r, s))
                                    for r, s in zip(self._data, other._data)), self.cols)

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        self._check_same_shape(other)
        return IntMatrix._raw(tuple(tuple(a - b for a, b in zip(r, s))
                                    for r, s in zip(self._data, other._data)), self.cols)

    def __neg__(self) -> "IntMatrix":
        return IntMatrix._raw(tuple(tuple(-a for a in r) for r in self._data), self.cols)

    def __mul__(self, k: int) -> "IntMatrix":
        k = operator.index(k)
        return IntMatrix._raw(tuple(tuple(k * a for a in r) for r in self._data), self.cols)

    __rmul__ = __mul__

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ShapeError(f"cannot multiply {self.shape} by {other.shape}")
        n = other.cols
        brows = other._data
        out = []
        # monodromy matrices are mostly identity blocks; skip zeros
        for r in self._data:
            acc = [0] * n
            for k, a in enumerate(r):
                if a:
                    bk = brows[k]
                    if a == 1:
                        for j, b in enumerate(bk):
                            if b:
                                acc[j] += b
                    else:
                        for j, b in enumerate(bk):
                            if b:
                                acc[j] += a * b
            out.append(tuple(acc))
        return IntMatrix._raw(tuple(out), n)

    def __pow__(self, k: int) -> "IntMatrix":
        if not self.is_square():
            raise ShapeError("power of a non-square matrix")
        if k < 0:
            raise ValueError("negative powers need an explicit inverse")
        result = IntMatrix.identity(self.rows)
        base = self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def det(self) -> int:
        """Determinant by fraction-free (Bareiss) elimination."""
        if not self.is_square():
            raise ShapeError("determinant of a non-square matrix")
        n = self.rows
        if n == 0:
            return 1
        a = [list(r) for r in self._data]
        sign = 1
        prev = 1
        for k in range(n - 1):
            if a[k][k] == 0:
                for i in range(k + 1, n):
                    if a[i][k]:
                        a[k], a[i] = a[i], a[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return sign * a[n - 1][n - 1]


@dataclass(frozen=True)
class SmithDecomposition:
    """``U @ M @ V == D`` with U, V unimodular and D in Smith form."""

    U: IntMatrix
    D: IntMatrix
    V: IntMatrix

    @property
    def diagonal(self) -> tuple[int, ...]:
        return tuple(self.D[i, i] for i in range(min(self.D.rows, self.D.cols)))


def _smith_in_place(a: list[list[int]], m: int, n: int,
                    u: list[list[int]] | None, v: list[list[int]] | None) -> list[int]:
    """Reduce ``a`` to Smith form, mirroring row ops on ``u`` and column ops on ``v``.

    Pivots are chosen by minimal absolute value to slow entry growth.
    Returns the diagonal.
    """

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        if u is not None:
            u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        if v is not None:
            for row in v:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):
        # row[dst] += q * row[src]
        rs, rd = a[src], a[dst]
        for j in range(n):
            if rs[j]:
                rd[j] += q * rs[j]
        if u is not None:
            us, ud = u[src], u[dst]
            for j in range(m):
                if us[j]:
                    ud[j] += q * us[j]

    def add_col(dst, src, q):
        for row in a:
            if row[src]:
                row[dst] += q * row[src]
        if v is not None:
            for row in v:
                if row[src]:
                    row[dst] += q * row[src]

    diag = []
    for t in range(min(m, n)):
        best = None
        for i in range(t, m):
            row = a[i]
            for j in range(t, n):
                x = row[j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        if i != t:
            swap_rows(t, i)
        if j != t:
            swap_cols(t, j)

        while True:
            p = a[t][t]
            clean = True
            for i in range(t + 1, m):
                x = a[i][t]
                if x:
                    add_row(i, t, -(x // p))
                    if a[i][t]:
                        clean = False
            for j in range(t + 1, n):
                x = a[t][j]
                if x:
                    add_col(j, t, -(x // p))
                    if a[t][j]:
                        clean = False
            if clean:
                bad = None
                for i in range(t + 1, m):
                    row = a[i]
                    for j in range(t + 1, n):
                        if row[j] % p:
                            bad = i
                            break
                    if bad is not None:
                        break
                if bad is None:
                    break
                add_row(t, bad, 1)
            # bring the smallest nonzero entry of row/column t to the pivot
            best = (abs(a[t][t]), t, t)
            for i in range(t + 1, m):
                x = a[i][t]
                if x and abs(x) < best[0]:
                    best = (abs(x), i, t)
            for j in range(t + 1, n):
                x = a[t][j]
                if x and abs(x) < best[0]:
                    best = (abs(x), t, j)
            _, i, j = best
            if i != t:
                swap_rows(t, i)
            if j != t:
                swap_cols(t, j)

        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            if u is not None:
                u[t] = [-x for x in u[t]]
        diag.append(a[t][t])
    return diag


def snf(M: IntMatrix) -> SmithDecomposition:
    """Smith normal form with unimodular transforms."""
    if M.rows == 0 or M.cols == 0:
        raise ShapeError("snf needs a nonempty matrix")
    m, n = M.shape
    a = M.tolist()
    u = IntMatrix.identity(m).tolist()
    v = IntMatrix.identity(n).tolist()
    _smith_in_place(a, m, n, u, v)
    return SmithDecomposition(IntMatrix(u, cols=m), IntMatrix(a, cols=n), IntMatrix(v, cols=n))


def smith_invariants(M: IntMatrix) -> list[int]:
    """Nonzero Smith diagonal entries, without building transforms."""
    cols = [j for j in range(M.cols) if any(M.column(j))]
    if not cols or M.rows == 0:
        return []
    a = [[row[j] for j in cols] for row in M]
    return _smith_in_place(a, M.rows, len(cols), None, None)


def rank(M: IntMatrix) -> int:
    return len(smith_invariants(M))


def cokernel_structure(M: IntMatrix) -> tuple[int, list[int]]:
    """Free rank and torsion coefficients of ``Z^rows / colspan(M)``."""
    d = smith_invariants(M)
    return M.rows - len(d), [x for x in d if x > 1]
