"""Dense matrices over an exact field and Gaussian elimination."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .errors import DivisionByZero, FieldMismatch, ShapeMismatch
from .fields import Field


def _nonzero(field: Field, arr: np.ndarray) -> np.ndarray:
    return arr != 0


def row_echelon(field: Field, data: np.ndarray, reduced: bool = False) -> tuple[np.ndarray, list[int]]:
    """Row echelon form of ``data`` and the list of pivot columns.

    With ``reduced=True`` the result is the reduced row echelon form.
    """
    a = np.array(data, dtype=field.dtype, copy=True)
    if a.ndim != 2:
        raise ShapeMismatch("row_echelon expects a 2-d array")
    m, n = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(n):
        if r == m:
            break
        col = a[r:, c]
        hits = np.flatnonzero(_nonzero(field, col))
        if hits.size == 0:
            continue
        k = r + int(hits[0])
        if k != r:
            a[[r, k]] = a[[k, r]]
        piv = a[r, c]
        if piv != field.one:
            a[r] = field.mul_arr(a[r], field.inv(piv))
        if reduced:
            targets = np.flatnonzero(_nonzero(field, a[:, c]))
            targets = targets[targets != r]
        else:
            targets = r + 1 + np.flatnonzero(_nonzero(field, a[r + 1 :, c]))
        if targets.size:
            factors = a[targets, c][:, None]
            a[targets] = field.sub_arr(a[targets], field.mul_arr(factors, a[r][None, :]))
        pivots.append(c)
        r += 1
    return a, pivots


def _integer_rows(a: np.ndarray) -> np.ndarray:
    """Scale each row of a rational array by its common denominator."""
    out = np.empty(a.shape, dtype=object)
    for i, row in enumerate(a):
        row = [Fraction(v) for v in row]
        den = 1
        for v in row:
            den = den * v.denominator // math.gcd(den, v.denominator)
        out[i] = [v.numerator * (den // v.denominator) for v in row]
    return out


def _bareiss_rank(a: np.ndarray) -> int:
    """Rank of an integer object array by fraction-free elimination."""
    a = a.copy()
    m, n = a.shape
    r, prev = 0, 1
    for c in range(n):
        if r == m:
            break
        hits = np.flatnonzero(a[r:, c] != 0)
        if hits.size == 0:
            continue
        k = r + int(hits[0])
        if k != r:
            a[[r, k]] = a[[k, r]]
        piv = a[r, c]
        below = a[r + 1 :]
        if below.shape[0]:
            # exact by Sylvester's identity
            a[r + 1 :] = (piv * below - below[:, c : c + 1] * a[r][None, :]) // prev
        prev = piv
        r += 1
    return r


def rank_of(field: Field, data) -> int:
    """Rank of a 2-d array of raw field values."""
    a = np.asarray(data, dtype=field.dtype)
    if a.size == 0:
        return 0
    nz = _nonzero(field, a)
    a = a[np.any(nz, axis=1)][:, np.any(nz, axis=0)]
    if a.size == 0:
        return 0
    if a.shape[0] > a.shape[1]:
        a = a.T
    if field.characteristic == 0:
        return _bareiss_rank(_integer_rows(a))
    return len(row_echelon(field, a)[1])


class Matrix:
    """Immutable ``rows x cols`` matrix of raw field values."""

    __slots__ = ("field", "data")

    def __init__(self, field: Field, data):
        arr = np.array(field.array(data), dtype=field.dtype, copy=True)
        if arr.ndim != 2:
            raise ShapeMismatch(f"matrix data must be 2-d, got shape {arr.shape}")
        arr.setflags(write=False)
        self.field = field
        self.data = arr

    @classmethod
    def identity(cls, field: Field, n: int) -> "Matrix":
        data = field.zeros((n, n))
        for i in range(n):
            data[i, i] = field.one
        return cls(field, data)

    @classmethod
    def zeros(cls, field: Field, m: int, n: int) -> "Matrix":
        return cls(field, field.zeros((m, n)))

    @classmethod
    def permutation(cls, field: Field, sigma) -> "Matrix":
        """Matrix ``P`` with ``(P v)[l] = v[sigma[l]]``."""
        n = len(sigma)
        data = field.zeros((n, n))
        for l, s in enumerate(sigma):
            data[l, s] = field.one
        return cls(field, data)

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    def __getitem__(self, idx):
        return self.data[idx]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Matrix)
            and self.field == other.field
            and self.shape == other.shape
            and bool(np.all(self.data == other.data))
        )

    def __hash__(self):
        return hash((self.field, self.shape, tuple(self.data.ravel().tolist())))

    def __repr__(self) -> str:
        rows = [[self.field.format(v) for v in row] for row in self.data]
        return f"Matrix({self.field}, {rows})"

    def _same(self, other: "Matrix"):
        if other.field != self.field:
            raise FieldMismatch(f"{self.field} vs {other.field}")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._same(other)
        if self.shape != other.shape:
            raise ShapeMismatch(f"{self.shape} vs {other.shape}")
        return Matrix(self.field, self.field.add_arr(self.data, other.data))

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._same(other)
        if self.shape != other.shape:
            raise ShapeMismatch(f"{self.shape} vs {other.shape}")
        return Matrix(self.field, self.field.sub_arr(self.data, other.data))

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._same(other)
        if self.cols != other.rows:
            raise ShapeMismatch(f"cannot multiply {self.shape} by {other.shape}")
        return Matrix(self.field, self.field.matmul(self.data, other.data))

    def scale(self, c) -> "Matrix":
        return Matrix(self.field, self.field.mul_arr(self.data, c))

    @property
    def T(self) -> "Matrix":
        return Matrix(self.field, self.data.T)

    def rank(self) -> int:
        return rank_of(self.field, self.data)

    def rref(self) -> tuple["Matrix", list[int]]:
        red, piv = row_echelon(self.field, self.data, reduced=True)
        return Matrix(self.field, red), piv

    def inverse(self) -> "Matrix":
        n = self.rows
        if self.cols != n:
            raise ShapeMismatch("only square matrices are invertible")
        aug = np.concatenate([self.data, Matrix.identity(self.field, n).data], axis=1)
        red, piv = row_echelon(self.field, aug, reduced=True)
        if piv[:n] != list(range(n)) or len(piv) < n:
            raise DivisionByZero("matrix is singular")
        return Matrix(self.field, red[:, n:])

    def solve(self, b) -> np.ndarray:
        """One solution ``x`` of ``self @ x = b`` (``b`` a vector)."""
        b = np.asarray(self.field.array(b), dtype=self.field.dtype).reshape(-1, 1)
        if b.shape[0] != self.rows:
            raise ShapeMismatch("right-hand side length does not match")
        aug = np.concatenate([self.data, b], axis=1)
        red, piv = row_echelon(self.field, aug, reduced=True)
        if piv and piv[-1] == self.cols:
            raise ValueError("system is inconsistent")
        x = self.field.zeros(self.cols)
        for r, c in enumerate(piv):
            x[c] = red[r, -1]
        return x

    def is_zero(self) -> bool:
        return not bool(np.any(self.data != 0))
