"""Dense order-d tensors over an exact field and the structural maps on them.

Indices are 0-based on every axis. Storage is a row-major numpy array of raw
field values (see :mod:`tensorrank.fields`), frozen after construction.
"""

from __future__ import annotations

import hashlib
import math
import os
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    BudgetExceeded,
    EmptySelection,
    FieldMismatch,
    IndexOutOfRange,
    OrderMismatch,
    ShapeMismatch,
)
from .fields import Field
from .matrix import Matrix

DEFAULT_BUDGET_CELLS = 1 << 22


def budget_cells() -> int:
    """Largest cell count a dense tensor may have (``TRL_BUDGET_CELLS`` overrides)."""
    env = os.environ.get("TRL_BUDGET_CELLS")
    return int(env) if env else DEFAULT_BUDGET_CELLS


def check_shape(shape: Sequence[int]) -> tuple[int, ...]:
    shape = tuple(int(n) for n in shape)
    if not shape:
        raise ShapeMismatch("tensors have order >= 1")
    if any(n < 1 for n in shape):
        raise ShapeMismatch(f"every dimension must be >= 1, got {shape}")
    cells = math.prod(shape)
    if cells > budget_cells():
        raise BudgetExceeded(f"shape {shape} has {cells} cells, budget is {budget_cells()}")
    return shape


class Tensor:
    """Immutable dense tensor."""

    __slots__ = ("field", "data")

    def __init__(self, field: Field, data):
        arr = np.array(field.array(data), dtype=field.dtype, copy=True)
        check_shape(arr.shape)
        arr.setflags(write=False)
        self.field = field
        self.data = arr

    @classmethod
    def _wrap(cls, field: Field, arr: np.ndarray) -> "Tensor":
        """Adopt an array that already holds valid raw values."""
        t = cls.__new__(cls)
        arr = np.array(arr, dtype=field.dtype, order="C", copy=True)
        check_shape(arr.shape)
        arr.setflags(write=False)
        t.field = field
        t.data = arr
        return t

    @classmethod
    def zeros(cls, field: Field, shape: Sequence[int]) -> "Tensor":
        return cls._wrap(field, field.zeros(check_shape(shape)))

    @classmethod
    def from_entries(cls, field: Field, shape: Sequence[int], entries: Iterable[tuple[tuple[int, ...], object]]) -> "Tensor":
        """Build from ``(index, value)`` pairs; unspecified cells are zero."""
        shape = check_shape(shape)
        arr = field.zeros(shape)
        for idx, v in entries:
            idx = tuple(idx)
            if len(idx) != len(shape) or any(not 0 <= i < n for i, n in zip(idx, shape)):
                raise IndexOutOfRange(f"index {idx} outside shape {shape}")
            arr[idx] = v
        return cls(field, arr)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def order(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    def __getitem__(self, idx):
        return self.data[tuple(idx)]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Tensor)
            and self.field == other.field
            and self.shape == other.shape
            and bool(np.all(self.data == other.data))
        )

    def __hash__(self):
        return hash((self.field, self.shape, self.digest()))

    def __repr__(self) -> str:
        return f"Tensor({self.field}, shape={self.shape}, nnz={self.nnz})"

    @property
    def nnz(self) -> int:
        return int(np.count_nonzero(self.data != 0))

    def nonzeros(self) -> list[tuple[tuple[int, ...], object]]:
        return [(tuple(int(i) for i in idx), self.data[tuple(idx)]) for idx in np.argwhere(self.data != 0)]

    def is_zero(self) -> bool:
        return not bool(np.any(self.data != 0))

    def __add__(self, other: "Tensor") -> "Tensor":
        _same_field(self, other)
        if self.shape != other.shape:
            raise ShapeMismatch(f"{self.shape} vs {other.shape}")
        return Tensor._wrap(self.field, self.field.add_arr(self.data, other.data))

    def __sub__(self, other: "Tensor") -> "Tensor":
        _same_field(self, other)
        if self.shape != other.shape:
            raise ShapeMismatch(f"{self.shape} vs {other.shape}")
        return Tensor._wrap(self.field, self.field.sub_arr(self.data, other.data))

    def scale(self, c) -> "Tensor":
        return Tensor._wrap(self.field, self.field.mul_arr(self.data, c))

    def flattening(self, rows: Sequence[int]) -> np.ndarray:
        """Matrix whose rows are indexed by the axes ``rows`` and columns by the rest."""
        rows = list(rows)
        cols = [a for a in range(self.order) if a not in rows]
        moved = np.transpose(self.data, rows + cols)
        r = math.prod(self.shape[a] for a in rows)
        return moved.reshape(r, -1)

    def digest(self) -> str:
        """SHA-256 over the canonical text serialization."""
        from .textio import format_tensor

        return hashlib.sha256(format_tensor(self).encode()).hexdigest()


def _same_field(a, b):
    if a.field != b.field:
        raise FieldMismatch(f"{a.field} vs {b.field}")


class SimpleTensor:
    """Outer product ``v_1 ⊗ ... ⊗ v_d``."""

    __slots__ = ("field", "vectors")

    def __init__(self, field: Field, vectors: Sequence):
        vecs = []
        for v in vectors:
            arr = np.array(field.array(v), dtype=field.dtype, copy=True).reshape(-1)
            if arr.size == 0:
                raise ShapeMismatch("simple tensor vectors must be nonempty")
            arr.setflags(write=False)
            vecs.append(arr)
        if not vecs:
            raise ShapeMismatch("simple tensors have order >= 1")
        self.field = field
        self.vectors = tuple(vecs)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(v.size for v in self.vectors)

    @property
    def order(self) -> int:
        return len(self.vectors)

    def __call__(self, *idx):
        f = self.field
        acc = f.one
        for v, i in zip(self.vectors, idx):
            acc = f.mul(acc, v[i])
        return acc

    def is_zero(self) -> bool:
        return any(not np.any(v != 0) for v in self.vectors)

    def to_tensor(self) -> Tensor:
        f = self.field
        acc = self.vectors[0]
        for v in self.vectors[1:]:
            acc = f.mul_arr(acc[..., None], v.reshape((1,) * acc.ndim + (-1,)))
        return Tensor._wrap(f, acc)

    def __eq__(self, other):
        return (
            isinstance(other, SimpleTensor)
            and self.field == other.field
            and self.shape == other.shape
            and all(np.array_equal(a, b) for a, b in zip(self.vectors, other.vectors))
        )

    def __repr__(self):
        return f"SimpleTensor({self.field}, shape={self.shape})"


# ---------------------------------------------------------------------------
# Structural operations
# ---------------------------------------------------------------------------


def _axis(T: Tensor, axis: int) -> int:
    if not 0 <= axis < T.order:
        raise IndexOutOfRange(f"axis {axis} outside order {T.order}")
    return axis


def layer(T: Tensor, axis: int, l: int) -> Tensor:
    """Slice of ``T`` with index ``l`` fixed on ``axis`` (order drops by one).

    For an order-1 tensor the result is the 1-element order-1 tensor ``[T[l]]``.
    """
    _axis(T, axis)
    if not 0 <= l < T.shape[axis]:
        raise IndexOutOfRange(f"layer {l} outside [0, {T.shape[axis]})")
    sliced = np.take(T.data, l, axis=axis)
    if sliced.ndim == 0:
        sliced = sliced.reshape(1)
    return Tensor._wrap(T.field, sliced)


def layers(T: Tensor, axis: int) -> list[Tensor]:
    return [layer(T, axis, l) for l in range(T.shape[_axis(T, axis)])]


def from_layers(Ls: Sequence[Tensor], axis: int | None = None) -> Tensor:
    """Stack equal-shape tensors along a new axis (default: the last one)."""
    if not Ls:
        raise ShapeMismatch("need at least one layer")
    field, shape = Ls[0].field, Ls[0].shape
    for L in Ls:
        _same_field(Ls[0], L)
        if L.shape != shape:
            raise ShapeMismatch(f"layer shapes {shape} vs {L.shape}")
    d = len(shape) + 1
    axis = d - 1 if axis is None else axis
    if not 0 <= axis < d:
        raise IndexOutOfRange(f"axis {axis} outside order {d}")
    return Tensor._wrap(field, np.stack([L.data for L in Ls], axis=axis))


def apply_axis_map(T: Tensor, axis: int, A: Matrix) -> Tensor:
    """Apply ``A`` to every fibre along ``axis``: new layer ``l`` is ``sum_i A[l,i] T_i``."""
    _axis(T, axis)
    _same_field(T, A)
    if A.cols != T.shape[axis]:
        raise ShapeMismatch(f"map has {A.cols} columns, axis {axis} has size {T.shape[axis]}")
    moved = np.moveaxis(T.data, axis, 0)
    flat = moved.reshape(T.shape[axis], -1)
    out = T.field.matmul(A.data, flat).reshape((A.rows,) + moved.shape[1:])
    return Tensor._wrap(T.field, np.moveaxis(out, 0, axis))


def _check_perm(sigma: Sequence[int], n: int) -> list[int]:
    sigma = [int(s) for s in sigma]
    if sorted(sigma) != list(range(n)):
        raise ShapeMismatch(f"{sigma} is not a permutation of 0..{n - 1}")
    return sigma


def permute_axes(T: Tensor, sigma: Sequence[int]) -> Tensor:
    """Axis ``k`` of the result is axis ``sigma[k]`` of ``T``."""
    sigma = _check_perm(sigma, T.order)
    return Tensor._wrap(T.field, np.transpose(T.data, sigma))


def permute_layers(T: Tensor, axis: int, sigma: Sequence[int]) -> Tensor:
    """Layer ``l`` of the result is layer ``sigma[l]`` of ``T``."""
    _axis(T, axis)
    sigma = _check_perm(sigma, T.shape[axis])
    return Tensor._wrap(T.field, np.take(T.data, sigma, axis=axis))


def restrict(T: Tensor, boxes: Sequence[Sequence[int] | None]) -> Tensor:
    """Sub-box on the given per-axis index lists (``None`` keeps the whole axis)."""
    if len(boxes) != T.order:
        raise ShapeMismatch(f"{len(boxes)} index sets for an order-{T.order} tensor")
    sel = []
    for a, box in enumerate(boxes):
        if box is None:
            sel.append(np.arange(T.shape[a]))
            continue
        idx = np.asarray(list(box), dtype=np.int64)
        if idx.size == 0:
            raise EmptySelection(f"empty index set on axis {a}")
        if idx.min() < 0 or idx.max() >= T.shape[a]:
            raise IndexOutOfRange(f"index set on axis {a} leaves [0, {T.shape[a]})")
        sel.append(idx)
    return Tensor._wrap(T.field, T.data[np.ix_(*sel)])


def tensor_product(T: Tensor, S: Tensor) -> Tensor:
    """Kronecker-style product; axis ``j`` pairs ``(i, i')`` to ``i * S.shape[j] + i'``."""
    if T.order != S.order:
        raise OrderMismatch(f"orders {T.order} and {S.order}")
    _same_field(T, S)
    d = T.order
    check_shape([a * b for a, b in zip(T.shape, S.shape)])
    # interleave the axes as (i_1, i'_1, i_2, i'_2, ...)
    a = T.data.reshape(sum(((n, 1) for n in T.shape), ()))
    b = S.data.reshape(sum(((1, m) for m in S.shape), ()))
    prod = T.field.mul_arr(a, b)
    return Tensor._wrap(T.field, prod.reshape([T.shape[j] * S.shape[j] for j in range(d)]))


def reshape_3_to_odd(T: Tensor, n: int, d: int) -> Tensor:
    """Reshape ``[n^d] x [n^d] x [n]`` into ``[n]^(2d+1)``.

    ``T'(i_1..i_d, i'_1..i'_d, k) = T(sum_j i_{j+1} n^j, sum_j i'_{j+1} n^j, k)``,
    so the first digit of each group is the least significant.
    """
    N = n**d
    if T.shape != (N, N, n):
        raise ShapeMismatch(f"expected shape {(N, N, n)}, got {T.shape}")
    # row-major reshape makes the first digit most significant; reverse each group
    arr = T.data.reshape((n,) * d + (n,) * d + (n,))
    perm = list(range(d - 1, -1, -1)) + list(range(2 * d - 1, d - 1, -1)) + [2 * d]
    return Tensor._wrap(T.field, np.transpose(arr, perm))


def is_permutation_tensor(T: Tensor) -> bool:
    """0/1 cubical tensor with exactly one 1 in every axis-parallel line."""
    if len(set(T.shape)) != 1:
        return False
    f = T.field
    zero = T.data == 0
    one = T.data == f.one
    if not np.all(zero | one):
        return False
    counts = one.astype(np.int64)
    return all(bool(np.all(counts.sum(axis=a) == 1)) for a in range(T.order))
