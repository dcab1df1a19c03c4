"""Explicit tensor families.

Every builder returns a dense :class:`~tensorrank.tensor.Tensor`; the
combinatorial family also has single-entry evaluators that follow the
recursion in O(lg n) steps without materializing anything.

Index conventions (all 0-based):

* ``S_{n,i}`` is an ``n x n`` matrix indexed ``(row, col)``; layer ``i`` of
  ``T_n`` is ``S_{n,i}``, stacked along the last axis.
* For the odd recursion ``n = 2h+1`` the identity branch puts ones at
  ``(c+1, c)`` for ``c < 2h`` and the recursive branch places ``S_{h,i}`` in
  rows ``h+1 .. 2h`` and columns ``0 .. h-1``; for ``n = 2h`` the identity
  branch is ``I_n`` and the recursive block sits in rows ``h .. 2h-1``,
  columns ``0 .. h-1``. The identity branch is layer ``floor(lg n)``.
* In ``T'_n`` the first ``floor(lg(n-1)) + 1`` layers hold ``S_{n-1,i}`` in
  the top-left corner and layer ``L + j`` holds a single 1 at ``(j, n-1)``.
* Group elements of ``Z_{n_1} x ... x Z_{n_m}`` are numbered in mixed radix
  with ``n_1`` the most significant digit.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field as dc_field
from typing import Sequence

import numpy as np

from .errors import BudgetExceeded, IndexOutOfRange, InvalidSpec, ShapeMismatch
from .fields import QQ, ExtensionField, Field, GF, Poly, is_irreducible, multiplication_matrix
from .matrix import Matrix, rank_of
from .tensor import Tensor, reshape_3_to_odd

FULL_RANK_BUDGET = 1 << 20


def hamming_weight(n: int) -> int:
    if n < 0:
        raise ValueError("hamming_weight needs n >= 0")
    return bin(n).count("1")


def floor_lg(n: int) -> int:
    if n < 1:
        raise ValueError("floor_lg needs n >= 1")
    return n.bit_length() - 1


# ---------------------------------------------------------------------------
# Combinatorial family
# ---------------------------------------------------------------------------


def combinatorial_S_entry(n: int, i: int, r: int, c: int) -> int:
    """Entry ``(r, c)`` of ``S_{n,i}`` in O(lg n)."""
    if n < 1 or not 0 <= i <= floor_lg(n):
        raise IndexOutOfRange(f"S_{{{n},{i}}} is undefined")
    if not (0 <= r < n and 0 <= c < n):
        raise IndexOutOfRange(f"({r},{c}) outside {n}x{n}")
    while True:
        if n == 1:
            return 1
        h = n // 2
        if n % 2:
            if i == floor_lg(n):
                return int(r == c + 1)
            if r < h + 1 or c >= h:
                return 0
            r -= h + 1
        else:
            if i == floor_lg(n):
                return int(r == c)
            if r < h or c >= h:
                return 0
            r -= h
        n = h


def _S_dense(n: int) -> np.ndarray:
    """All layers ``S_{n,0..floor(lg n)}`` as an int array of shape (n, n, L)."""
    L = floor_lg(n) + 1
    out = np.zeros((n, n, L), dtype=np.int64)
    if n == 1:
        out[0, 0, 0] = 1
        return out
    h = n // 2
    sub = _S_dense(h)
    if n % 2:
        out[np.arange(1, n), np.arange(n - 1), L - 1] = 1
        out[h + 1 :, :h, : L - 1] = sub
    else:
        out[np.arange(n), np.arange(n), L - 1] = 1
        out[h:, :h, : L - 1] = sub
    return out


def combinatorial_S(n: int, i: int, field: Field = QQ) -> Matrix:
    if n < 1 or not 0 <= i <= floor_lg(n):
        raise IndexOutOfRange(f"S_{{{n},{i}}} is undefined")
    return Matrix(field, _S_dense(n)[:, :, i])


def combinatorial_T_entry(n: int, r: int, c: int, k: int) -> int:
    return combinatorial_S_entry(n, k, r, c)


def combinatorial_Tprime_entry(n: int, r: int, c: int, k: int) -> int:
    """Entry of ``T'_n`` (shape ``n x n x n``)."""
    if n < 2:
        raise InvalidSpec("T'_n needs n >= 2")
    if not all(0 <= x < n for x in (r, c, k)):
        raise IndexOutOfRange(f"({r},{c},{k}) outside [{n}]^3")
    L = floor_lg(n - 1) + 1
    if k < L:
        if r == n - 1 or c == n - 1:
            return 0
        return combinatorial_S_entry(n - 1, k, r, c)
    return int(r == k - L and c == n - 1)


def _Tprime_dense(n: int, layers: int | None = None) -> np.ndarray:
    L = floor_lg(n - 1) + 1
    k = n if layers is None else layers
    out = np.zeros((n, n, k), dtype=np.int64)
    S = _S_dense(n - 1)
    take = min(L, k)
    out[: n - 1, : n - 1, :take] = S[:, :, :take]
    for j in range(k - L):
        out[j, n - 1, L + j] = 1
    return out


@dataclass(frozen=True)
class CombinatorialSpec:
    n: int
    variant: str = "T"
    field: Field = QQ

    def __post_init__(self):
        if self.variant not in ("T", "Tprime"):
            raise InvalidSpec(f"variant must be 'T' or 'Tprime', got {self.variant!r}")
        if self.n < (2 if self.variant == "Tprime" else 1):
            raise InvalidSpec(f"n={self.n} too small for variant {self.variant}")


def build_combinatorial(spec: CombinatorialSpec) -> Tensor:
    data = _S_dense(spec.n) if spec.variant == "T" else _Tprime_dense(spec.n)
    return Tensor(spec.field, data)


# ---------------------------------------------------------------------------
# Algebraic (multiplication-matrix) family
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AlgebraicSpec:
    p: int
    modulus: Poly
    layers: int

    def __post_init__(self):
        if self.modulus.p != self.p:
            raise InvalidSpec("modulus is over a different prime")
        if not self.modulus.is_monic() or not is_irreducible(self.modulus):
            raise InvalidSpec(f"{self.modulus} is not a monic irreducible over GF({self.p})")
        if not 1 <= self.layers <= self.modulus.degree:
            raise InvalidSpec(f"layer count must be in [1, {self.modulus.degree}]")

    @property
    def n(self) -> int:
        return self.modulus.degree


def algebraic_layers(spec: AlgebraicSpec) -> list[Matrix]:
    K = GF(spec.p, modulus=spec.modulus)
    if not isinstance(K, ExtensionField):
        # degree one: the only layer is the 1x1 identity
        return [Matrix.identity(K, 1)]
    x = K.gen
    return [multiplication_matrix(K, K.pow(x, i)) for i in range(spec.layers)]


def build_algebraic(spec: AlgebraicSpec) -> Tensor:
    """``n x n x k`` tensor whose layer ``i`` is multiplication by ``x^i``."""
    mats = algebraic_layers(spec)
    F = GF(spec.p)
    return Tensor(F, np.stack([m.data for m in mats], axis=-1))


def verify_full_rank_combinations(layers: Sequence[Matrix], budget: int = FULL_RANK_BUDGET) -> bool:
    """True iff every nonzero linear combination of the layers is invertible."""
    if not layers:
        return True
    F = layers[0].field
    if not F.is_finite:
        raise InvalidSpec("exhaustive check needs a finite field")
    n = layers[0].rows
    for M in layers:
        if M.field != F or M.shape != (n, n):
            raise ShapeMismatch("layers must be square matrices of one size over one field")
    k = len(layers)
    if F.order**k - 1 > budget:
        raise BudgetExceeded(f"{F.order}^{k} - 1 combinations exceed budget {budget}")
    stack = np.stack([M.data for M in layers])
    for coeffs in itertools.product(list(F.elements()), repeat=k):
        if all(c == 0 for c in coeffs):
            continue
        acc = F.zeros((n, n))
        for c, L in zip(coeffs, stack):
            if c != 0:
                acc = F.add_arr(acc, F.mul_arr(L, c))
        if rank_of(F, acc) < n:
            return False
    return True


# ---------------------------------------------------------------------------
# Group tensors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AbelianGroupSpec:
    orders: tuple[int, ...]
    d: int

    def __post_init__(self):
        object.__setattr__(self, "orders", tuple(int(n) for n in self.orders))
        if not self.orders:
            raise InvalidSpec("need at least one cyclic factor")
        if any(n < 2 for n in self.orders):
            raise InvalidSpec(f"cyclic factor orders must be >= 2, got {self.orders}")
        if self.d < 1:
            raise InvalidSpec("tensor order d must be >= 1")

    @property
    def group_order(self) -> int:
        return math.prod(self.orders)

    def element(self, index: int) -> tuple[int, ...]:
        """Mixed-radix digits of an element index, most significant first."""
        digits = []
        for n in reversed(self.orders):
            index, r = divmod(index, n)
            digits.append(r)
        return tuple(reversed(digits))

    def index(self, element: Sequence[int]) -> int:
        idx = 0
        for g, n in zip(element, self.orders):
            idx = idx * n + (g % n)
        return idx


def build_group_tensor(spec: AbelianGroupSpec, field: Field = QQ) -> Tensor:
    """0/1 tensor of shape ``|G|^d`` marking tuples that sum to the identity."""
    G = spec.group_order
    d = spec.d
    ok = np.ones((G,) * d, dtype=bool)
    idx = np.arange(G)
    stride = G
    for n in spec.orders:
        stride //= n
        digit = (idx // stride) % n
        total = np.zeros((1,) * d, dtype=np.int64)
        for j in range(d):
            shape = [1] * d
            shape[j] = G
            total = total + digit.reshape(shape)
        ok &= total % n == 0
    return Tensor(field, ok.astype(np.int64))


@dataclass(frozen=True)
class FiniteGroup:
    """Finite group given by its multiplication table ``table[g][h] = g*h``."""

    table: tuple[tuple[int, ...], ...]
    identity: int = 0
    labels: tuple[str, ...] = dc_field(default=())

    def __post_init__(self):
        t = tuple(tuple(int(x) for x in row) for row in self.table)
        object.__setattr__(self, "table", t)
        n = len(t)
        if any(len(row) != n for row in t):
            raise InvalidSpec("multiplication table must be square")
        if any(sorted(row) != list(range(n)) for row in t):
            raise InvalidSpec("multiplication table rows must be permutations")
        if any(t[self.identity][g] != g or t[g][self.identity] != g for g in range(n)):
            raise InvalidSpec("identity element does not act trivially")

    @property
    def order(self) -> int:
        return len(self.table)

    def mul(self, g: int, h: int) -> int:
        return self.table[g][h]

    def inverse(self, g: int) -> int:
        return self.table[g].index(self.identity)


def symmetric_group(n: int) -> tuple[FiniteGroup, list[tuple[int, ...]]]:
    """``S_n`` with elements in lexicographic order of their one-line notation.

    The product is composition ``(g*h)(x) = g(h(x))``; element 0 is the identity.
    """
    perms = list(itertools.permutations(range(n)))
    pos = {p: i for i, p in enumerate(perms)}
    table = [[pos[tuple(g[h[x]] for x in range(n))] for h in perms] for g in perms]
    labels = tuple("".join(str(v) for v in p) for p in perms)
    return FiniteGroup(tuple(map(tuple, table)), 0, labels), perms


def build_group_tensor_from_table(group: FiniteGroup, d: int, field: Field = QQ) -> Tensor:
    """``T(g_1, ..., g_d) = [g_1 * ... * g_d == identity]`` for any finite group."""
    if d < 1:
        raise InvalidSpec("tensor order d must be >= 1")
    n = group.order
    table = np.array(group.table, dtype=np.int64)
    prod = np.arange(n)
    for _ in range(d - 1):
        prod = table[prod[..., None], np.arange(n)]
    return Tensor(field, (prod == group.identity).astype(np.int64))


# ---------------------------------------------------------------------------
# High-order family
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HighOrderSpec:
    n: int
    d: int
    field: Field = QQ

    def __post_init__(self):
        if self.n < 2 or self.d < 1:
            raise InvalidSpec("high-order family needs n >= 2 and d >= 1")

    @property
    def N(self) -> int:
        return self.n**self.d


def build_highorder_base(spec: HighOrderSpec) -> Tensor:
    """The ``[N] x [N] x [n]`` tensor (``N = n^d``) that gets reshaped.

    When ``n`` is at least the number ``L = floor(lg(N-1)) + 1`` of recursive
    layers this is ``T'_N`` truncated to its first ``n`` layers. When ``n < L``
    the top ``n`` layers ``S_{N-1, L-n .. L-1}`` are kept in the top-left
    corner instead; both variants have
    ``2N + n - 2H(N-1) - floor(lg(N-1)) - 2`` nonzeros.
    """
    n, N = spec.n, spec.N
    L = floor_lg(N - 1) + 1
    if n >= L:
        data = _Tprime_dense(N, layers=n)
    else:
        data = np.zeros((N, N, n), dtype=np.int64)
        data[: N - 1, : N - 1, :] = _S_dense(N - 1)[:, :, L - n :]
    return Tensor(spec.field, data)


def build_highorder(spec: HighOrderSpec) -> Tensor:
    """Order ``2d+1`` tensor of shape ``[n]^(2d+1)``."""
    return reshape_3_to_odd(build_highorder_base(spec), spec.n, spec.d)


# ---------------------------------------------------------------------------
# Sum tensors
# ---------------------------------------------------------------------------


def build_sum_tensor(n: int, d: int, coeffs: Sequence, field: Field) -> Tensor:
    """``T(i_1..i_d) = coeffs[i_1 + ... + i_d]`` on ``[n]^d``."""
    if n < 1 or d < 1:
        raise InvalidSpec("need n >= 1 and d >= 1")
    if len(coeffs) != d * (n - 1) + 1:
        raise InvalidSpec(f"need {d * (n - 1) + 1} coefficients, got {len(coeffs)}")
    total = np.zeros((1,) * d, dtype=np.int64)
    for j in range(d):
        shape = [1] * d
        shape[j] = n
        total = total + np.arange(n).reshape(shape)
    c = field.array(list(coeffs))
    return Tensor(field, c[total])


def build_sum_indicator(n: int, d: int, m: int, field: Field) -> Tensor:
    """``[i_1 + ... + i_d == m]`` on ``[n]^d``.

    With ``m = (d-1)(n-1)`` its rank meets the lower bound ``(d-1)(n-1)+1``
    for sum-defined tensors with nonzero coefficient at ``m``.
    """
    if not 0 <= m <= d * (n - 1):
        raise InvalidSpec(f"target sum {m} outside [0, {d * (n - 1)}]")
    coeffs = [field.one if k == m else field.zero for k in range(d * (n - 1) + 1)]
    return build_sum_tensor(n, d, coeffs, field)


def parse_modulus(p: int, text: str) -> Poly:
    f = Poly.parse(p, text)
    if not f.is_monic() or not is_irreducible(f):
        raise InvalidSpec(f"{f} is not a monic irreducible over GF({p})")
    return f
