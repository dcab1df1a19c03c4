"""Exact tensor rank over a finite field by exhaustive search.

Every tensor of a fixed shape over ``GF(q)`` is encoded as an integer in
base ``q`` (one digit per cell, row-major). Level ``k`` is the sorted set of
codes of all tensors of rank at most ``k``; it is grown one simple tensor at
a time. Simple tensors are enumerated in a canonical form (every axis vector
but the last has first nonzero entry 1) so each one appears once. When a
level would grow past ``LEVEL_CAP`` codes, higher ranks are decided by
meet-in-the-middle: ``T`` has rank at most ``a + b`` iff ``T - C_a`` meets
``C_b``.
"""

from __future__ import annotations

import functools
import itertools
import math

import numpy as np

from ..errors import BudgetExceeded, InvalidParams
from ..fields import Field
from ..tensor import Tensor

STATE_BUDGET = 1 << 27
LEVEL_CAP = 1 << 23
_CHUNK = 1 << 22


class _Space:
    """Cached level sets for one (field, shape)."""

    def __init__(self, field: Field, shape: tuple[int, ...]):
        self.field = field
        self.shape = shape
        self.q = field.order
        self.cells = math.prod(shape)
        self.weights = np.array([self.q**i for i in range(self.cells)], dtype=np.int64)
        # addition works on blocks of digits through a lookup table
        block = 1
        while self.q ** (block + 1) <= 1024 and block < self.cells:
            block += 1
        self.block_base = self.q**block
        self.block_count = -(-self.cells // block)
        codes = np.arange(self.block_base, dtype=np.int64)
        self.add_table = np.array([self._add_digits(np.full(self.block_base, a, dtype=np.int64), codes, block) for a in range(self.block_base)])
        self.neg_table = self._neg_digits(codes, block)
        self.simple = self._simple_codes()
        self.levels = [np.zeros(1, dtype=np.int64)]
        self.complete = True  # False once a level hit the cap

    # -- encoding -------------------------------------------------------------
    def encode(self, data: np.ndarray) -> int:
        return int(np.dot(np.asarray(data, dtype=np.int64).reshape(-1), self.weights))

    def _add_digits(self, a, b, width):
        out = np.zeros_like(a)
        for i in range(width):
            w = self.q**i
            out += self.field.add_arr((a // w) % self.q, (b // w) % self.q) * w
        return out

    def _neg_digits(self, a, width):
        out = np.zeros_like(a)
        for i in range(width):
            w = self.q**i
            out += self.field.neg_arr((a // w) % self.q) * w
        return out

    def _blockwise(self, fn, *arrays):
        B = self.block_base
        out = np.zeros(np.broadcast(*arrays).shape, dtype=np.int64)
        w = 1
        for _ in range(self.block_count):
            out += fn(*[(x // w) % B for x in arrays]) * w
            w *= B
        return out

    def add(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Digitwise field addition of broadcast code arrays."""
        if self.q == 2:
            return np.bitwise_xor(a, b)
        return self._blockwise(lambda x, y: self.add_table[x, y], np.asarray(a), np.asarray(b))

    def neg(self, a: np.ndarray) -> np.ndarray:
        if self.q == 2:
            return np.asarray(a)
        return self._blockwise(lambda x: self.neg_table[x], np.asarray(a))

    # -- simple tensors -------------------------------------------------------
    def _vectors(self, n: int, normalized: bool) -> np.ndarray:
        F = self.field
        out = []
        for v in itertools.product(range(self.q), repeat=n):
            nz = [x for x in v if x != 0]
            if not nz or (normalized and nz[0] != F.one):
                continue
            out.append(v)
        return np.array(out, dtype=np.int64)

    def _simple_codes(self) -> np.ndarray:
        F = self.field
        d = len(self.shape)
        vecs = [self._vectors(n, j < d - 1) for j, n in enumerate(self.shape)]
        acc = vecs[0]  # (count, cells so far)
        for v in vecs[1:]:
            prod = F.mul_arr(acc[:, None, :, None], v[None, :, None, :])
            acc = prod.reshape(acc.shape[0] * v.shape[0], -1)
        return np.unique(acc @ self.weights)

    # -- levels ---------------------------------------------------------------
    def _grow(self) -> bool:
        prev = self.levels[-1]
        pieces = [prev]
        total = prev.size
        per_code = 1 if self.q == 2 else 2 * self.block_count
        step = max(1, _CHUNK // (max(prev.size, 1) * per_code))
        for s in range(0, self.simple.size, step):
            chunk = self.add(prev[:, None], self.simple[None, s : s + step]).reshape(-1)
            pieces.append(np.unique(chunk))
            total += pieces[-1].size
            if len(pieces) > 8:
                pieces = [np.unique(np.concatenate(pieces))]
                total = pieces[0].size
                if total > LEVEL_CAP:
                    self.complete = False
                    return False
        nxt = np.unique(np.concatenate(pieces))
        if nxt.size > LEVEL_CAP:
            self.complete = False
            return False
        self.levels.append(nxt)
        return True

    def level(self, k: int) -> np.ndarray | None:
        while len(self.levels) <= k and self.complete:
            if self.levels[-1].size == self.q**self.cells:
                return self.levels[-1]
            if not self._grow():
                break
        if k < len(self.levels):
            return self.levels[k]
        if self.levels[-1].size == self.q**self.cells:
            return self.levels[-1]
        return None

    @staticmethod
    def _member(sorted_codes: np.ndarray, codes: np.ndarray) -> np.ndarray:
        pos = np.searchsorted(sorted_codes, codes)
        pos = np.minimum(pos, sorted_codes.size - 1)
        return sorted_codes[pos] == codes

    def within(self, code: int, k: int) -> bool:
        """Whether the tensor with this code has rank at most ``k``."""
        if k < len(self.levels):
            return bool(self._member(self.levels[k], np.array([code], dtype=np.int64))[0])
        if self.levels[-1].size == self.q**self.cells:
            return True
        a = (k + 1) // 2
        big = self.level(a)
        if big is None:
            a = len(self.levels) - 1
            big = self.levels[a]
        b = k - a
        if b > a:
            # split off one simple tensor at a time until both halves are built
            for s in np.concatenate([[0], self.simple]):
                rest = int(self.add(np.array([code]), self.neg(np.array([s])))[0])
                if self.within(rest, k - 1):
                    return True
            return False
        small = self.levels[b]
        target = np.array([code], dtype=np.int64)
        step = _CHUNK if self.q == 2 else max(1, _CHUNK // (2 * self.block_count))
        for s in range(0, small.size, step):
            cand = self.add(target, self.neg(small[s : s + step]))
            if self._member(big, cand).any():
                return True
        return False


@functools.lru_cache(maxsize=16)
def _space(field: Field, shape: tuple[int, ...]) -> _Space:
    return _Space(field, shape)


def oracle_feasible(T: Tensor, budget: int = STATE_BUDGET) -> bool:
    F = T.field
    return F.is_finite and F.order ** T.size <= budget


def brute_force_rank(T: Tensor, max_rank: int | None = None, budget: int = STATE_BUDGET) -> int | None:
    """Exact rank of ``T``, or ``None`` if it exceeds ``max_rank``."""
    F = T.field
    if not F.is_finite:
        raise InvalidParams("the rank oracle needs a finite field")
    if F.order ** T.size > budget:
        raise BudgetExceeded(f"{F.order}^{T.size} tensors exceed the oracle budget {budget}")
    if T.is_zero():
        return 0
    limit = T.size if max_rank is None else max_rank
    space = _space(F, T.shape)
    code = space.encode(T.data)
    for k in range(1, limit + 1):
        if space.within(code, k):
            return k
    return None
