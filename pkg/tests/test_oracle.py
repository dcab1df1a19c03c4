from __future__ import annotations

import functools
import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import simple_tensors, tensors
from oracles import gauss_rank_mod, rank_table
from tensorrank.bounds.oracle import brute_force_rank, oracle_feasible
from tensorrank.constructions import AlgebraicSpec, build_algebraic
from tensorrank.errors import BudgetExceeded, InvalidParams
from tensorrank.fields import GF, QQ, Poly
from tensorrank.tensor import Tensor


def test_zero_and_simple():
    F = GF(3)
    assert brute_force_rank(Tensor.zeros(F, (2, 2, 2))) == 0
    T = Tensor(F, np.einsum("i,j,k->ijk", [1, 2], [0, 1], [2, 2]) % 3)
    assert brute_force_rank(T) == 1


def test_algebraic_tensor_has_rank_three():
    T = build_algebraic(AlgebraicSpec(2, Poly(2, (1, 1, 1)), 2))
    assert brute_force_rank(T) == 3


def test_w_state():
    # the 2x2x2 W tensor has rank 3 over every field
    for p in (2, 3):
        W = Tensor.from_entries(GF(p), (2, 2, 2), {(1, 0, 0): 1, (0, 1, 0): 1, (0, 0, 1): 1}.items())
        assert brute_force_rank(W) == 3


@given(data=st.data())
def test_matrices_match_gaussian_rank(data):
    p = data.draw(st.sampled_from([2, 3, 5]))
    shape = data.draw(st.sampled_from([(2, 3), (3, 3), (3, 2), (2, 2)]))
    T = data.draw(tensors(GF(p), shape))
    assert brute_force_rank(T) == gauss_rank_mod(T.data.tolist(), p)


@given(data=st.data())
def test_simple_tensors_have_rank_one(data):
    F = data.draw(st.sampled_from([GF(2), GF(3), GF(4)]))
    S = data.draw(simple_tensors(F, (2, 2, 2)))
    assert brute_force_rank(S.to_tensor()) == (0 if S.is_zero() else 1)


@pytest.mark.parametrize("p", [2, 3])
def test_every_2x2x2_tensor(p):
    table = rank_table((2, 2, 2), p)
    assert len(table) == p**8
    F = GF(p)
    for cells, r in table.items():
        T = Tensor(F, np.array(cells, dtype=np.int64).reshape(2, 2, 2))
        assert brute_force_rank(T) == r


def test_every_2x2x3_tensor_over_gf2():
    table = rank_table((2, 2, 3), 2)
    F = GF(2)
    for cells, r in table.items():
        assert brute_force_rank(Tensor(F, np.array(cells, dtype=np.int64).reshape(2, 2, 3))) == r
    assert max(table.values()) == 3


def _packed_simple(shape, q, mul):
    """Nonzero simple tensors as packed ints; each cell takes ``q.bit_length() - 1`` bits."""
    width = q.bit_length() - 1
    out = set()
    for choice in itertools.product(*[list(itertools.product(range(q), repeat=n)) for n in shape]):
        cells = [1]
        for v in choice:
            cells = [mul(a, b) for a in cells for b in v]
        code = sum(c << (width * i) for i, c in enumerate(cells))
        if code:
            out.add(code)
    return np.array(sorted(out), dtype=np.int64)


def _contains(sorted_codes, codes):
    pos = np.minimum(np.searchsorted(sorted_codes, codes), sorted_codes.size - 1)
    return sorted_codes[pos] == codes


@functools.lru_cache(maxsize=4)
def _xor_levels(shape, q):
    """Sorted code sets of rank at most 0, 1, 2 in characteristic two, addition being XOR."""
    mul = (lambda a, b: a & b) if q == 2 else _gf4_mul
    simple = _packed_simple(shape, q, mul)
    two = np.unique(np.concatenate([[0], simple, (simple[:, None] ^ simple[None, :]).ravel()]))
    return np.array([0]), simple, two


def _gf4_mul(a, b):
    a0, a1, b0, b1 = a & 1, a >> 1, b & 1, b >> 1
    return ((a0 & b0) ^ (a1 & b1)) | (((a0 & b1) ^ (a1 & b0) ^ (a1 & b1)) << 1)


def _xor_rank(code, shape, q):
    """Exact rank when at most 4, otherwise 5."""
    zero, simple, two = _xor_levels(shape, q)
    if code == 0:
        return 0
    if _contains(simple, np.array([code]))[0]:
        return 1
    if _contains(two, np.array([code]))[0]:
        return 2
    if _contains(two, code ^ simple).any():
        return 3
    for s in simple:
        if _contains(two, (code ^ s) ^ simple).any():
            return 4
    return 5


def _pack(cells, q):
    width = q.bit_length() - 1
    return sum(int(c) << (width * i) for i, c in enumerate(cells))


@settings(max_examples=200)
@given(cells=st.lists(st.integers(0, 1), min_size=27, max_size=27))
def test_3x3x3_over_gf2_against_xor_search(cells):
    T = Tensor(GF(2), np.array(cells, dtype=np.int64).reshape(3, 3, 3))
    assert min(brute_force_rank(T), 5) == _xor_rank(_pack(cells, 2), (3, 3, 3), 2)


@settings(max_examples=200)
@given(cells=st.lists(st.integers(0, 3), min_size=8, max_size=8))
def test_2x2x2_over_gf4_against_xor_search(cells):
    T = Tensor(GF(4), np.array(cells, dtype=np.int64).reshape(2, 2, 2))
    assert min(brute_force_rank(T), 5) == _xor_rank(_pack(cells, 4), (2, 2, 2), 4)


def test_max_rank_cutoff():
    W = Tensor.from_entries(GF(2), (2, 2, 2), {(1, 0, 0): 1, (0, 1, 0): 1, (0, 0, 1): 1}.items())
    assert brute_force_rank(W, max_rank=2) is None
    assert brute_force_rank(W, max_rank=3) == 3


def test_budget_and_field_errors():
    with pytest.raises(BudgetExceeded):
        brute_force_rank(Tensor.zeros(GF(2), (2, 2, 2)), budget=255)
    assert brute_force_rank(Tensor.zeros(GF(2), (2, 2, 2)), budget=256) == 0
    with pytest.raises(InvalidParams):
        brute_force_rank(Tensor.zeros(QQ, (2, 2)))
    assert not oracle_feasible(Tensor.zeros(QQ, (2, 2)))
    assert not oracle_feasible(Tensor.zeros(GF(2), (3, 3, 3, 3)))


def test_rank_table_max_over_2x2x2x2_gf2():
    # every maximal-rank tensor plus an even sample of the rest
    table = rank_table((2, 2, 2, 2), 2)
    top = max(table.values())
    assert top == 6
    worst = [c for c, r in table.items() if r == top]
    F = GF(2)
    for cells in worst:
        T = Tensor(F, np.array(cells, dtype=np.int64).reshape(2, 2, 2, 2))
        assert brute_force_rank(T) == table[cells]
    sample = list(itertools.islice(table.items(), 0, len(table), 997))
    for cells, r in sample:
        assert brute_force_rank(Tensor(F, np.array(cells, dtype=np.int64).reshape(2, 2, 2, 2))) == r
