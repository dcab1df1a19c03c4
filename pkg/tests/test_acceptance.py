"""Acceptance criteria, one test per criterion at its stated tolerance.

Each test records a PASS/FAIL line; the lines are printed in the terminal
summary. Run alone with ``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import dataclasses
import functools
import itertools
import sys
import time

import pytest
from hypothesis import settings

from conftest import ACCEPTANCE_RESULTS, PROPERTY_FIELDS, s3_representations
from tensorrank.bounds.formulas import (
    combinatorial_t,
    combinatorial_tprime,
    elimination,
    formula_bounds,
    highorder,
    interpolate_upper,
    repthy_cap,
    tightness_lower,
)
from tensorrank.bounds.layer_reduction import (
    BoundCertificate,
    CertificateBase,
    CertificateStep,
    lower_bound_layer_reduction,
    verify_certificate,
)
from tensorrank.bounds.monotone import monotone_rank_permutation
from tensorrank.bounds.oracle import brute_force_rank
from tensorrank.constructions import (
    AbelianGroupSpec,
    AlgebraicSpec,
    CombinatorialSpec,
    HighOrderSpec,
    build_algebraic,
    build_combinatorial,
    build_group_tensor,
    build_group_tensor_from_table,
    build_highorder,
    build_highorder_base,
    build_sum_indicator,
    hamming_weight,
)
from tensorrank.decompositions import (
    character_decomposition,
    cyclic_group_decomposition,
    field_transfer,
    is_monotone,
    representation_decomposition,
    trivial_decomposition,
    validate_representation,
    verify,
)
from tensorrank.fields import GF, QQ, Poly
from tensorrank.tensor import Tensor, from_layers


def criterion(number: int, text: str):
    """Record PASS or FAIL for one criterion around the wrapped test."""

    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except BaseException:
                ACCEPTANCE_RESULTS.append((number, False, text))
                raise
            ACCEPTANCE_RESULTS.append((number, True, text))

        return run

    return wrap


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.start


@criterion(1, "T_n lower = upper = 2n - 2H(n) + 1 for n in [1, 64] over GF(2), GF(5), Q in < 10 s")
def test_criterion_1_combinatorial_exactness():
    with Timer() as t:
        for F in (GF(2), GF(5), QQ):
            for n in range(1, 65):
                T = build_combinatorial(CombinatorialSpec(n, "T", F))
                lower, cert = lower_bound_layer_reduction(T)
                upper = trivial_decomposition(T).rank
                assert lower == upper == 2 * n - 2 * hamming_weight(n) + 1 == combinatorial_t(n), (F, n)
                assert verify_certificate(T, cert)
    assert t.seconds < 10, t.seconds


@criterion(2, "T'_n lower = upper = 3n - 2H(n-1) - floor(lg(n-1)) - 2 for n in [2, 64] in < 30 s")
def test_criterion_2_tprime_exactness():
    with Timer() as t:
        for F in (GF(2), GF(5), QQ):
            for n in range(2, 65):
                T = build_combinatorial(CombinatorialSpec(n, "Tprime", F))
                lower, cert = lower_bound_layer_reduction(T)
                upper = trivial_decomposition(T).rank
                expected = 3 * n - 2 * hamming_weight(n - 1) - ((n - 1).bit_length() - 1) - 2
                assert lower == upper == expected == combinatorial_tprime(n), (F, n)
                assert verify_certificate(T, cert)
    assert t.seconds < 30, t.seconds


@criterion(3, "cyclic interpolation verifies with <= d(n-1)+1 terms on the four cases in < 5 s")
def test_criterion_3_interpolation():
    cases = [(3, 3, GF(7)), (4, 3, GF(11)), (5, 2, GF(11)), (4, 3, QQ)]
    with Timer() as t:
        for n, d, F in cases:
            D = cyclic_group_decomposition(n, d, F)
            T = build_group_tensor(AbelianGroupSpec((n,), d), F)
            assert verify(T, D), (n, d, F)
            assert D.rank <= d * (n - 1) + 1 == interpolate_upper(n, d)
    assert t.seconds < 5, t.seconds


@criterion(4, "characters of Z3 at d=3 over GF(7) and GF(4) verify with exactly 3 < 7 terms")
def test_criterion_4_characters():
    spec = AbelianGroupSpec((3,), 3)
    for F in (GF(7), GF(4)):
        D = character_decomposition(spec, F)
        assert verify(build_group_tensor(spec, F), D)
        assert D.rank == 3 < interpolate_upper(3, 3) == 7


@criterion(5, "GF(4) characters of Z3 at d=3 moved to GF(2) verify with <= 12 terms")
def test_criterion_5_field_transfer():
    spec = AbelianGroupSpec((3,), 3)
    D = field_transfer(character_decomposition(spec, GF(4)), GF(2))
    assert D.field == GF(2)
    assert verify(build_group_tensor(spec, GF(2)), D)
    assert D.rank <= 12


@criterion(6, "S_3 over GF(7) with dims (1,1,2) validates and verifies with 10 <= 14 terms")
def test_criterion_6_representations():
    rep = s3_representations(GF(7))
    assert validate_representation(rep)
    assert tuple(sorted(rep.dims)) == (1, 1, 2)
    D = representation_decomposition(rep, 3)
    T = build_group_tensor_from_table(rep.group, 3, GF(7))
    assert verify(T, D)
    assert D.rank == 10 <= repthy_cap(6, 3) == 14


@criterion(7, "oracle: algebraic 2x2x2 over GF(2) = 3 = elimination; sum indicator over GF(5) = 3 = tightness, each < 60 s")
def test_criterion_7_oracle():
    with Timer() as t:
        T = build_algebraic(AlgebraicSpec(2, Poly(2, (1, 1, 1)), 2))
        r = brute_force_rank(T)
    assert r == 3 == formula_bounds("elimination", q=2, n=2) == elimination(2, 2)
    assert t.seconds < 60, t.seconds
    with Timer() as t:
        S = build_sum_indicator(2, 3, 2, GF(5))
        r = brute_force_rank(S)
    assert r == 3 == tightness_lower(2, 3)
    assert t.seconds < 60, t.seconds
    # the indicator of i1+i2+i3=2 on {0,1}^3 is the W tensor
    assert S == Tensor.from_entries(GF(5), (2, 2, 2), {(1, 1, 0): 1, (1, 0, 1): 1, (0, 1, 1): 1}.items())


@criterion(8, "Z4 at d=3 over Q: 10-term non-monotone upper bound < monotone rank 16; trivial 16 terms monotone")
def test_criterion_8_monotone_separation():
    spec = AbelianGroupSpec((4,), 3)
    T = build_group_tensor(spec, QQ)
    D = cyclic_group_decomposition(4, 3, QQ)
    assert verify(T, D) and D.rank == 10
    assert monotone_rank_permutation(T) == 16
    assert D.rank < 16
    assert not is_monotone(D)
    trivial = trivial_decomposition(T)
    assert is_monotone(trivial) and verify(T, trivial) and trivial.rank == 16


@criterion(9, "high-order (2,2) and (3,2): base bound equals the closed form, reshape preserves every cell, < 10 s")
def test_criterion_9_highorder():
    with Timer() as t:
        for n, d in ((2, 2), (3, 2)):
            spec = HighOrderSpec(n, d, GF(2))
            base = build_highorder_base(spec)
            value, cert = lower_bound_layer_reduction(base)
            N = n**d
            closed = 2 * N + n - 2 * hamming_weight(N - 1) - ((N - 1).bit_length() - 1) - 2
            assert value == closed == highorder(n, d), (n, d, value)
            assert verify_certificate(base, cert)
            assert base.nnz == closed
            R = build_highorder(spec)
            assert R.shape == (n,) * (2 * d + 1)
            for idx in itertools.product(range(n), repeat=2 * d + 1):
                a = sum(idx[j] * n**j for j in range(d))
                b = sum(idx[d + j] * n**j for j in range(d))
                assert R[idx] == base[a, b, idx[2 * d]], idx
            assert R.nnz == base.nnz
    assert t.seconds < 10, t.seconds


def _mutation_targets():
    yield build_combinatorial(CombinatorialSpec(16, "T", GF(2)))
    yield build_combinatorial(CombinatorialSpec(12, "Tprime", QQ))
    yield build_highorder_base(HighOrderSpec(3, 2, GF(5)))
    yield build_group_tensor(AbelianGroupSpec((3,), 3), GF(7))


@criterion(10, "200 examples per property; emitted certificates replay; three mutation classes rejected")
def test_criterion_10_properties_and_mutations():
    assert settings().max_examples == 200
    assert len(PROPERTY_FIELDS) >= 3
    for T in _mutation_targets():
        for strategy in ("greedy", "exhaustive"):
            value, cert = lower_bound_layer_reduction(T, strategy=strategy)
            assert verify_certificate(T, cert) and cert.claim == value
            # inflated claim
            assert not verify_certificate(T, dataclasses.replace(cert, claim=cert.claim + 1))
            # dependent layer: repeat an eliminated index while claiming the extra layer
            for i, s in enumerate(cert.steps):
                if s.eliminate:
                    dup = dataclasses.replace(s, eliminate=s.eliminate + (s.eliminate[0],))
                    bad = dataclasses.replace(cert, steps=cert.steps[:i] + (dup,) + cert.steps[i + 1 :], claim=cert.claim + 1)
                    assert not verify_certificate(T, bad)
                    break

    F = GF(3)
    L = Tensor(F, [[1, 0], [0, 1]])
    T = from_layers([L, L.scale(2), Tensor(F, [[0, 1], [0, 0]])])
    dependent = BoundCertificate(T.digest(), (CertificateStep(2, (0, 1), ((0,), (1,), (2,))),), CertificateBase("flattening", 1, ((0,), (1, 2))), 3)
    assert not verify_certificate(T, dependent)

    G = GF(2)
    T = from_layers([Tensor(G, [[1, 0], [0, 1]]), Tensor(G, [[0, 1], [1, 0]])])
    good = BoundCertificate(T.digest(), (CertificateStep(2, (0,), ((0,), (1,), (1,))),), CertificateBase("flattening", 1, ((0,), (1, 2))), 2)
    assert verify_certificate(T, good)
    wide = dataclasses.replace(good, steps=(CertificateStep(2, (0,), ((0, 1), (0, 1), (1,))),), base=CertificateBase("flattening", 2, ((0,), (1, 2))), claim=3)
    assert not verify_certificate(T, wide)
    assert not verify_certificate(T, dataclasses.replace(good, claim=3))


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
