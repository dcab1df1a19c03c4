from __future__ import annotations

import dataclasses
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import simple_tensors, tensors
from oracles import gauss_rank_mod
from tensorrank.bounds.flattening import all_splits, best_flattening, flattening_lower_bound
from tensorrank.bounds.formulas import (
    FORMULAS,
    anyfield_upper,
    combinatorial_t,
    combinatorial_tprime,
    elimination,
    elimination_value,
    formula_bounds,
    highorder,
    repthy_cap,
    repthy_upper,
    tightness_lower,
)
from tensorrank.bounds.layer_reduction import (
    BoundCertificate,
    CertificateBase,
    CertificateStep,
    certificate_problem,
    eliminate_and_restrict,
    lower_bound_layer_reduction,
    verify_certificate,
)
from tensorrank.bounds.monotone import monotone_rank_permutation
from tensorrank.bounds.oracle import brute_force_rank
from tensorrank.bounds.report import rank_report
from tensorrank.constructions import (
    AbelianGroupSpec,
    AlgebraicSpec,
    CombinatorialSpec,
    build_algebraic,
    build_combinatorial,
    build_group_tensor,
)
from tensorrank.decompositions import (
    character_decomposition,
    cyclic_group_decomposition,
    trivial_decomposition,
)
from tensorrank.errors import FieldNotOrdered, InvalidParams, NotPermutationTensor, PreconditionViolated
from tensorrank.fields import GF, QQ, Poly
from tensorrank.matrix import Matrix
from tensorrank.tensor import Tensor, from_layers


def full_box(T):
    return tuple(tuple(range(n)) for n in T.shape)


# -- flattening --------------------------------------------------------------


def test_flattening_examples():
    I = Tensor(QQ, Matrix.identity(QQ, 4).data)
    assert flattening_lower_bound(I, [0]) == 4
    Z2 = build_group_tensor(AbelianGroupSpec((2,), 3), GF(2))
    assert flattening_lower_bound(Z2, [0]) == 2
    # independent check of the same unfolding
    rows = Z2.flattening([0]).tolist()
    assert gauss_rank_mod(rows, 2) == 2


@given(data=st.data())
def test_flattening_of_simple_tensors(data):
    F = data.draw(st.sampled_from([QQ, GF(2), GF(5)]))
    shape = tuple(data.draw(st.lists(st.integers(1, 3), min_size=2, max_size=4)))
    S = data.draw(simple_tensors(F, shape))
    T = S.to_tensor()
    expected = 0 if S.is_zero() else 1
    assert all(flattening_lower_bound(T, s) == expected for s in all_splits(len(shape)))


def test_split_validation():
    T = Tensor.zeros(GF(2), (2, 2, 2))
    with pytest.raises(InvalidParams):
        flattening_lower_bound(T, [0, 1, 2])
    with pytest.raises(InvalidParams):
        flattening_lower_bound(T, ((0,), (0, 1, 2)))
    assert flattening_lower_bound(T, ((0, 2), (1,))) == 0


# -- strict eliminate-and-restrict -------------------------------------------


def test_strict_move_accepts_vanishing_layers():
    F = GF(2)
    L0 = Tensor(F, [[1, 0], [0, 0]])
    L1 = Tensor(F, [[0, 0], [0, 1]])
    T = from_layers([L0, L1])
    R = eliminate_and_restrict(T, 2, [0], [[1], [0, 1]])
    assert R == Tensor(F, [[[0], [1]]])


def test_strict_move_rejects_zero_layer():
    F = GF(2)
    T = from_layers([Tensor(F, [[1, 0], [0, 1]]), Tensor.zeros(F, (2, 2))])
    with pytest.raises(PreconditionViolated):
        eliminate_and_restrict(T, 2, [1], [None, None])


def test_strict_move_rejects_dependent_layers():
    F = GF(3)
    L = Tensor(F, [[1, 2], [0, 1]])
    T = from_layers([L, L.scale(2), Tensor(F, [[0, 0], [0, 0]])])
    with pytest.raises(PreconditionViolated):
        eliminate_and_restrict(T, 2, [0, 1], [[0], [0]])


def test_strict_move_rejects_non_vanishing_layer():
    F = GF(2)
    T = from_layers([Tensor(F, [[1, 0], [0, 1]]), Tensor(F, [[0, 1], [1, 0]])])
    with pytest.raises(PreconditionViolated):
        eliminate_and_restrict(T, 2, [0], [[0], [0, 1]])


def test_strict_move_eliminating_everything():
    F = GF(5)
    T = from_layers([Tensor(F, [[1, 0], [0, 0]]), Tensor(F, [[0, 0], [0, 1]])])
    assert eliminate_and_restrict(T, 2, [0, 1], [[0], [1]]) is None


@given(data=st.data())
def test_strict_move_is_sound(data):
    F = data.draw(st.sampled_from([GF(2), GF(3)]))
    T = data.draw(tensors(F, (2, 2, 2)))
    axis = data.draw(st.integers(0, 2))
    E = sorted(data.draw(st.sets(st.integers(0, 1), min_size=1, max_size=2)))
    box = [sorted(data.draw(st.sets(st.integers(0, 1), min_size=1))) for _ in range(2)]
    try:
        R = eliminate_and_restrict(T, axis, E, box)
    except PreconditionViolated:
        return
    rest = 0 if R is None else brute_force_rank(R)
    assert brute_force_rank(T) >= len(E) + rest


# -- identity-block pattern ---------------------------------------------------


def identity_block_tensor(A_layers, n):
    """Layer 0 is I_{2n}; layer k holds A_k in the lower-left n x n block."""
    F = A_layers[0].field
    top = Tensor(F, Matrix.identity(F, 2 * n).data)
    out = [top]
    for A in A_layers:
        M = F.zeros((2 * n, 2 * n))
        M[n:, :n] = A.data
        out.append(Tensor(F, M))
    return from_layers(out)


@given(data=st.data())
def test_identity_block_certificate(data):
    F = GF(2)
    n, k = 2, data.draw(st.integers(1, 3))
    A = [Matrix(F, data.draw(st.lists(st.lists(st.integers(0, 1), min_size=2, max_size=2), min_size=2, max_size=2))) for _ in range(k)]
    T = identity_block_tensor(A, n)
    rows = tuple(range(2 * n))
    layers_ = tuple(range(k + 1))
    s1 = CertificateStep(1, tuple(range(n, 2 * n)), (rows, tuple(range(n)), layers_))
    s2 = CertificateStep(0, tuple(range(n)), (tuple(range(n, 2 * n)), tuple(range(n)), layers_))
    s3 = CertificateStep(0, (), (tuple(range(n, 2 * n)), tuple(range(n)), tuple(range(1, k + 1))))
    stack = np.stack([a.data for a in A]).reshape(k, -1)
    base = gauss_rank_mod(stack.tolist(), 2)
    cert = BoundCertificate(T.digest(), (s1, s2, s3), CertificateBase("flattening", base, ((2,), (0, 1))), 2 * n + base)
    assert certificate_problem(T, cert) is None
    value, _ = lower_bound_layer_reduction(T)
    assert value >= 2 * n + base
    # the eliminated columns are nonzero on layer 0, so keeping it must fail
    keep0 = CertificateStep(0, (), (tuple(range(n, 2 * n)), tuple(range(n)), layers_))
    bad = dataclasses.replace(cert, steps=(s1, s2, keep0))
    assert not verify_certificate(T, bad)


# -- the three mutation classes ----------------------------------------------


def _two_layer():
    F = GF(2)
    return from_layers([Tensor(F, [[1, 0], [0, 1]]), Tensor(F, [[0, 1], [1, 0]])])


def test_valid_hand_certificate():
    T = _two_layer()
    step = CertificateStep(2, (0,), ((0,), (1,), (1,)))
    cert = BoundCertificate(T.digest(), (step,), CertificateBase("flattening", 1, ((0,), (1, 2))), 2)
    assert verify_certificate(T, cert)


def test_mutation_dependent_layer():
    F = GF(3)
    L = Tensor(F, [[1, 0], [0, 1]])
    T = from_layers([L, L.scale(2), Tensor(F, [[0, 1], [0, 0]])])
    step = CertificateStep(2, (0, 1), ((0,), (1,), (2,)))
    cert = BoundCertificate(T.digest(), (step,), CertificateBase("flattening", 1, ((0,), (1, 2))), 3)
    problem = certificate_problem(T, cert)
    assert problem is not None and "independent" in problem


def test_mutation_non_vanishing_layer_on_box():
    T = _two_layer()
    step = CertificateStep(2, (0,), ((0, 1), (0, 1), (1,)))
    cert = BoundCertificate(T.digest(), (step,), CertificateBase("flattening", 2, ((0,), (1, 2))), 3)
    problem = certificate_problem(T, cert)
    assert problem is not None and "vanish" in problem


def test_mutation_inflated_claim():
    T = _two_layer()
    step = CertificateStep(2, (0,), ((0,), (1,), (1,)))
    cert = BoundCertificate(T.digest(), (step,), CertificateBase("flattening", 1, ((0,), (1, 2))), 3)
    assert "claim" in certificate_problem(T, cert)


def test_wrong_tensor_rejected():
    T = _two_layer()
    _, cert = lower_bound_layer_reduction(T)
    other = Tensor(GF(2), np.ones((2, 2, 2), dtype=np.int64))
    assert not verify_certificate(other, cert)


def _mutants(T, cert):
    """Dependent-layer and inflated-claim variants of an emitted certificate."""
    yield "claim", dataclasses.replace(cert, claim=cert.claim + 1)
    yield "base", dataclasses.replace(cert, base=dataclasses.replace(cert.base, value=cert.base.value + 1), claim=cert.claim + 1)
    for i, s in enumerate(cert.steps):
        if not s.eliminate:
            continue
        # add a layer already covered by the span of the others: repeat an index
        dup = dataclasses.replace(s, eliminate=s.eliminate + (s.eliminate[0],))
        yield "dependent", dataclasses.replace(cert, steps=cert.steps[:i] + (dup,) + cert.steps[i + 1 :], claim=cert.claim + 1)
        break


@pytest.mark.parametrize(
    "T",
    [
        build_combinatorial(CombinatorialSpec(8, "T", GF(2))),
        build_combinatorial(CombinatorialSpec(8, "Tprime", GF(2))),
        build_combinatorial(CombinatorialSpec(13, "Tprime", QQ)),
        _two_layer(),
    ],
    ids=["T8", "Tprime8", "Tprime13", "two-layer"],
)
def test_emitted_certificates_and_mutants(T):
    value, cert = lower_bound_layer_reduction(T)
    assert verify_certificate(T, cert) and cert.claim == value
    for kind, bad in _mutants(T, cert):
        assert not verify_certificate(T, bad), kind


# -- engine ------------------------------------------------------------------


def test_engine_examples():
    T8 = build_combinatorial(CombinatorialSpec(8, "T", GF(2)))
    assert lower_bound_layer_reduction(T8)[0] == 15
    Tp8 = build_combinatorial(CombinatorialSpec(8, "Tprime", GF(2)))
    assert lower_bound_layer_reduction(Tp8)[0] == 14
    value, cert = lower_bound_layer_reduction(Tensor.zeros(QQ, (3, 3, 3)))
    assert value == 0 and verify_certificate(Tensor.zeros(QQ, (3, 3, 3)), cert)


@pytest.mark.parametrize("n", [1, 2, 3, 5, 7, 16, 31, 33])
@pytest.mark.parametrize("F", [GF(2), GF(5), QQ], ids=lambda F: F.literal)
def test_engine_exact_on_T(n, F):
    T = build_combinatorial(CombinatorialSpec(n, "T", F))
    value, cert = lower_bound_layer_reduction(T)
    assert value == combinatorial_t(n) == trivial_decomposition(T).rank
    assert verify_certificate(T, cert)
    assert best_flattening(T)[0] <= value


@pytest.mark.parametrize("n", [2, 3, 4, 6, 9, 17, 32, 40])
def test_engine_exact_on_Tprime(n):
    T = build_combinatorial(CombinatorialSpec(n, "Tprime", GF(3)))
    value, cert = lower_bound_layer_reduction(T)
    assert value == combinatorial_tprime(n) == T.nnz
    assert verify_certificate(T, cert)
    assert best_flattening(T)[0] <= value


def test_partial_flag_on_budget():
    T = build_group_tensor(AbelianGroupSpec((3,), 3), GF(2))
    value, cert = lower_bound_layer_reduction(T, strategy="exhaustive", state_budget=3)
    assert cert.partial
    assert verify_certificate(T, cert)
    assert value >= best_flattening(T)[0]


SOUNDNESS_CASES = [((2, 2, 2), GF(2)), ((2, 2, 2, 2), GF(2)), ((3, 3, 3), GF(2)), ((2, 2, 2), GF(3))]


@pytest.mark.parametrize("shape,F", SOUNDNESS_CASES, ids=[f"{s}-{F.literal}" for s, F in SOUNDNESS_CASES])
@given(data=st.data())
def test_certificate_soundness_against_oracle(shape, F, data):
    T = data.draw(tensors(F, shape))
    r = brute_force_rank(T)
    for strategy in ("greedy", "exhaustive"):
        value, cert = lower_bound_layer_reduction(T, strategy=strategy)
        assert value <= r
        assert value >= best_flattening(T)[0]
        assert verify_certificate(T, cert)


# -- formulas ----------------------------------------------------------------


def test_formula_examples():
    assert formula_bounds("elimination", q=2, n=2, k=1) == 3
    assert elimination_value(2, 2, 1) == Fraction(3)
    assert formula_bounds("repthy_upper", dims=(1, 1, 2), d=3) == 10
    assert repthy_cap(6, 3) == 14
    assert repthy_upper((1, 1, 2), 3) <= repthy_cap(6, 3)
    assert tightness_lower(4, 3) == 7
    assert formula_bounds("anyfield_upper", group_order=4, d=2) == 32
    assert formula_bounds("combinatorial_t", n=8) == 15
    assert formula_bounds("combinatorial_tprime", n=8) == 14
    assert formula_bounds("tightness_lower", n=2, d=3) == 3
    assert formula_bounds("interpolate_upper", n=4, d=3) == 10
    assert formula_bounds("abelian_upper", orders=(2, 3), d=3) == 28
    assert formula_bounds("transfer_upper", m=2, d=3, r=3) == 12
    assert formula_bounds("highorder", n=3, d=2) == 14
    assert formula_bounds("abelian_cap", group_order=3, d=4) == 27


def test_elimination_default_k():
    # k = ceil(log_q n); at n = 2^k over GF(2) the value is 3n - k - 2
    for n in (2, 4, 8, 16):
        k = n.bit_length() - 1
        assert elimination(2, n) == 3 * n - k - 2


def test_formula_errors():
    with pytest.raises(InvalidParams):
        formula_bounds("nope", n=1)
    with pytest.raises(InvalidParams):
        formula_bounds("combinatorial_tprime", n=1)
    with pytest.raises(InvalidParams):
        formula_bounds("highorder", n=2)
    assert set(FORMULAS) >= {"combinatorial_t", "elimination", "highorder"}


@given(G=st.integers(2, 60), d=st.integers(1, 12))
def test_anyfield_exponent_is_floored_exactly(G, d):
    from decimal import Decimal, localcontext

    lg = (G - 1).bit_length()
    v = anyfield_upper(G, d)
    assert v % lg ** (d - 1) == 0
    base = v // lg ** (d - 1)
    # G^(1 + lg d) rewritten as G * d^(lg G), evaluated at higher precision
    with localcontext() as ctx:
        ctx.prec = 80
        exact = Decimal(G) * (Decimal(d).ln() * Decimal(G).ln() / Decimal(2).ln()).exp()
    assert Decimal(base) <= exact + Decimal("1e-40") and exact < base + 1


def test_highorder_closed_form_relations():
    for n in range(2, 20):
        assert highorder(n, 1) == combinatorial_tprime(n)
        for d in (2, 3):
            assert highorder(n, d) == combinatorial_tprime(n**d) - n**d + n


# -- monotone ----------------------------------------------------------------


def test_monotone_examples():
    T4 = build_group_tensor(AbelianGroupSpec((4,), 3), QQ)
    assert monotone_rank_permutation(T4) == 16
    assert monotone_rank_permutation(Tensor(QQ, Matrix.identity(QQ, 5).data)) == 5
    assert monotone_rank_permutation(build_group_tensor(AbelianGroupSpec((2,), 3), QQ)) == 4
    with pytest.raises(FieldNotOrdered):
        monotone_rank_permutation(build_group_tensor(AbelianGroupSpec((2,), 3), GF(5)))
    with pytest.raises(NotPermutationTensor):
        monotone_rank_permutation(Tensor.zeros(QQ, (2, 2)))


def test_monotone_separation():
    T = build_group_tensor(AbelianGroupSpec((4,), 3), QQ)
    D = cyclic_group_decomposition(4, 3, QQ)
    assert D.rank <= 10 < 16 == monotone_rank_permutation(T)


# -- reports -----------------------------------------------------------------


def test_report_exact_on_families():
    for T in [build_combinatorial(CombinatorialSpec(8, "T", GF(2))), build_combinatorial(CombinatorialSpec(9, "Tprime", QQ))]:
        rep = rank_report(T)
        assert rep.lower == rep.upper == rep.exact
    spec = AbelianGroupSpec((3,), 3)
    T = build_group_tensor(spec, GF(7))
    rep = rank_report(T, [("character", character_decomposition(spec, GF(7)))])
    assert rep.lower == rep.upper == 3 and rep.upper_via == "character"


def test_report_uses_oracle_when_small():
    T = build_algebraic(AlgebraicSpec(2, Poly(2, (1, 1, 1)), 2))
    rep = rank_report(T)
    assert rep.exact == 3 and rep.lower <= rep.upper


def test_report_ignores_bad_decompositions():
    T = build_group_tensor(AbelianGroupSpec((3,), 2), GF(7))
    bogus = trivial_decomposition(Tensor(GF(7), np.eye(3, dtype=np.int64)))
    rep = rank_report(T, [("bogus", bogus)], use_oracle=False)
    assert rep.upper_via == "trivial"
    assert any("bogus" in n for n in rep.notes)


@given(data=st.data())
def test_report_lower_at_most_upper(data):
    F = data.draw(st.sampled_from([GF(2), GF(3), QQ]))
    T = data.draw(tensors(F, (2, 3, 2)))
    rep = rank_report(T, use_oracle=False)
    assert rep.lower <= rep.upper <= T.nnz
