"""Explicit sums of simple tensors: construction, composition, field transfer
and exact verification.

All per-term scalars are folded into the first vector of the term.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .constructions import AbelianGroupSpec, FiniteGroup
from .errors import (
    CharacteristicDividesOrder,
    EntriesNotInBaseField,
    FieldMismatch,
    FieldNotOrdered,
    FieldTooSmall,
    OrderMismatch,
    ShapeMismatch,
    ValidationFailed,
)
from .fields import ExtensionField, Field, PrimeField, RationalField, primitive_root_of_unity
from .matrix import Matrix
from .tensor import SimpleTensor, Tensor, check_shape


@dataclass(frozen=True)
class Decomposition:
    field: Field
    shape: tuple[int, ...]
    terms: tuple[SimpleTensor, ...]

    def __post_init__(self):
        shape = check_shape(self.shape)
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "terms", tuple(self.terms))
        for t in self.terms:
            if t.field != self.field:
                raise FieldMismatch(f"term over {t.field} in a decomposition over {self.field}")
            if t.shape != shape:
                raise ShapeMismatch(f"term shape {t.shape} vs {shape}")

    @property
    def rank(self) -> int:
        return len(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def factor_matrices(self) -> list[np.ndarray]:
        """Per-axis ``n_j x r`` arrays whose columns are the term vectors."""
        F = self.field
        out = []
        for j, n in enumerate(self.shape):
            if self.terms:
                out.append(np.stack([t.vectors[j] for t in self.terms], axis=1))
            else:
                out.append(F.zeros((n, 0)))
        return out

    def to_tensor(self) -> Tensor:
        F = self.field
        if not self.terms:
            return Tensor.zeros(F, self.shape)
        mats = self.factor_matrices()
        # Khatri-Rao product of all but the last axis, then one matrix product
        kr = mats[0]
        for M in mats[1:-1]:
            kr = F.mul_arr(kr[:, None, :], M[None, :, :]).reshape(-1, kr.shape[1])
        if len(mats) == 1:
            ones = F.array([[F.one] * len(self.terms)]).T
            flat = F.matmul(kr, ones)
        else:
            flat = F.matmul(kr, np.ascontiguousarray(mats[-1].T))
        return Tensor._wrap(F, flat.reshape(self.shape))

    def __eq__(self, other):
        return (
            isinstance(other, Decomposition)
            and self.field == other.field
            and self.shape == other.shape
            and len(self.terms) == len(other.terms)
            and all(a == b for a, b in zip(self.terms, other.terms))
        )


def first_mismatch(T: Tensor, D: Decomposition) -> tuple[int, ...] | None:
    """First cell (row-major) where ``D`` disagrees with ``T``, or ``None``."""
    if T.field != D.field:
        raise FieldMismatch(f"{T.field} vs {D.field}")
    if T.shape != D.shape:
        raise ShapeMismatch(f"{T.shape} vs {D.shape}")
    diff = np.argwhere(D.to_tensor().data != T.data)
    if diff.size == 0:
        return None
    return tuple(int(i) for i in diff[0])


def verify(T: Tensor, D: Decomposition) -> bool:
    """Exact entrywise check that the terms of ``D`` sum to ``T``."""
    return first_mismatch(T, D) is None


def _unit(F: Field, n: int, i: int, value=None) -> np.ndarray:
    v = F.zeros(n)
    v[i] = F.one if value is None else value
    return v


def trivial_decomposition(T: Tensor) -> Decomposition:
    """One indicator term per nonzero cell."""
    F = T.field
    terms = []
    for idx, v in T.nonzeros():
        vecs = [_unit(F, n, i) for n, i in zip(T.shape, idx)]
        vecs[0] = _unit(F, T.shape[0], idx[0], v)
        terms.append(SimpleTensor(F, vecs))
    return Decomposition(F, T.shape, terms)


def _scaled(F: Field, vectors: list[np.ndarray], c) -> list[np.ndarray]:
    out = list(vectors)
    out[0] = F.mul_arr(out[0], c)
    return out


# ---------------------------------------------------------------------------
# Interpolation
# ---------------------------------------------------------------------------


def _check_field_size(F: Field, needed: int):
    if F.is_finite and F.order < needed:
        raise FieldTooSmall(f"{F} has {F.order} elements, need at least {needed}")


def vandermonde_inverse(F: Field, count: int) -> Matrix:
    """Inverse of ``V[l][m] = alpha_l^m`` at the first ``count`` canonical elements."""
    _check_field_size(F, count)
    nodes = [F.element(l) for l in range(count)]
    V = Matrix(F, [[F.pow(a, m) for m in range(count)] for a in nodes])
    return V.inverse()


def interpolation_decomposition(n: int, d: int, coeffs: Sequence, field: Field) -> Decomposition:
    """Decomposition of ``T(i_1..i_d) = coeffs[i_1 + ... + i_d]`` on ``[n]^d``.

    Term ``l`` is the power vector of node ``alpha_l`` on every axis, weighted
    by ``sum_m coeffs[m] * inv(V)[m, l]``; terms of weight zero are dropped.
    For ``d = 1`` the coefficient vector itself is the single term.
    """
    F = field
    count = d * (n - 1) + 1
    if len(coeffs) != count:
        raise ValueError(f"need {count} coefficients, got {len(coeffs)}")
    c = F.array(list(coeffs))
    if d == 1:
        # a vector is its own single term
        terms = [SimpleTensor(F, [c])] if np.any(c != 0) else []
        return Decomposition(F, (n,), terms)
    _check_field_size(F, count)
    A = vandermonde_inverse(F, count).data
    weights = F.matmul(c.reshape(1, -1), A).reshape(-1)
    terms = []
    for l in range(count):
        w = weights[l]
        if w == 0:
            continue
        alpha = F.element(l)
        pw = F.array([F.pow(alpha, i) for i in range(n)])
        terms.append(SimpleTensor(F, _scaled(F, [pw] * d, w)))
    return Decomposition(F, (n,) * d, terms)


def cyclic_group_decomposition(n: int, d: int, field: Field) -> Decomposition:
    """At most ``d(n-1)+1`` terms for the cyclic group tensor of ``Z_n``."""
    F = field
    coeffs = [F.one if m % n == 0 else F.zero for m in range(d * (n - 1) + 1)]
    return interpolation_decomposition(n, d, coeffs, F)


# ---------------------------------------------------------------------------
# Characters and representations
# ---------------------------------------------------------------------------


def _inverse_of_order(F: Field, order: int):
    if F.characteristic and order % F.characteristic == 0:
        raise CharacteristicDividesOrder(f"characteristic {F.characteristic} divides {order}")
    return F.inv(F.from_int(order))


def character_table(spec: AbelianGroupSpec, field: Field) -> np.ndarray:
    """``|G| x |G|`` array ``X[k, g] = chi_k(g)``; both indices mixed radix."""
    F = field
    G = spec.group_order
    _inverse_of_order(F, G)
    roots = [primitive_root_of_unity(F, n) for n in spec.orders]
    powers = [[F.pow(w, e) for e in range(n)] for w, n in zip(roots, spec.orders)]
    table = F.zeros((G, G))
    elems = [spec.element(i) for i in range(G)]
    for k, kd in enumerate(elems):
        for g, gd in enumerate(elems):
            acc = F.one
            for pw, n, a, b in zip(powers, spec.orders, kd, gd):
                acc = F.mul(acc, pw[(a * b) % n])
            table[k, g] = acc
    return table


def character_decomposition(spec: AbelianGroupSpec, field: Field) -> Decomposition:
    """Exactly ``|G|`` terms, one per character."""
    F = field
    inv = _inverse_of_order(F, spec.group_order)
    X = character_table(spec, F)
    d = spec.d
    terms = [SimpleTensor(F, _scaled(F, [row] * d, inv)) for row in X]
    return Decomposition(F, (spec.group_order,) * d, terms)


@dataclass(frozen=True)
class RepresentationData:
    """Representations ``reps[i][g]`` (one square matrix per group element)."""

    group: FiniteGroup
    field: Field
    reps: tuple[tuple[Matrix, ...], ...]

    def __post_init__(self):
        reps = tuple(tuple(r) for r in self.reps)
        object.__setattr__(self, "reps", reps)
        for r in reps:
            if len(r) != self.group.order:
                raise ShapeMismatch("every representation needs one matrix per group element")
            D = r[0].rows
            for M in r:
                if M.field != self.field:
                    raise FieldMismatch(f"matrix over {M.field}, expected {self.field}")
                if M.shape != (D, D):
                    raise ShapeMismatch("representation matrices must share one square size")

    @property
    def group_order(self) -> int:
        return self.group.order

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(r[0].rows for r in self.reps)

    @property
    def labels(self) -> tuple[str, ...]:
        return self.group.labels


def check_representation(rep: RepresentationData) -> list[str]:
    """Human-readable list of violated identities (empty when valid)."""
    F = rep.field
    n = rep.group_order
    problems = []
    if sum(D * D for D in rep.dims) != n:
        problems.append(f"sum of squared dimensions {sum(D * D for D in rep.dims)} != group order {n}")
    try:
        inv_n = _inverse_of_order(F, n)
    except CharacteristicDividesOrder as exc:
        problems.append(str(exc))
        inv_n = None
    for i, r in enumerate(rep.reps):
        bad = next(
            ((g, h) for g in range(n) for h in range(n) if r[rep.group.mul(g, h)] != r[g] @ r[h]),
            None,
        )
        if bad is not None:
            problems.append(f"representation {i} is not multiplicative at (g, h) = {bad}")
    if inv_n is not None:
        for g in range(n):
            acc = F.zero
            for r in rep.reps:
                trace = F.zero
                for k in range(r[g].rows):
                    trace = F.add(trace, r[g].data[k, k])
                acc = F.add(acc, F.mul(F.from_int(r[g].rows), trace))
            acc = F.mul(acc, inv_n)
            want = F.one if g == rep.group.identity else F.zero
            if acc != want:
                problems.append(f"weighted character sum at g={g} is {F.format(acc)}, expected {F.format(want)}")
                break
    return problems


def validate_representation(rep: RepresentationData) -> bool:
    return not check_representation(rep)


def representation_decomposition(rep: RepresentationData, d: int) -> Decomposition:
    """``sum_i dim(rho_i)^d`` terms from the trace expansion of each representation."""
    problems = check_representation(rep)
    if problems:
        raise ValidationFailed("; ".join(problems))
    F = rep.field
    n = rep.group_order
    inv_n = _inverse_of_order(F, n)
    terms = []
    for r in rep.reps:
        D = r[0].rows
        stack = np.stack([M.data for M in r])  # (g, row, col)
        scale = F.mul(F.from_int(D), inv_n)
        for chain in itertools.product(range(D), repeat=d):
            vecs = [stack[:, chain[j], chain[(j + 1) % d]] for j in range(d)]
            terms.append(SimpleTensor(F, _scaled(F, vecs, scale)))
    return Decomposition(F, (n,) * d, terms)


# ---------------------------------------------------------------------------
# Composition
# ---------------------------------------------------------------------------


def product_decomposition(DT: Decomposition, DS: Decomposition) -> Decomposition:
    """Decomposition of the tensor product: per-axis Kronecker products of vectors."""
    if len(DT.shape) != len(DS.shape):
        raise OrderMismatch(f"orders {len(DT.shape)} and {len(DS.shape)}")
    if DT.field != DS.field:
        raise FieldMismatch(f"{DT.field} vs {DS.field}")
    F = DT.field
    shape = tuple(a * b for a, b in zip(DT.shape, DS.shape))
    terms = []
    for t in DT.terms:
        for s in DS.terms:
            vecs = [F.mul_arr(a[:, None], b[None, :]).reshape(-1) for a, b in zip(t.vectors, s.vectors)]
            terms.append(SimpleTensor(F, vecs))
    return Decomposition(F, shape, terms)


def abelian_decomposition(spec: AbelianGroupSpec, field: Field) -> Decomposition:
    """Product of the cyclic decompositions of each factor."""
    needed = max(spec.d * (n - 1) + 1 for n in spec.orders)
    _check_field_size(field, needed)
    D = None
    for n in spec.orders:
        Dn = cyclic_group_decomposition(n, spec.d, field)
        D = Dn if D is None else product_decomposition(D, Dn)
    return D


# ---------------------------------------------------------------------------
# Field transfer
# ---------------------------------------------------------------------------


def multiplication_table(K: ExtensionField) -> np.ndarray:
    """``(q, m, m)`` array: entry ``[a, r, c]`` is coefficient ``r`` of ``a * x^c``."""
    q, m = K.order, K.degree
    codes = np.arange(q, dtype=np.int64)
    out = np.zeros((q, m, m), dtype=np.int64)
    for c in range(m):
        basis = K.from_coeffs((0,) * c + (1,))
        prod = K.mul_arr(codes, np.full(q, basis, dtype=np.int64))
        for r in range(m):
            out[:, r, c] = (prod // K.p**r) % K.p
    return out


def field_transfer(D: Decomposition, target: Field | None = None) -> Decomposition:
    """Rewrite a decomposition over ``GF(p)[x]/(f)`` as one over ``GF(p)``.

    Each term expands into ``m^(d-1)`` terms by writing every product of field
    elements as a product of multiplication matrices and reading off the
    constant coefficient. Terms with a zero vector are dropped.
    """
    K = D.field
    if not isinstance(K, ExtensionField):
        if target is not None and target != K:
            raise FieldMismatch(f"cannot transfer from {K} to {target}")
        return D
    base = K.base_field
    if target is not None and target != base:
        raise FieldMismatch(f"{target} is not the prime subfield of {K}")
    whole = D.to_tensor().data
    if np.any(whole >= K.p):
        bad = tuple(int(i) for i in np.argwhere(whole >= K.p)[0])
        raise EntriesNotInBaseField(f"entry at {bad} is not in GF({K.p})")
    mu = multiplication_table(K)
    m = K.degree
    d = len(D.shape)
    terms = []
    for t in D.terms:
        for inner in itertools.product(range(m), repeat=d - 1):
            chain = (0,) + inner + (0,)
            vecs = [mu[t.vectors[j], chain[j], chain[j + 1]] for j in range(d)]
            if any(not np.any(v) for v in vecs):
                continue
            terms.append(SimpleTensor(base, vecs))
    return Decomposition(base, D.shape, terms)


def is_monotone(D: Decomposition) -> bool:
    """Every vector entry of every term is nonnegative (ordered fields only)."""
    if not D.field.is_ordered:
        raise FieldNotOrdered(f"{D.field} is not ordered")
    return all(bool(np.all(v >= 0)) for t in D.terms for v in t.vectors)


def transfer_target(K: Field) -> PrimeField | RationalField:
    return K.base_field if isinstance(K, ExtensionField) else K
