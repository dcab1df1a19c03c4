from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from tensorrank.constructions import symmetric_group
from tensorrank.decompositions import RepresentationData
from tensorrank.fields import GF, QQ
from tensorrank.matrix import Matrix
from tensorrank.tensor import SimpleTensor, Tensor

settings.register_profile(
    "default",
    max_examples=200,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("default")


def elements(F):
    """Strategy over raw field values."""
    if F.is_finite:
        return st.integers(0, F.order - 1).map(F.element)
    return st.builds(Fraction, st.integers(-9, 9), st.integers(1, 5))


def nonzero_elements(F):
    return elements(F).filter(lambda a: not F.is_zero(a))


@st.composite
def tensors(draw, F, shape):
    vals = draw(st.lists(elements(F), min_size=int(np.prod(shape)), max_size=int(np.prod(shape))))
    data = F.zeros(shape)
    data.reshape(-1)[:] = F.array(vals)
    return Tensor(F, data)


@st.composite
def simple_tensors(draw, F, shape):
    vecs = [F.array(draw(st.lists(elements(F), min_size=n, max_size=n))) for n in shape]
    return SimpleTensor(F, vecs)


@st.composite
def shapes(draw, max_order=3, max_side=3, min_order=1):
    d = draw(st.integers(min_order, max_order))
    return tuple(draw(st.integers(1, max_side)) for _ in range(d))


def s3_representations(F) -> RepresentationData:
    """Trivial, sign and standard representations of S_3.

    The standard one acts on ``{v : v0+v1+v2 = 0}`` in the basis
    ``e0-e1, e1-e2``; such a ``v`` has coordinates ``(v0, v0+v1)``.
    """
    group, perms = symmetric_group(3)

    def parity(p):
        return sum(1 for i in range(3) for j in range(i + 1, 3) if p[i] > p[j]) % 2

    def standard(p):
        cols = []
        for b in ((1, -1, 0), (0, 1, -1)):
            v = [0, 0, 0]
            for i, c in enumerate(b):
                v[p[i]] += c
            cols.append((v[0], v[0] + v[1]))
        return [[cols[0][0], cols[1][0]], [cols[0][1], cols[1][1]]]

    def mat(rows):
        return Matrix(F, F.array([[F.from_int(x) for x in r] for r in rows]))

    trivial = tuple(mat([[1]]) for _ in perms)
    sign = tuple(mat([[(-1) ** parity(p)]]) for p in perms)
    std = tuple(mat(standard(p)) for p in perms)
    return RepresentationData(group, F, (trivial, sign, std))


@pytest.fixture
def s3_gf7():
    return s3_representations(GF(7))


PROPERTY_FIELDS = [QQ, GF(2), GF(5)]


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_RESULTS: list[tuple[int, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, ok, text in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {number}: {text}")
