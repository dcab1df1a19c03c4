"""Certified lower bounds by iterated layer elimination.

Eliminating a set ``E`` of linearly independent layers along one axis lowers
the rank by at least ``|E|``, at the price of adding unknown multiples of the
eliminated layers to every other layer on that axis. The engine keeps track
of those unknowns explicitly: a *tainted* cell is one whose value depends on
the unknown multipliers. A cell becomes tainted when some eliminated layer is
nonzero or tainted there. Dropping slices (restriction) never raises rank, so
the reduction ends on a taint-free sub-box whose flattening rank is a valid
base value. The resulting bound holds for every choice of the multipliers.

Linear independence of ``E`` is checked on the cells that are untainted in
every layer of ``E``; independence there implies independence for every
value of the unknowns.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field as dc_field
from typing import Sequence

import numpy as np

from ..errors import PreconditionViolated, ShapeMismatch
from ..matrix import rank_of
from ..tensor import Tensor
from .flattening import normalize_split

DEFAULT_DEPTH = 2
DEFAULT_STATE_BUDGET = 20_000
ENUMERATE_BOX_LIMIT = 12


# ---------------------------------------------------------------------------
# Certificate data
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CertificateStep:
    """Eliminate ``eliminate`` along ``axis``, then keep only ``box``.

    All indices refer to the original tensor. ``box[j]`` lists the indices
    of axis ``j`` that survive the step.
    """

    axis: int
    eliminate: tuple[int, ...]
    box: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class CertificateBase:
    kind: str  # "flattening" or "oracle"
    value: int
    split: tuple[tuple[int, ...], tuple[int, ...]] | None = None


@dataclass(frozen=True)
class BoundCertificate:
    tensor_digest: str
    steps: tuple[CertificateStep, ...]
    base: CertificateBase
    claim: int
    partial: bool = False

    @property
    def eliminated(self) -> int:
        return sum(len(s.eliminate) for s in self.steps)


# ---------------------------------------------------------------------------
# Reduction state
# ---------------------------------------------------------------------------


class ReductionState:
    """Residual values, taint mask and surviving original indices per axis."""

    __slots__ = ("field", "values", "nonzero", "unknown", "index")

    def __init__(self, field, values, nonzero, unknown, index):
        self.field = field
        self.values = values
        self.nonzero = nonzero
        self.unknown = unknown
        self.index = tuple(np.asarray(ix, dtype=np.int64) for ix in index)

    @classmethod
    def initial(cls, T: Tensor) -> "ReductionState":
        return cls(
            T.field,
            T.data,
            T.data != 0,
            np.zeros(T.shape, dtype=bool),
            [np.arange(n) for n in T.shape],
        )

    @property
    def shape(self) -> tuple[int, ...]:
        return self.values.shape

    @property
    def order(self) -> int:
        return self.values.ndim

    def is_empty(self) -> bool:
        return self.values.size == 0

    def known_nonzero(self) -> np.ndarray:
        return self.nonzero & ~self.unknown

    def is_determined(self) -> bool:
        return not bool(self.unknown.any())

    def box(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(int(i) for i in ix) for ix in self.index)

    def key(self) -> tuple:
        return (tuple(ix.tobytes() for ix in self.index), self.unknown.tobytes())

    def local(self, axis: int, originals: Sequence[int]) -> list[int]:
        """Positions of original indices on ``axis``; raises if any was removed."""
        where = {int(v): k for k, v in enumerate(self.index[axis])}
        out = []
        for o in originals:
            if int(o) not in where:
                raise PreconditionViolated(f"index {o} on axis {axis} is no longer present")
            out.append(where[int(o)])
        if len(set(out)) != len(out):
            raise PreconditionViolated("repeated layer index")
        return out

    def _take(self, axis: int, positions) -> "ReductionState":
        positions = np.asarray(positions, dtype=np.int64)
        index = list(self.index)
        index[axis] = self.index[axis][positions]
        return ReductionState(
            self.field,
            np.take(self.values, positions, axis=axis),
            np.take(self.nonzero, positions, axis=axis),
            np.take(self.unknown, positions, axis=axis),
            index,
        )

    def independent(self, axis: int, positions: Sequence[int]) -> bool:
        if not positions:
            return True
        pos = list(positions)
        vals = np.moveaxis(np.take(self.values, pos, axis=axis), axis, 0).reshape(len(pos), -1)
        unk = np.moveaxis(np.take(self.unknown, pos, axis=axis), axis, 0).reshape(len(pos), -1)
        nz = np.moveaxis(np.take(self.nonzero, pos, axis=axis), axis, 0).reshape(len(pos), -1)
        cols = ~unk.any(axis=0) & nz.any(axis=0)
        if cols.sum() < len(pos):
            return False
        return rank_of(self.field, vals[:, cols]) == len(pos)

    def eliminate(self, axis: int, positions: Sequence[int], check: bool = True) -> "ReductionState":
        pos = sorted(set(int(p) for p in positions))
        if check and not self.independent(axis, pos):
            raise PreconditionViolated(f"layers {list(self.index[axis][pos])} on axis {axis} are not independent")
        touched = np.take(self.nonzero | self.unknown, pos, axis=axis).any(axis=axis)
        keep = np.setdiff1d(np.arange(self.shape[axis]), pos)
        out = self._take(axis, keep)
        out.unknown = out.unknown | np.expand_dims(touched, axis)
        return out

    def restrict(self, keeps: Sequence[np.ndarray | None]) -> "ReductionState":
        """Keep the given local positions on each axis (``None`` keeps all)."""
        out = self
        for a, k in enumerate(keeps):
            if k is None:
                continue
            k = np.asarray(k)
            if k.dtype == bool:
                if k.all():
                    continue
                k = np.flatnonzero(k)
            out = out._take(a, k)
        return out

    def restrict_original(self, box: Sequence[Sequence[int]]) -> "ReductionState":
        if len(box) != self.order:
            raise ShapeMismatch(f"box has {len(box)} axes, state has {self.order}")
        return self.restrict([sorted(self.local(a, b)) for a, b in enumerate(box)])

    def drop_dead_slices(self) -> "ReductionState":
        """Remove slices holding no untainted nonzero."""
        out = self
        while True:
            kn = out.known_nonzero()
            keeps = []
            changed = False
            for a in range(out.order):
                other = tuple(x for x in range(out.order) if x != a)
                keep = kn.any(axis=other) if other else kn
                keeps.append(keep)
                changed |= not bool(keep.all())
            if not changed:
                return out
            out = out.restrict(keeps)
            if out.is_empty():
                return out

    def flattening_rank(self, rows: Sequence[int]) -> int:
        if self.is_empty():
            return 0
        rows = list(rows)
        cols = [a for a in range(self.order) if a not in rows]
        m = math.prod(self.shape[a] for a in rows)
        mat = np.transpose(self.values, rows + cols).reshape(m, -1)
        # the cached mask trims the unfolding before any field arithmetic
        mask = np.transpose(self.nonzero, rows + cols).reshape(m, -1)
        return rank_of(self.field, mat[mask.any(axis=1)][:, mask.any(axis=0)])

    def best_flattening(self) -> tuple[int, tuple[int, ...]]:
        best, split = 0, (0,)
        if self.is_empty():
            return best, split
        for a in range(self.order):
            v = self.flattening_rank([a])
            if v > best:
                best, split = v, (a,)
        return best, split

    def to_tensor(self) -> Tensor:
        return Tensor._wrap(self.field, self.values)


# ---------------------------------------------------------------------------
# Strict single move
# ---------------------------------------------------------------------------


def eliminate_and_restrict(T: Tensor, axis: int, layer_set: Sequence[int], box: Sequence[Sequence[int] | None]) -> Tensor:
    """Drop independent layers that vanish on ``box`` and restrict to ``box``.

    ``box`` gives index sets for the axes other than ``axis`` (either ``d-1``
    entries, or ``d`` entries with the one at ``axis`` ignored). The result
    keeps the non-eliminated layers along ``axis``; its rank plus
    ``len(layer_set)`` bounds ``rank(T)`` from below. If every layer is
    eliminated an empty-layer residual cannot be represented, so ``None`` is
    returned.
    """
    d = T.order
    box = list(box)
    if len(box) == d - 1:
        box.insert(axis, None)
    if len(box) != d:
        raise ShapeMismatch(f"box needs {d - 1} index sets")
    state = ReductionState.initial(T)
    pos = state.local(axis, layer_set)
    if not state.independent(axis, pos):
        raise PreconditionViolated("eliminated layers are not linearly independent")
    keeps = [None if a == axis or b is None else state.local(a, b) for a, b in enumerate(box)]
    for p in pos:
        sl = state.restrict([k if a != axis else [p] for a, k in enumerate(keeps)])
        if sl.nonzero.any():
            raise PreconditionViolated(f"layer {layer_set[pos.index(p)]} does not vanish on the box")
    out = state.eliminate(axis, pos, check=False)
    out.unknown[...] = False
    out = out.restrict(keeps)
    if out.is_empty():
        return None
    return out.to_tensor()


# ---------------------------------------------------------------------------
# Search
# ---------------------------------------------------------------------------


@dataclass
class _Trace:
    """Accumulates certificate steps while a state evolves."""

    steps: list = dc_field(default_factory=list)
    gain: int = 0

    def copy(self) -> "_Trace":
        return _Trace(list(self.steps), self.gain)

    def eliminated(self, axis: int, originals: Sequence[int], state: ReductionState):
        self.steps.append(CertificateStep(axis, tuple(sorted(int(o) for o in originals)), state.box()))
        self.gain += len(originals)

    def restricted(self, state: ReductionState):
        if self.steps:
            last = self.steps[-1]
            self.steps[-1] = CertificateStep(last.axis, last.eliminate, state.box())
        else:
            self.steps.append(CertificateStep(0, (), state.box()))


def _elim(state: ReductionState, trace: _Trace, axis: int, positions: Sequence[int]) -> ReductionState:
    originals = [int(state.index[axis][p]) for p in positions]
    new = state.eliminate(axis, positions, check=False)
    trace.eliminated(axis, originals, new)
    return new


def _drop(state: ReductionState, trace: _Trace) -> ReductionState:
    new = state.drop_dead_slices()
    if new.shape != state.shape:
        trace.restricted(new)
    return new


def peel(state: ReductionState, trace: _Trace) -> ReductionState:
    """Eliminate layers with a single untainted nonzero whose new taint would
    not cover any untainted nonzero of another layer.

    All such layers on one axis go in a single step: each one's nonzero lies
    where no other layer has a known nonzero, so the set is independent.
    """
    state = _drop(state, trace)
    while not state.is_empty():
        kn = state.known_nonzero()
        affected = state.nonzero | state.unknown
        moved = False
        for a in range(state.order):
            other = tuple(x for x in range(state.order) if x != a)
            per_layer = kn.sum(axis=other) if other else kn.astype(np.int64)
            fibre = kn.sum(axis=a)
            chosen = []
            for l in np.flatnonzero(per_layer == 1):
                mine = np.take(kn, l, axis=a)
                touched = np.take(affected, l, axis=a)
                if not np.any((fibre - mine)[touched]):
                    chosen.append(int(l))
            if chosen:
                state = _elim(state, trace, a, chosen)
                moved = True
                break
        if not moved:
            break
        state = _drop(state, trace)
    return state


def clear_taint(state: ReductionState, trace: _Trace) -> ReductionState:
    """Greedy cover: drop the slice with most tainted cells (fewest untainted
    nonzeros on ties) until no taint is left."""
    while not state.is_empty() and not state.is_determined():
        best = None
        kn = state.known_nonzero()
        for a in range(state.order):
            other = tuple(x for x in range(state.order) if x != a)
            unk = state.unknown.sum(axis=other) if other else state.unknown.astype(np.int64)
            cost = kn.sum(axis=other) if other else kn.astype(np.int64)
            for l in np.flatnonzero(unk):
                score = (int(unk[l]), -int(cost[l]))
                if best is None or score > best[0]:
                    best = (score, a, int(l))
        _, a, l = best
        keep = np.ones(state.shape[a], dtype=bool)
        keep[l] = False
        state = state.restrict([keep if x == a else None for x in range(state.order)])
        trace.restricted(state)
        state = _drop(state, trace)
    return state


def _finish(state: ReductionState, trace: _Trace) -> tuple[int, _Trace, CertificateBase]:
    trace = trace.copy()
    state = clear_taint(state, trace)
    value, split = state.best_flattening()
    rows = tuple(split)
    cols = tuple(a for a in range(state.order) if a not in rows)
    return trace.gain + value, trace, CertificateBase("flattening", value, (rows, cols))


def maximal_independent(state: ReductionState, axis: int) -> list[int]:
    """Greedy maximal independent set of layers, smallest support first."""
    other = tuple(x for x in range(state.order) if x != axis)
    kn = state.known_nonzero()
    support = (state.nonzero | state.unknown).sum(axis=other) if other else state.nonzero.astype(np.int64)
    has = kn.any(axis=other) if other else kn
    order = sorted((int(support[l]), l) for l in range(state.shape[axis]) if has[l])
    chosen: list[int] = []
    for _, l in order:
        if state.independent(axis, chosen + [l]):
            chosen.append(l)
    return chosen


class _Budget:
    def __init__(self, limit: int):
        self.limit = limit
        self.used = 0
        self.exhausted = False

    def tick(self) -> bool:
        self.used += 1
        if self.used > self.limit:
            self.exhausted = True
        return not self.exhausted


def _greedy(state: ReductionState, trace: _Trace, depth: int, budget: _Budget):
    trace = trace.copy()
    state = peel(state, trace)
    best = _finish(state, trace)
    if depth <= 0 or state.is_empty():
        return best
    for a in range(state.order):
        if not budget.tick():
            break
        chosen = maximal_independent(state, a)
        if not chosen:
            continue
        branch = trace.copy()
        nxt = _elim(state, branch, a, chosen)
        cand = _greedy(nxt, branch, depth - 1, budget)
        if cand[0] > best[0]:
            best = cand
    return best


def _taint_free_boxes(state: ReductionState, budget: "_Budget"):
    """Maximal taint-free boxes (as local keep-lists), found by enumerating
    index subsets on all axes but the last. Each subset choice costs one
    budget unit."""
    if state.is_determined():
        yield [None] * state.order
        return
    head = [range(n) for n in state.shape[:-1]]
    subsets_per_axis = [
        [c for k in range(1, len(r) + 1) for c in itertools.combinations(r, k)] for r in head
    ]
    for choice in itertools.product(*subsets_per_axis):
        if not budget.tick():
            return
        sub = state.unknown[np.ix_(*[list(c) for c in choice], np.arange(state.shape[-1]))]
        last = ~sub.reshape(-1, state.shape[-1]).any(axis=0)
        if last.any():
            yield [list(c) for c in choice] + [np.flatnonzero(last)]


def _exhaustive_base(state: ReductionState, trace: _Trace, budget: "_Budget"):
    if state.is_empty():
        return trace.gain, trace.copy(), CertificateBase("flattening", 0, ((0,), tuple(range(1, state.order))))
    # the greedy cover is always available, including when the budget runs out
    best = _finish(state, trace)
    if sum(state.shape) > ENUMERATE_BOX_LIMIT:
        return best
    for keeps in _taint_free_boxes(state, budget):
        sub = state.restrict(keeps)
        value, split = sub.best_flattening()
        if trace.gain + value > best[0]:
            t = trace.copy()
            if sub.shape != state.shape:
                t.restricted(sub)
            rows = tuple(split)
            cols = tuple(a for a in range(sub.order) if a not in rows)
            best = (trace.gain + value, t, CertificateBase("flattening", value, (rows, cols)))
    return best


def _exhaustive(state: ReductionState, trace: _Trace, budget: _Budget, memo: dict):
    key = state.key()
    if key in memo:
        return memo[key]
    if not budget.tick():
        return None
    best = _exhaustive_base(state, trace, budget)
    for a in range(state.order):
        other = tuple(x for x in range(state.order) if x != a)
        kn = state.known_nonzero()
        live = [l for l in range(state.shape[a]) if (kn.any(axis=other)[l] if other else kn[l])]
        for k in range(1, len(live) + 1):
            for subset in itertools.combinations(live, k):
                # every subset tried counts against the budget
                if not budget.tick() or not state.independent(a, list(subset)):
                    if budget.exhausted:
                        break
                    continue
                branch = trace.copy()
                nxt = _elim(state, branch, a, list(subset))
                cand = _exhaustive(nxt, branch, budget, memo)
                if cand is not None and cand[0] > best[0]:
                    best = cand
                if budget.exhausted:
                    break
            if budget.exhausted:
                break
    memo[key] = None if budget.exhausted else best
    return best


def lower_bound_layer_reduction(
    T: Tensor,
    strategy: str = "greedy",
    depth_budget: int = DEFAULT_DEPTH,
    state_budget: int = DEFAULT_STATE_BUDGET,
) -> tuple[int, BoundCertificate]:
    """Best certified lower bound found by the chosen search.

    ``greedy`` peels single-support layers, then tries maximal independent
    eliminations per axis up to ``depth_budget`` levels. ``exhaustive``
    additionally searches every independent layer subset on every axis and
    every maximal taint-free base box; it is meant for tensors with a few
    dozen cells. Either way the plain flattening bound of ``T`` is a
    candidate, so the result is never below it. If ``state_budget`` runs out
    the best certificate so far is returned with ``partial=True``.
    """
    if strategy not in ("greedy", "exhaustive"):
        raise ValueError(f"unknown strategy {strategy!r}")
    start = ReductionState.initial(T)
    budget = _Budget(state_budget)
    candidates = [_finish(start, _Trace())]
    candidates.append(_greedy(start, _Trace(), depth_budget, budget))
    if strategy == "exhaustive":
        cand = _exhaustive(start, _Trace(), budget, {})
        if cand is not None:
            candidates.append(cand)
    best = max(candidates, key=lambda c: c[0])
    value, trace, base = best
    cert = BoundCertificate(T.digest(), tuple(trace.steps), base, value, partial=budget.exhausted)
    return value, cert


# ---------------------------------------------------------------------------
# Replay
# ---------------------------------------------------------------------------


def certificate_problem(T: Tensor, cert: BoundCertificate) -> str | None:
    """Replay ``cert`` on ``T``; return a description of the first failure."""
    if cert.tensor_digest != T.digest():
        return "tensor digest does not match"
    state = ReductionState.initial(T)
    total = 0
    for n, step in enumerate(cert.steps, 1):
        if not 0 <= step.axis < T.order:
            return f"step {n}: axis {step.axis} out of range"
        if len(step.box) != T.order:
            return f"step {n}: box has {len(step.box)} axes"
        try:
            pos = state.local(step.axis, step.eliminate)
        except PreconditionViolated as exc:
            return f"step {n}: {exc}"
        if pos:
            if not state.independent(step.axis, pos):
                return f"step {n}: eliminated layers are not linearly independent"
            state = state.eliminate(step.axis, pos, check=False)
            total += len(pos)
        try:
            state = state.restrict_original(step.box)
        except PreconditionViolated as exc:
            return f"step {n}: box {exc}"
    if not state.is_determined():
        bad = tuple(int(state.index[a][i]) for a, i in enumerate(np.argwhere(state.unknown)[0]))
        return f"base: residual cell {bad} depends on eliminated layers (an eliminated layer does not vanish on the box)"
    base = cert.base
    if base.kind == "flattening":
        try:
            rows, _ = normalize_split(T.order, base.split)
        except Exception as exc:  # malformed split in a file
            return f"base: {exc}"
        value = state.flattening_rank(rows)
    elif base.kind == "oracle":
        from .oracle import brute_force_rank

        if state.is_empty():
            value = 0
        else:
            try:
                value = brute_force_rank(state.to_tensor(), max_rank=base.value)
            except Exception as exc:
                return f"base: oracle failed ({exc})"
            if value is None:
                value = base.value + 1
    else:
        return f"base: unknown kind {base.kind!r}"
    if value != base.value:
        return f"base: recomputed value {value} != recorded {base.value}"
    if cert.claim != total + base.value:
        return f"claim {cert.claim} != eliminated {total} + base {base.value}"
    return None


def verify_certificate(T: Tensor, cert: BoundCertificate) -> bool:
    return certificate_problem(T, cert) is None
