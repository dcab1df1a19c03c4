"""Matrix-rank lower bounds from unfoldings."""

from __future__ import annotations

import itertools
from typing import Sequence

from ..errors import InvalidParams
from ..matrix import rank_of
from ..tensor import Tensor


def normalize_split(order: int, axis_split) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Accept ``rows`` or ``(rows, cols)`` and return both sides, sorted."""
    if isinstance(axis_split, tuple) and len(axis_split) == 2 and all(isinstance(s, (tuple, list, set, frozenset)) for s in axis_split):
        rows, cols = (tuple(sorted(int(a) for a in s)) for s in axis_split)
    else:
        rows = tuple(sorted(int(a) for a in axis_split))
        cols = tuple(a for a in range(order) if a not in rows)
    if sorted(rows + cols) != list(range(order)):
        raise InvalidParams(f"{rows}|{cols} is not a bipartition of {order} axes")
    if order > 1 and (not rows or not cols):
        raise InvalidParams("both sides of the split must be nonempty")
    return rows, cols


def flattening_lower_bound(T: Tensor, axis_split) -> int:
    """Rank of the unfolding with rows indexed by the axes on one side."""
    rows, _ = normalize_split(T.order, axis_split)
    if T.size == 0:
        return 0
    return rank_of(T.field, T.flattening(rows))


def single_axis_splits(order: int) -> list[tuple[int, ...]]:
    return [(a,) for a in range(order)]


def all_splits(order: int) -> list[tuple[int, ...]]:
    """One representative per unordered bipartition (the side holding axis 0)."""
    out = []
    rest = list(range(1, order))
    for k in range(0, order - 1 if order > 1 else 1):
        for extra in itertools.combinations(rest, k):
            out.append((0,) + extra)
    return out


def best_flattening(T: Tensor, splits: Sequence[Sequence[int]] | None = None) -> tuple[int, tuple[int, ...]]:
    """Largest flattening rank over ``splits`` (default: single-axis splits)."""
    splits = single_axis_splits(T.order) if splits is None else splits
    best, best_split = -1, tuple(splits[0])
    for s in splits:
        v = flattening_lower_bound(T, s)
        if v > best:
            best, best_split = v, tuple(s)
    return best, best_split
