"""Monotone rank of permutation tensors."""

from __future__ import annotations

from ..errors import FieldNotOrdered, NotPermutationTensor
from ..tensor import Tensor, is_permutation_tensor


def monotone_rank_permutation(T: Tensor) -> int:
    """Monotone rank of a permutation tensor over an ordered field.

    A nonnegative simple term can only cover cells where the tensor is
    nonzero, and two distinct ones of a permutation tensor never share a
    simple tensor's support. So each term covers at most one 1 and the
    monotone rank is the number of ones.
    """
    if not T.field.is_ordered:
        raise FieldNotOrdered(f"{T.field} is not ordered")
    if not is_permutation_tensor(T):
        raise NotPermutationTensor("tensor is not a permutation tensor")
    return T.nnz
