"""Exact tensor-rank toolkit: explicit tensor families, certified lower
bounds by layer elimination, explicit decompositions and a brute-force rank
oracle over small finite fields."""

from .fields import GF, QQ, Poly, Scalar, parse_field
from .matrix import Matrix
from .tensor import SimpleTensor, Tensor

__all__ = ["GF", "QQ", "Matrix", "Poly", "Scalar", "SimpleTensor", "Tensor", "parse_field"]
