"""Reconcile lower and upper bounds for one tensor."""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Sequence

from ..decompositions import Decomposition, first_mismatch
from ..errors import ValidationFailed
from ..tensor import Tensor
from .flattening import best_flattening
from .layer_reduction import BoundCertificate, lower_bound_layer_reduction
from .oracle import brute_force_rank, oracle_feasible

ORACLE_REPORT_BUDGET = 1 << 20


@dataclass
class RankReport:
    tensor_id: str
    lower: int
    lower_via: str
    upper: int
    upper_via: str
    exact: int | None = None
    partial: bool = False
    certificate: BoundCertificate | None = None
    notes: list[str] = dc_field(default_factory=list)

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValidationFailed(f"lower bound {self.lower} exceeds upper bound {self.upper}")

    def lines(self) -> list[str]:
        out = [f"lower {self.lower} via {self.lower_via}", f"upper {self.upper} via {self.upper_via}"]
        if self.exact is not None:
            out.append(f"exact {self.exact}")
        if self.partial:
            out.append("partial")
        out.extend(f"note {n}" for n in self.notes)
        return out


def rank_report(
    T: Tensor,
    decompositions: Sequence[tuple[str, Decomposition]] = (),
    strategy: str = "greedy",
    use_oracle: bool | None = None,
) -> RankReport:
    """Best certified lower bound against the smallest verified decomposition.

    The trivial decomposition is always a candidate. Decompositions that fail
    verification are ignored (and noted). The oracle is consulted only for
    finite fields with at most ``ORACLE_REPORT_BUDGET`` tensors of this shape
    unless ``use_oracle`` forces the choice.
    """
    notes: list[str] = []
    lr, cert = lower_bound_layer_reduction(T, strategy=strategy)
    fl, _ = best_flattening(T)
    lower, lower_via = (lr, "layer-reduction") if lr >= fl else (fl, "flatten")

    best_upper, upper_via = T.nnz, "trivial"
    for name, D in decompositions:
        if D.field != T.field or D.shape != T.shape:
            notes.append(f"{name} decomposition does not match the tensor's field or shape")
            continue
        if first_mismatch(T, D) is not None:
            notes.append(f"{name} decomposition failed verification")
            continue
        if D.rank < best_upper:
            best_upper, upper_via = D.rank, name

    exact = lower if lower == best_upper else None
    if use_oracle is None:
        use_oracle = oracle_feasible(T, ORACLE_REPORT_BUDGET)
    if exact is None and use_oracle:
        r = brute_force_rank(T)
        exact = r
        if r is not None and r > lower:
            lower, lower_via = r, "oracle"
        if r is not None and r < best_upper:
            best_upper, upper_via = r, "oracle"
    return RankReport(T.digest()[:16], lower, lower_via, best_upper, upper_via, exact, cert.partial, cert, notes)
