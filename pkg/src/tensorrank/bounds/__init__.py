"""Rank lower bounds, closed-form calculators, the exhaustive oracle and
bound reconciliation."""

from .flattening import best_flattening, flattening_lower_bound
from .formulas import FORMULAS, formula_bounds
from .layer_reduction import (
    BoundCertificate,
    CertificateBase,
    CertificateStep,
    ReductionState,
    certificate_problem,
    eliminate_and_restrict,
    lower_bound_layer_reduction,
    verify_certificate,
)
from .monotone import monotone_rank_permutation
from .oracle import brute_force_rank
from .report import RankReport, rank_report

__all__ = [
    "BoundCertificate",
    "CertificateBase",
    "CertificateStep",
    "FORMULAS",
    "RankReport",
    "ReductionState",
    "best_flattening",
    "brute_force_rank",
    "certificate_problem",
    "eliminate_and_restrict",
    "flattening_lower_bound",
    "formula_bounds",
    "lower_bound_layer_reduction",
    "monotone_rank_permutation",
    "rank_report",
    "verify_certificate",
]
