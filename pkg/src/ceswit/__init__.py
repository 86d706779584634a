"""Completely entangled subspaces, product vectors of their complements and decomposable witnesses."""

from .linalg import DEFAULT_TOL, ToleranceConfig
from .subspaces import CesCertificate, SearchBudget, Subspace, is_ces, is_supported, make_subspace, max_ces_dim
from .constructions import (
    FamilySpec,
    counterexample_family,
    extend_ces,
    footnote_pair,
    general_family,
    symmetric_family,
)

__all__ = [
    "DEFAULT_TOL", "ToleranceConfig", "CesCertificate", "SearchBudget", "Subspace", "is_ces", "is_supported",
    "make_subspace", "max_ces_dim", "FamilySpec", "counterexample_family", "extend_ces", "footnote_pair",
    "general_family", "symmetric_family",
]

__version__ = "0.1.0"
