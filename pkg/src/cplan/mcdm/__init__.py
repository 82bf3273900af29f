"""Multi-criteria decision engine: AHP priority vectors, capacities and the
Choquet integral, criteria interaction analysis, and alternative ranking."""

from .ahp import (
    CR_WARNING_LIMIT,
    RANDOM_INDEX,
    MatrixIssue,
    PairwiseMatrix,
    PriorityVector,
    consistency_ratio,
    consistent_matrix,
    principal_eigenvalue,
    priority_vector,
    priority_vector_geometric,
    require_valid,
    saaty_scale_violations,
    validate_pairwise,
)
from .capacity import (
    DEFAULT_CRITERIA,
    Capacity,
    CriteriaSet,
    MobiusRepresentation,
    interaction_index,
    mobius,
    shapley,
    zeta,
)
from .choquet import EvaluationTable, ScoredAlternative, choquet, rank_alternatives
from .fitting import DEFAULT_RESOLUTION, DEFAULT_TOLERANCE, CapacityFit, fit_capacity

__all__ = [
    "CR_WARNING_LIMIT",
    "RANDOM_INDEX",
    "MatrixIssue",
    "PairwiseMatrix",
    "PriorityVector",
    "consistency_ratio",
    "consistent_matrix",
    "principal_eigenvalue",
    "priority_vector",
    "priority_vector_geometric",
    "require_valid",
    "saaty_scale_violations",
    "validate_pairwise",
    "DEFAULT_CRITERIA",
    "Capacity",
    "CriteriaSet",
    "MobiusRepresentation",
    "interaction_index",
    "mobius",
    "shapley",
    "zeta",
    "EvaluationTable",
    "ScoredAlternative",
    "choquet",
    "rank_alternatives",
    "DEFAULT_RESOLUTION",
    "DEFAULT_TOLERANCE",
    "CapacityFit",
    "fit_capacity",
]
