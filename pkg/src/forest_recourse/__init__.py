"""Minimum-cost recourse for decision-forest classifiers.

Given a trained forest and a feature vector, enumerates the feature-space
regions where the forest outputs a desired class and returns the cheapest
feature modifications under a user-specific per-feature cost model.
"""

from .cliques import EnumerationBudget, LeafGraph, count_cliques, enumerate_cliques
from .costs import (
    CostModel,
    GroupCost,
    Immutable,
    LinearAsymmetric,
    PiecewiseLinear,
    Quadratic,
    min_cost_in_group,
    min_cost_in_interval,
)
from .forest import Forest, ForestParams, Tree, cross_validate, train
from .geometry import Hyperrectangle
from .oracle import GridSpec, default_grid, oracle_min_cost
from .recourse import (
    RecourseEngine,
    RecoursePlan,
    RecourseQuery,
    RecourseResult,
    build_graph,
    explain_plan,
    find_recourse,
)
from .schema import AttributeDecl, FeatureSchema, check_consistency

__version__ = "0.1.0"

__all__ = [
    "AttributeDecl",
    "CostModel",
    "EnumerationBudget",
    "Forest",
    "ForestParams",
    "GridSpec",
    "GroupCost",
    "Hyperrectangle",
    "Immutable",
    "LeafGraph",
    "LinearAsymmetric",
    "PiecewiseLinear",
    "Quadratic",
    "RecourseEngine",
    "RecoursePlan",
    "RecourseQuery",
    "RecourseResult",
    "Tree",
    "build_graph",
    "check_consistency",
    "count_cliques",
    "cross_validate",
    "default_grid",
    "enumerate_cliques",
    "explain_plan",
    "find_recourse",
    "min_cost_in_group",
    "min_cost_in_interval",
    "oracle_min_cost",
    "train",
]
