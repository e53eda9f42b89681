"""Symbolic combinatorics of Merge: labelled binary trees, workspaces as forests,
the forest bialgebra, Merge operators with Minimal Search, n-ary counting,
Dyson-Schwinger recursions and externalization to planar trees."""

__version__ = "0.1.0"

from .algebra import (
    GradedTensor, LinComb, Tensor, antipode, coproduct, coproduct_by_arity, counit,
    graded_coproduct, leaf_coproduct, product,
)
from .errors import (
    AddressError, ConfigurationError, DomainError, InvariantViolation, MergeHopfError, ParseError,
    PreconditionError,
)
from .merge import (
    FormKind, MergeForm, WeightedWorkspace, apply_merge_case, b_plus, classify_form,
    constraint_check, delta_match, derive, internal_merge, merge_eps, merge_op,
    minimal_search_limit, rho, size_delta,
)
from .syntax import (
    EMPTY, UNIT, Counts, Forest, SynTree, accessible_terms, counts, enumerate_forests,
    enumerate_trees, forest_quotient, leaf, merge, node, parse_forest, parse_tree, quotient,
)

__all__ = [
    "AddressError", "ConfigurationError", "Counts", "DomainError", "EMPTY", "Forest", "FormKind",
    "GradedTensor", "InvariantViolation", "LinComb", "MergeForm", "MergeHopfError", "ParseError",
    "PreconditionError", "SynTree", "Tensor", "UNIT", "WeightedWorkspace", "accessible_terms",
    "antipode", "apply_merge_case", "b_plus", "classify_form", "constraint_check", "coproduct",
    "coproduct_by_arity", "counit", "counts", "delta_match", "derive", "enumerate_forests",
    "enumerate_trees", "forest_quotient", "graded_coproduct", "internal_merge", "leaf",
    "leaf_coproduct", "merge", "merge_eps", "merge_op", "minimal_search_limit", "node",
    "parse_forest", "parse_tree", "product", "quotient", "rho", "size_delta",
]
