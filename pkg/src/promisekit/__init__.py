"""Promise-graph modeling and static analysis.

Agents make directed, typed promises to one another; constraints over
attribute values ride along.  This package builds such graphs (in code or
from ``.pml`` text), closes equality constraints, and checks object-oriented
patterns — bundles as classes, inheritance as body refinement, behavioural
compatibility between parent and child — reporting anything broken.
"""
from .constraints import (
    closure,
    condition_satisfiable,
    entails,
    ExclusivityVerdict,
    mutually_exclusive,
    pairwise_exclusive,
    PairwiseReport,
    reduce,
    satisfiable,
    TermPartition,
)
from .errors import (
    BundleCycleError,
    DanglingReferenceError,
    DuplicateNameError,
    InvalidBodyError,
    PromiseModelError,
    TypeCollisionError,
    UnsatisfiableError,
)
from .model import (
    Agent,
    ALWAYS,
    Attribute,
    AutonomyFinding,
    build_graph,
    Bundle,
    CmpLiteral,
    Condition,
    EqConstraint,
    FlagLiteral,
    flatten_type,
    format_body,
    format_condition,
    format_constraint,
    format_term,
    give,
    GIVE,
    KIND_FLAG,
    KIND_NUM,
    KIND_SERVICE,
    KIND_STR,
    link,
    LINK_TYPE,
    NamedConst,
    NumConst,
    Parameter,
    Promise,
    PromiseBody,
    PromiseGraph,
    PromiseTypeDecl,
    StrConst,
    use,
    USE,
    validate_autonomy,
    Valuation,
)

__version__ = "0.1.0"

__all__ = [
    "Agent",
    "ALWAYS",
    "Attribute",
    "AutonomyFinding",
    "build_graph",
    "Bundle",
    "BundleCycleError",
    "closure",
    "CmpLiteral",
    "Condition",
    "condition_satisfiable",
    "DanglingReferenceError",
    "DuplicateNameError",
    "entails",
    "EqConstraint",
    "ExclusivityVerdict",
    "FlagLiteral",
    "flatten_type",
    "format_body",
    "format_condition",
    "format_constraint",
    "format_term",
    "give",
    "GIVE",
    "InvalidBodyError",
    "KIND_FLAG",
    "KIND_NUM",
    "KIND_SERVICE",
    "KIND_STR",
    "link",
    "LINK_TYPE",
    "mutually_exclusive",
    "NamedConst",
    "NumConst",
    "pairwise_exclusive",
    "PairwiseReport",
    "Parameter",
    "Promise",
    "PromiseBody",
    "PromiseGraph",
    "PromiseModelError",
    "PromiseTypeDecl",
    "reduce",
    "satisfiable",
    "StrConst",
    "TermPartition",
    "TypeCollisionError",
    "UnsatisfiableError",
    "use",
    "USE",
    "validate_autonomy",
    "Valuation",
    "__version__",
]
