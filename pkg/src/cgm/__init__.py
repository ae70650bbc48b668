"""cgm: morphism-indexed effect monads.

Computations carry an index drawn from a category's morphisms, so only
protocol-respecting effect sequences compose.  The package bundles the
index-category toolkit, the value-level monad interface with a sampling
law harness, built-in instances, translations between monad flavours,
a small graded metalanguage, and a probabilistic Hoare-triple verifier.
"""

from .core import (
    CatGradedMonad,
    GeneralisedUnit,
    GradedComputation,
    Homomorphism,
    LawFailure,
    LawReport,
    TwoCatGradedMonad,
    approximate,
    bind,
    check_laws,
    fmap,
    gen_unit,
    mult,
    unit,
)
from .indexcat import (
    IndexCategory,
    Morphism,
    ObjectId,
    TwoCategory,
    WideSubcategory,
    compose,
    discretise,
    free_category,
    identity,
    indiscretise,
    monoid_to_category,
    pair_completion,
    pomonoid_to_2category,
)
from .values import Value

__all__ = [
    "CatGradedMonad", "GeneralisedUnit", "GradedComputation", "Homomorphism",
    "IndexCategory", "LawFailure", "LawReport", "Morphism", "ObjectId",
    "TwoCatGradedMonad", "TwoCategory", "Value", "WideSubcategory",
    "approximate", "bind", "check_laws", "compose", "discretise", "fmap",
    "free_category", "gen_unit", "identity", "indiscretise",
    "monoid_to_category", "mult", "pair_completion", "pomonoid_to_2category",
    "unit",
]
