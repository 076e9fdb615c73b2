"""Exact growth and diameter computations for Cayley and Schreier coset graphs."""

__version__ = "0.1.0"

from .analysis import (
    DistributionFit,
    QuasiPolynomial,
    StatsSummary,
    describe,
    gaussian_fit,
    gumbel_fit,
    quasipoly_eval,
    quasipoly_fit,
)
from .bfs import (
    Antipodes,
    BitsetAllocator,
    GrowthResult,
    MemoryBudgetExceeded,
    adjacency_matrix,
    antipodes,
    distance,
    growth,
    growth_bitmask,
    growth_hash,
)
from .catalog import FAMILIES, DefinitionPendingError, UnknownFamilyError, catalog
from .codecs import CombinadicCodec, LehmerCodec, MixedRadixCodec, SignedLehmerCodec
from .graph import (
    CosetVector,
    FullPermutation,
    GraphDef,
    MixedRadix,
    SignedPermutation,
    apply,
    inverse_closure,
    make_graph,
    neighbors,
)
from .perm import (
    GeneratorSet,
    compose,
    conjugacy_class_reps,
    cycle_type,
    format_cycles,
    generator_set,
    inverse,
    parse_cycles,
)
from .estimators import GaussianGrowthFit, GrowthEstimator, QuasiPolynomialRegressor
from .matgroup import (
    RootChoice,
    abelian_graph,
    abelian_growth,
    heisenberg_graph,
    unitriangular_graph,
)
from .pathfind import Path, UnknownLabelError, beam_search, random_walks, verify_path
from .search import (
    SearchRecord,
    dot_export,
    koltsov3,
    max_diameter_search,
    sheveleva2,
    support_graph,
    whiskers_classify,
)

__all__ = [
    "abelian_graph",
    "abelian_growth",
    "adjacency_matrix",
    "Antipodes",
    "antipodes",
    "apply",
    "beam_search",
    "BitsetAllocator",
    "catalog",
    "CombinadicCodec",
    "compose",
    "conjugacy_class_reps",
    "CosetVector",
    "cycle_type",
    "DefinitionPendingError",
    "describe",
    "distance",
    "DistributionFit",
    "dot_export",
    "FAMILIES",
    "format_cycles",
    "FullPermutation",
    "gaussian_fit",
    "GaussianGrowthFit",
    "generator_set",
    "GeneratorSet",
    "GraphDef",
    "growth",
    "growth_bitmask",
    "growth_hash",
    "GrowthEstimator",
    "GrowthResult",
    "gumbel_fit",
    "heisenberg_graph",
    "inverse",
    "inverse_closure",
    "koltsov3",
    "LehmerCodec",
    "make_graph",
    "max_diameter_search",
    "MemoryBudgetExceeded",
    "MixedRadix",
    "MixedRadixCodec",
    "neighbors",
    "parse_cycles",
    "Path",
    "quasipoly_eval",
    "quasipoly_fit",
    "QuasiPolynomial",
    "QuasiPolynomialRegressor",
    "random_walks",
    "RootChoice",
    "SearchRecord",
    "sheveleva2",
    "SignedLehmerCodec",
    "SignedPermutation",
    "StatsSummary",
    "support_graph",
    "unitriangular_graph",
    "UnknownFamilyError",
    "UnknownLabelError",
    "verify_path",
    "whiskers_classify",
]
