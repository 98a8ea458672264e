"""Work-efficient parallel primitives with instrumented work/round counters.

Semisort and integer sort, randomized placement, hashing families, culled
balanced graph partitioning, MIS / (Delta+1)-coloring with boosting, tail
bound evaluators, and a seeded benchmark CLI (``semipar-bench``).
"""

from .bounds import (
    HypothesisViolated,
    bound_eval,
    chernoff_lower,
    chernoff_upper,
    geom_sum,
    mcdiarmid,
    weighted_geom,
)
from .graph import (
    CulledPartition,
    Graph,
    GraphView,
    InvariantViolation,
    ReorganizedGraph,
    cull_partition,
    edge_list,
    from_edges,
    generate,
    piece_edge_counts,
    read_csr,
    read_edge_list,
    reorganize,
    write_csr,
    write_edge_list,
)
from .graph_algos import (
    LocalGraph,
    PaletteDeficit,
    PaletteSet,
    UncoloredCutEndpoint,
    boosted_coloring,
    boosted_mis,
    extend_palettes,
    induced_subgraph,
    luby_mis,
    mis_extend_prune,
    palette_color,
    verify_coloring,
    verify_mis,
)
from .hashing import (
    TabulationHash,
    UniversalHash,
    detect_collision,
    tab_bucket,
    tab_hash,
    tab_hash_array,
    tab_new,
    universal_hash,
    universal_hash_array,
    universal_new,
)
from .meter import WorkMeter
from .placement import (
    InvalidInstance,
    PlacementInstance,
    PlacementResult,
    PlacementTimeout,
    default_round_cap,
    place,
)
from .records import (
    Records,
    group_counts,
    is_semisorted,
    read_records,
    same_multiset,
    write_records,
)
from .semisort import (
    KeyOutOfRange,
    RestartExceeded,
    SemisortParams,
    SemisortTrace,
    f_alloc,
    integer_sort,
    local_semisort,
    semisort,
)

__version__ = "0.1.0"

__all__ = [
    "HypothesisViolated", "bound_eval", "chernoff_lower", "chernoff_upper",
    "geom_sum", "mcdiarmid", "weighted_geom",
    "CulledPartition", "Graph", "GraphView", "InvariantViolation",
    "ReorganizedGraph", "cull_partition", "edge_list", "from_edges",
    "generate", "piece_edge_counts", "read_csr", "read_edge_list",
    "reorganize", "write_csr", "write_edge_list",
    "LocalGraph", "PaletteDeficit", "PaletteSet", "UncoloredCutEndpoint",
    "boosted_coloring", "boosted_mis", "extend_palettes", "induced_subgraph",
    "luby_mis", "mis_extend_prune", "palette_color", "verify_coloring",
    "verify_mis",
    "TabulationHash", "UniversalHash", "detect_collision", "tab_bucket",
    "tab_hash", "tab_hash_array", "tab_new", "universal_hash",
    "universal_hash_array", "universal_new",
    "WorkMeter",
    "InvalidInstance", "PlacementInstance", "PlacementResult",
    "PlacementTimeout", "default_round_cap", "place",
    "Records", "group_counts", "is_semisorted", "read_records",
    "same_multiset", "write_records",
    "KeyOutOfRange", "RestartExceeded", "SemisortParams", "SemisortTrace",
    "f_alloc", "integer_sort", "local_semisort", "semisort",
]
