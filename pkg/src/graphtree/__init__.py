"""Hierarchically partitioned graph storage with connectivity queries
and center-piece subgraph summarization."""

from .core import (
    EdgeRef,
    EdgeListParseError,
    Graph,
    GraphError,
    generate_synthetic,
    load_edge_list,
    save_edge_list,
)
from .partition import (
    AssignmentError,
    HierarchySpec,
    PartitionAssignment,
    load_assignment,
    partition_recursive,
    save_assignment,
)
from .tree import (
    AmbiguousLabelError,
    GraphTree,
    LeafSuperNodeRecord,
    ManifestError,
    NestedSuperNodesError,
    SuperEdgeRecord,
    SuperNodeRecord,
    TreeStats,
    UnknownRecordError,
    build,
    expected_complete_height,
    superedges_per_record,
)
from .ceps import (
    CenterPiece,
    CepsError,
    CepsParams,
    GoodnessScores,
    KeyPath,
    UnreachableDestinationError,
    combine,
    extract,
    goodness_scores,
    iratio,
    normalize_columns,
    rwr,
    single_key_path,
)

__version__ = "0.1.0"

__all__ = [
    "AmbiguousLabelError",
    "AssignmentError",
    "CenterPiece",
    "CepsError",
    "CepsParams",
    "EdgeListParseError",
    "EdgeRef",
    "GoodnessScores",
    "Graph",
    "GraphError",
    "GraphTree",
    "HierarchySpec",
    "KeyPath",
    "LeafSuperNodeRecord",
    "ManifestError",
    "NestedSuperNodesError",
    "PartitionAssignment",
    "SuperEdgeRecord",
    "SuperNodeRecord",
    "TreeStats",
    "UnknownRecordError",
    "UnreachableDestinationError",
    "build",
    "combine",
    "expected_complete_height",
    "extract",
    "generate_synthetic",
    "goodness_scores",
    "iratio",
    "load_assignment",
    "load_edge_list",
    "normalize_columns",
    "partition_recursive",
    "rwr",
    "save_assignment",
    "save_edge_list",
    "single_key_path",
    "superedges_per_record",
    "__version__",
]
