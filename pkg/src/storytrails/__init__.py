"""Coherent storyline extraction between documents.

Builds a sparse semantic coherence graph over document embeddings and
extracts up to k interior-disjoint storylines that maximize the minimum
pairwise coherence between a chosen source and target document.
"""

from .coherence import CoherenceProvider, angular_similarity, base_coherence, topic_similarity
from .corpus import (
    Corpus,
    CorpusError,
    Document,
    corpus_from_arrays,
    load_corpus,
    read_matrix,
    validate_alignment,
    write_documents,
    write_matrix,
)
from .graph import (
    ConstraintSet,
    MaxSpanningTree,
    SparseCoherenceGraph,
    build_max_spanning_tree,
    centrality_weights,
    closeness_centralities,
    connectivity_report,
    edge_mask_from_ids,
    load_graph,
    max_spanning_tree_of_matrix,
    save_graph,
    sparsify,
)
from .metrics import (
    DtwAlignment,
    EvalRow,
    EvaluationReport,
    dtw_align,
    dtw_similarity,
    ndtw_distance,
    random_baseline,
    shortest_simple_path,
    storyline_metrics,
)
from .pathfind import (
    NarrativeTrail,
    NoPathError,
    SameEndpointsError,
    Storyline,
    extract_trail,
    geometric_mean,
    reduce_redundancy,
    storyline_from_nodes,
    widest_path,
)

__version__ = "0.1.0"

__all__ = [
    "CoherenceProvider",
    "ConstraintSet",
    "Corpus",
    "CorpusError",
    "Document",
    "DtwAlignment",
    "EvalRow",
    "EvaluationReport",
    "MaxSpanningTree",
    "NarrativeTrail",
    "NoPathError",
    "SameEndpointsError",
    "SparseCoherenceGraph",
    "Storyline",
    "angular_similarity",
    "base_coherence",
    "build_max_spanning_tree",
    "centrality_weights",
    "closeness_centralities",
    "connectivity_report",
    "corpus_from_arrays",
    "dtw_align",
    "dtw_similarity",
    "edge_mask_from_ids",
    "extract_trail",
    "geometric_mean",
    "load_corpus",
    "load_graph",
    "max_spanning_tree_of_matrix",
    "ndtw_distance",
    "random_baseline",
    "read_matrix",
    "reduce_redundancy",
    "save_graph",
    "shortest_simple_path",
    "sparsify",
    "storyline_from_nodes",
    "storyline_metrics",
    "topic_similarity",
    "validate_alignment",
    "widest_path",
    "write_documents",
    "write_matrix",
]
