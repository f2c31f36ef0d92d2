"""Temporal collaboration-network analysis with triad citation networks,
septa-partitioned author cohorts and graphlet discrepancy measures."""

from .graph_core import (
    Bipartite,
    CitationGraph,
    CollabGraph,
    KeyIndex,
    build_citation_graph,
    graph_intersection,
    project_collaboration,
)
from .ingest import (
    LiteratureGraph,
    generate_synthetic,
    load_cache,
    load_corpus,
    load_corpus_dir,
    save_cache,
    write_corpus,
)
from .temporal import (
    DEFAULT_EPOCHS,
    CollabNetwork,
    Epoch,
    SeptaPartition,
    TriadNetwork,
    build_epoch_collab,
    extract_triad,
    parse_epoch,
    septa_partition,
)
from .graphlet import transform, transform_raw, triangle_counts, spectrogram
from .discrepancy import (
    DiscrepancyConfig,
    DiscrepancyReport,
    network_eta,
    node_eta,
    pairwise_table,
    rdiff,
    side_eta,
)

__version__ = "0.1.0"

__all__ = [
    "Bipartite", "CitationGraph", "CollabGraph", "KeyIndex", "build_citation_graph",
    "graph_intersection", "project_collaboration",
    "LiteratureGraph", "generate_synthetic", "load_cache", "load_corpus", "load_corpus_dir",
    "save_cache", "write_corpus",
    "DEFAULT_EPOCHS", "CollabNetwork", "Epoch", "SeptaPartition", "TriadNetwork",
    "build_epoch_collab", "extract_triad", "parse_epoch", "septa_partition",
    "transform", "transform_raw", "triangle_counts", "spectrogram",
    "DiscrepancyConfig", "DiscrepancyReport", "network_eta", "node_eta", "pairwise_table",
    "rdiff", "side_eta",
]
