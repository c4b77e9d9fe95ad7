"""Overlapping community detection (DEMON) with incremental updates for growing graphs."""
from .compare import SimilarityReport, compare_snapshots, similarity
from .ego import EgoCache, EgoMinusEgo, affected_egos, apply_edge_to_cache, extract_ego_minus_ego
from .engine import (
    AnalysisState,
    Config,
    StepReport,
    apply_event,
    check_coherence,
    provenance_retire,
    run_batch,
)
from .errors import CoherenceError
from .graph import EdgeEvent, Graph, load_edge_list
from .labelprop import (
    LabelState,
    LocalCommunities,
    incremental_label_update,
    labels_to_communities,
    propagate_labels,
)
from .merge import (
    Community,
    CommunityPool,
    merge_into_pool,
    naive_merge,
    overlap_fraction,
    rebuild_tables,
    should_merge,
)

__version__ = "0.1.0"
