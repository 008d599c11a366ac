"""crkit: clean, disambiguate, and analyze cited references from Web of
Science and Scopus exports."""

from .analysis import (
    RpySpectrum,
    SpectrumRow,
    compute_median_deviation,
    remove_by_rpy,
    rpy_histogram,
    top_crs_for_rpy,
)
from .matching import (
    ClusterState,
    SimilarityConfig,
    UnknownCrId,
    apply_manual_decision,
    block_candidates,
    cluster_equivalent,
    merge_clusters,
    pair_similarity,
)
from .model import (
    CitedReference,
    CitingPublication,
    Dataset,
    MatchDecision,
    NormalizedKey,
    Origin,
    Provenance,
    SourceFile,
    Verdict,
    canonical_key,
    display_details,
)
from .scopus import MissingColumn, parse_scopus_cr, parse_scopus_csv, write_scopus_csv
from .store import (
    BadMagic,
    CorruptPayload,
    CreError,
    UnsupportedVersion,
    WorkingState,
    load_cre,
    new_state,
    save_cre,
)
from .wos import MalformedFile, MalformedRecord, parse_wos, parse_wos_cr, write_wos

__version__ = "0.1.0"
