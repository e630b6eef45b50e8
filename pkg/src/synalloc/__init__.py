"""synalloc: similarity-driven allocation of vector streams to partitions.

Each partition keeps an incrementally maintained micro-cluster summary of its
resident vectors; incoming vectors are routed to the partition whose summary
they resemble most under an ensemble of abundance dissimilarity metrics.
"""

from .data import (
    DIMENSION_COLUMNS,
    Dataset,
    ScenarioSpec,
    SyntheticInit,
    load_air_quality,
    random_split,
    synth_stream,
    synthetic_partitions,
)
from .engine import AllocationEngine, AllocationRecord, AuditReport, EngineConfig
from .errors import (
    ConfigError,
    DataError,
    DatasetFormatError,
    EmptyClusterError,
    EmptyDatasetError,
    SynallocError,
    VectorError,
)
from .harness import (
    RunReport,
    ScenarioRun,
    SummaryRow,
    execute_scenario,
    partition_stats,
    run_scenario,
    summary_table,
    write_report_json,
    write_summary_csv,
)
from .similarity import (
    EnsembleScore,
    Metric,
    WeightVector,
    all_dissims,
    compute_weights,
    ensemble_similarity,
    jaccard_dissim,
    kulczynski_dissim,
    opinion_pool,
    sorensen_dissim,
)
from .synopsis import CFTree, ClusterFeature, Synopsis, extract_synopsis

__version__ = "0.1.0"

__all__ = [
    "AllocationEngine",
    "AllocationRecord",
    "AuditReport",
    "CFTree",
    "ClusterFeature",
    "ConfigError",
    "DIMENSION_COLUMNS",
    "DataError",
    "Dataset",
    "DatasetFormatError",
    "EmptyClusterError",
    "EmptyDatasetError",
    "EngineConfig",
    "EnsembleScore",
    "Metric",
    "RunReport",
    "ScenarioRun",
    "ScenarioSpec",
    "SummaryRow",
    "SynallocError",
    "Synopsis",
    "SyntheticInit",
    "VectorError",
    "WeightVector",
    "all_dissims",
    "compute_weights",
    "ensemble_similarity",
    "execute_scenario",
    "extract_synopsis",
    "jaccard_dissim",
    "kulczynski_dissim",
    "load_air_quality",
    "opinion_pool",
    "partition_stats",
    "random_split",
    "run_scenario",
    "sorensen_dissim",
    "summary_table",
    "synth_stream",
    "synthetic_partitions",
    "write_report_json",
    "write_summary_csv",
]
