"""Field-normalized citation indicators and counterfactual country-exclusion
analytics on publication corpora."""

__version__ = "0.1.0"

from .cohorts import CohortStats, compute_cohorts, count_obtained, top10_fraction
from .corpus import (
    CitationEdge,
    CorpusConfig,
    CorpusSnapshot,
    CorpusValidationError,
    PublicationRecord,
    build_snapshot,
    load_edges,
    load_publications,
    read_corpus,
)
from .counterfactual import (
    DeltaReport,
    WorldPair,
    build_delta_report,
    build_stack,
    build_world_pair,
    delta_expected_counts,
    delta_impact,
    delta_obtained,
    exclude_country,
    mean_effect,
    ratio_of_ratios,
)
from .extrapolation import CrossingPrediction, TrendFit, fit_trend, predict_crossing
from .indicators import CountryYearIndicators, NcsScore, mncs, ncs_arrays, pp_top10
from .synthgen import CountrySpec, ScenarioConfig, generate_files, preset

__all__ = [
    "CitationEdge", "CohortStats", "CorpusConfig", "CorpusSnapshot",
    "CorpusValidationError", "CountryYearIndicators", "CountrySpec",
    "CrossingPrediction", "DeltaReport", "NcsScore", "PublicationRecord",
    "ScenarioConfig", "TrendFit", "WorldPair", "build_delta_report",
    "build_snapshot", "build_stack", "build_world_pair", "compute_cohorts",
    "count_obtained", "delta_expected_counts", "delta_impact",
    "delta_obtained", "exclude_country", "fit_trend", "generate_files",
    "load_edges", "load_publications", "mean_effect", "mncs", "ncs_arrays",
    "pp_top10", "predict_crossing", "preset", "ratio_of_ratios",
    "read_corpus", "top10_fraction",
]
