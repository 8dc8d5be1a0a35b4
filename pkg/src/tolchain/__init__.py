"""Worst-case and Monte Carlo analysis of 1D dimensional tolerance chains.

The package models a chain of toleranced dimensions whose signed sum is a
functional condition, and answers three questions about it: what interval the
condition can reach (worst case), how it is distributed under per-dimension
process scatter (Monte Carlo), and how to adjust the tolerances until the
scrap rate meets a target (synthesis). A CLI exposes the same operations on
JSON chain files.
"""

__version__ = "0.1.0"

from .model import (
    ChainSyntaxError,
    ChainValidationError,
    ConformityStatus,
    ConformityVerdict,
    DimensionSpec,
    FunctionalCondition,
    IntervalResult,
    ToleranceChain,
    chain_document,
    it_of,
    parse_chain,
    serialize_chain,
)
from .montecarlo import (
    DistributionParams,
    SampleBatch,
    ScrapReport,
    SigmaRule,
    analytic_scrap,
    batch_summary,
    derive_distribution,
    histogram_csv,
    propagate_analytic,
    recompute_fc,
    sample_chain,
    samples_csv,
    scrap_rate,
    statistical_interval,
)
from .synthesis import (
    IterationRecord,
    SynthesisAction,
    SynthesisConfig,
    SynthesisReport,
    respecify,
    scaled_deviations,
    synthesis_report_document,
    synthesize,
)
from .worstcase import (
    InfeasibleToleranceError,
    it_budget,
    solve_unknown,
    verify_worst_case,
    worst_case,
)

__all__ = [
    "ChainSyntaxError",
    "ChainValidationError",
    "ConformityStatus",
    "ConformityVerdict",
    "DimensionSpec",
    "DistributionParams",
    "FunctionalCondition",
    "InfeasibleToleranceError",
    "IntervalResult",
    "IterationRecord",
    "SampleBatch",
    "ScrapReport",
    "SigmaRule",
    "SynthesisAction",
    "SynthesisConfig",
    "SynthesisReport",
    "ToleranceChain",
    "__version__",
    "analytic_scrap",
    "batch_summary",
    "chain_document",
    "derive_distribution",
    "histogram_csv",
    "it_budget",
    "it_of",
    "parse_chain",
    "propagate_analytic",
    "recompute_fc",
    "respecify",
    "sample_chain",
    "samples_csv",
    "scaled_deviations",
    "scrap_rate",
    "serialize_chain",
    "solve_unknown",
    "statistical_interval",
    "synthesis_report_document",
    "synthesize",
    "verify_worst_case",
    "worst_case",
]
