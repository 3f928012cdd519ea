"""Metrics and the system-comparison experiment harness."""
from .experiment import (
    REFERENCE_RESULTS,
    ExperimentResult,
    SystemSpec,
    aggregate_by_configuration,
    render_comparison_table,
    run_experiment,
)
from .metrics import (
    ConfusionCounts,
    DimensionMetrics,
    MetricsReport,
    compute_metrics,
    score_dimension,
)

__all__ = [
    "REFERENCE_RESULTS",
    "ConfusionCounts",
    "DimensionMetrics",
    "ExperimentResult",
    "MetricsReport",
    "SystemSpec",
    "aggregate_by_configuration",
    "compute_metrics",
    "render_comparison_table",
    "run_experiment",
    "score_dimension",
]
