"""E-scores, Z-scores, failure modes and their aggregation."""

from .metrics import (
    METRIC_NAMES, Scope, FailureMode, ScoringOptions, EScores, ZScores, UnitScore,
    scope_mask, e_scores, z_scores, failure_mode, classify_failure, evaluate_unit, pool_units,
)
from .summary import MetricSummary, Summary, summarize, aggregate

__all__ = [
    'METRIC_NAMES',
    'Scope',
    'FailureMode',
    'ScoringOptions',
    'EScores',
    'ZScores',
    'UnitScore',
    'scope_mask',
    'e_scores',
    'z_scores',
    'failure_mode',
    'classify_failure',
    'evaluate_unit',
    'pool_units',
    'MetricSummary',
    'Summary',
    'summarize',
    'aggregate',
]
