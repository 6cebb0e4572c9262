"""Gestalt alignment of model output against the gold disfluent transcript."""

from .gestalt import (
    Alignment, DeletionLabels, normalize_token, match_key, is_punctuation_only,
    tokenize_hypothesis, align, deletion_labels,
)

__all__ = [
    'Alignment',
    'DeletionLabels',
    'normalize_token',
    'match_key',
    'is_punctuation_only',
    'tokenize_hypothesis',
    'align',
    'deletion_labels',
]
