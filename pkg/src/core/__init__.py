"""Treebank primitives: parse trees, tokens, disfluency node classes."""

from .errors import (
    DresError, TreebankError, UnbalancedParens, EmptyTree, TerminalWithChildren,
    UnlabeledNode, EmptyInput, InvalidRate, LengthMismatch, InsufficientExemplars,
    CorpusFormatError, ConfigurationError, BackendError, TransientBackendError,
    BackendUnreachable, CacheCorruption,
)
from .tree import (
    NodeClass, Token, ParseTree, base_label, classify_node, is_punct_label, make_leaf,
    yield_tokens, render, reindex, prune_traces,
    PUNCT_LABELS, TRACE_LABEL, MARKUP_LABEL, SPEAKER_TURN_LABEL, DISFLUENT_CLASSES,
)
from .reader import parse_trees, read_treebank

__all__ = [
    'DresError',
    'TreebankError',
    'UnbalancedParens',
    'EmptyTree',
    'TerminalWithChildren',
    'UnlabeledNode',
    'EmptyInput',
    'InvalidRate',
    'LengthMismatch',
    'InsufficientExemplars',
    'CorpusFormatError',
    'ConfigurationError',
    'BackendError',
    'TransientBackendError',
    'BackendUnreachable',
    'CacheCorruption',
    'NodeClass',
    'Token',
    'ParseTree',
    'base_label',
    'classify_node',
    'is_punct_label',
    'make_leaf',
    'yield_tokens',
    'render',
    'reindex',
    'prune_traces',
    'PUNCT_LABELS',
    'TRACE_LABEL',
    'MARKUP_LABEL',
    'SPEAKER_TURN_LABEL',
    'DISFLUENT_CLASSES',
    'parse_trees',
    'read_treebank',
]
