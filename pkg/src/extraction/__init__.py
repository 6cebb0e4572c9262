"""Dataset construction: utterance tuples, corpora, synthetic disfluencies."""

from .tuples import TokenTag, UtteranceTuple, TAG_FOR_CLASS, extract_tuple, tag_tokens, make_utterance_id
from .corpus import (
    Split, Corpus, CorpusConfig, build_corpus, split_conversations,
    to_record, from_record, save_corpus, load_corpus,
)
from .synth import (
    DisfluencyRates, SentenceGenerator, inject_disfluencies, is_recoverable, synthesize_corpus,
)

__all__ = [
    'TokenTag',
    'UtteranceTuple',
    'TAG_FOR_CLASS',
    'extract_tuple',
    'tag_tokens',
    'make_utterance_id',
    'Split',
    'Corpus',
    'CorpusConfig',
    'build_corpus',
    'split_conversations',
    'to_record',
    'from_record',
    'save_corpus',
    'load_corpus',
    'DisfluencyRates',
    'SentenceGenerator',
    'inject_disfluencies',
    'is_recoverable',
    'synthesize_corpus',
]
