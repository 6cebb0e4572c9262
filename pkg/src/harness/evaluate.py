"""
Scoring of stored model outputs.

Each unit is aligned and scored on its own; the units of a conversation
are then pooled so that one conversation is one sample under both
conditions. Failed units are left out and counted.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Sequence

from core import CorpusFormatError
from alignment import tokenize_hypothesis
from extraction import Corpus, UtteranceTuple
from scoring import ScoringOptions, UnitScore, evaluate_unit, pool_units
from .runner import ModelOutput

logger = logging.getLogger(__name__)


@dataclass
class ScoredCell:
    """
    Attributes:
        segments: Scores of every successful unit, in output order
        conversations: Pooled scores per conversation, in output order
        excluded: Failed units left out of scoring
    """
    segments: List[UnitScore]
    conversations: List[UnitScore]
    excluded: int = 0


def score_output(output: ModelOutput, utterances: Sequence[UtteranceTuple],
                 options: ScoringOptions = None) -> UnitScore:
    tokens = [token for u in utterances for token in u.disfluent]
    tags = [tag for u in utterances for tag in u.tags]
    trees = [u.tree for u in utterances]
    return evaluate_unit(output.unit_id, tokens, tags, trees, tokenize_hypothesis(output.transcript), options)


def score_outputs(corpus: Corpus, outputs: Sequence[ModelOutput], options: ScoringOptions = None) -> ScoredCell:
    """
    Score a cell's outputs against the corpus they were produced from.

    Raises CorpusFormatError when an output names an utterance the corpus
    does not hold.
    """
    options = options or ScoringOptions()
    by_id: Dict[str, UtteranceTuple] = {u.id: u for u in corpus.utterances}
    segments: List[UnitScore] = []
    grouped: Dict[str, List[UnitScore]] = {}
    excluded = 0
    for output in outputs:
        if not output.ok:
            excluded += 1
            continue
        missing = [uid for uid in output.utterance_ids if uid not in by_id]
        if missing:
            raise CorpusFormatError(f"Output {output.unit_id} references unknown utterances: {missing[:3]}")
        score = score_output(output, [by_id[uid] for uid in output.utterance_ids], options)
        segments.append(score)
        grouped.setdefault(output.conversation_id, []).append(score)
    conversations = [pool_units(cid, scores, options) for cid, scores in grouped.items()]
    if excluded:
        logger.warning("%d failed units excluded from scoring", excluded)
    return ScoredCell(segments=segments, conversations=conversations, excluded=excluded)
