"""
Corpus construction and the JSON-lines corpus file.

A corpus groups utterance tuples by conversation and assigns whole
conversations to the train or test split, so few-shot exemplars never
share a speaker pair with the evaluated transcripts.
"""

import json
import logging
import random
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Dict, Iterable, List, Sequence, Tuple, Union

from core import (
    CorpusFormatError, EmptyInput, ParseTree, MARKUP_LABEL, SPEAKER_TURN_LABEL, TRACE_LABEL,
    base_label, parse_trees, prune_traces, render,
)
from .tuples import UtteranceTuple, extract_tuple, split_utterance_id

logger = logging.getLogger(__name__)

TreeInput = Union[ParseTree, Tuple[str, ParseTree]]


class Split(Enum):
    TRAIN = "train"
    TEST = "test"


@dataclass
class CorpusConfig:
    """
    Corpus build options.

    Attributes:
        train_fraction: Share of conversations assigned to train
        seed: Seed of the conversation shuffle
        drop_none: Remove -NONE- trace terminals before extraction
        drop_markup: Remove -DFL- dysfluency markup terminals (\\[ \\+ \\] E_S ...)
        skip_speaker_turns: Skip CODE trees that only carry speaker-turn labels
        default_conversation: Conversation id for trees given without one
    """
    train_fraction: float = 0.5
    seed: int = 0
    drop_none: bool = True
    drop_markup: bool = True
    skip_speaker_turns: bool = True
    default_conversation: str = "conv"

    def __post_init__(self):
        if not 0.0 <= self.train_fraction <= 1.0:
            raise ValueError(f"train_fraction must be in [0, 1], got {self.train_fraction}")


@dataclass
class Corpus:
    """Utterance tuples with their conversation grouping and split"""
    utterances: List[UtteranceTuple]
    split: Dict[str, Split] = field(default_factory=dict)

    def __post_init__(self):
        self.conversations: Dict[str, List[UtteranceTuple]] = {}
        for utterance in self.utterances:
            self.conversations.setdefault(utterance.conversation_id, []).append(utterance)

    def __len__(self):
        return len(self.utterances)

    def conversation_ids(self, split: Split = None) -> List[str]:
        return [cid for cid in self.conversations if split is None or self.split.get(cid) is split]

    def utterances_in(self, split: Split) -> List[UtteranceTuple]:
        return [u for u in self.utterances if self.split.get(u.conversation_id) is split]

    @property
    def train(self) -> List[UtteranceTuple]:
        return self.utterances_in(Split.TRAIN)

    @property
    def test(self) -> List[UtteranceTuple]:
        return self.utterances_in(Split.TEST)


def split_conversations(conversation_ids: Sequence[str], train_fraction: float, seed: int) -> Dict[str, Split]:
    """
    Deterministic conversation-level split.

    Ids are sorted before shuffling so the result only depends on the id
    set and the seed. With two or more conversations and a positive
    fraction, each side receives at least one conversation.
    """
    ordered = sorted(set(conversation_ids))
    random.Random(seed).shuffle(ordered)
    n_train = int(len(ordered) * train_fraction)
    if len(ordered) > 1 and 0.0 < train_fraction < 1.0:
        n_train = min(max(n_train, 1), len(ordered) - 1)
    return {cid: (Split.TRAIN if i < n_train else Split.TEST) for i, cid in enumerate(ordered)}


def build_corpus(trees: Iterable[TreeInput], config: CorpusConfig = None) -> Corpus:
    """
    Extract one tuple per tree and split by conversation.

    Args:
        trees: Parse trees, optionally paired with their conversation id
        config: Build options

    Returns:
        Corpus with utterances in input order, ordinals counted per conversation
    """
    config = config or CorpusConfig()
    dropped = [label for label, on in ((TRACE_LABEL, config.drop_none), (MARKUP_LABEL, config.drop_markup)) if on]
    utterances = []
    ordinals: Dict[str, int] = {}
    seen = 0
    for item in trees:
        seen += 1
        conversation_id, tree = item if isinstance(item, tuple) else (config.default_conversation, item)
        if config.skip_speaker_turns and base_label(tree.label) == SPEAKER_TURN_LABEL:
            logger.debug("Skipping speaker-turn tree %d of %s", seen, conversation_id)
            continue
        if dropped:
            tree = prune_traces(tree, dropped)
            if tree is None:
                logger.warning("Skipping tree %d of %s: only trace or markup terminals", seen, conversation_id)
                continue
        ordinal = ordinals.get(conversation_id, 0)
        ordinals[conversation_id] = ordinal + 1
        utterances.append(extract_tuple(tree, conversation_id=conversation_id, ordinal=ordinal))

    if not utterances:
        raise EmptyInput("No utterances to build a corpus from")

    split = split_conversations(ordinals.keys(), config.train_fraction, config.seed)
    corpus = Corpus(utterances=utterances, split=split)
    logger.info("Built corpus: %d utterances, %d conversations (%d train / %d test)",
                len(corpus), len(corpus.conversations),
                len(corpus.conversation_ids(Split.TRAIN)), len(corpus.conversation_ids(Split.TEST)))
    return corpus


def to_record(utterance: UtteranceTuple, split: Split = None) -> dict:
    record = {
        "id": utterance.id,
        "conversation": utterance.conversation_id,
        "disfluent": [token.surface for token in utterance.disfluent],
        "tags": [tag.value for tag in utterance.tags],
        "fluent": [token.surface for token in utterance.fluent],
        "tree": render(utterance.tree),
    }
    if split is not None:
        record["split"] = split.value
    return record


def from_record(record: dict) -> Tuple[UtteranceTuple, Split]:
    """Rebuild a tuple from its record; the tree is authoritative and must agree with the rest."""
    try:
        utterance_id = record["id"]
        trees = parse_trees(record["tree"])
    except KeyError as missing:
        raise CorpusFormatError(f"Record lacks field {missing}") from None
    if len(trees) != 1:
        raise CorpusFormatError(f"{utterance_id}: expected one tree, found {len(trees)}")
    conversation_id, ordinal = split_utterance_id(utterance_id)
    conversation_id = record.get("conversation", conversation_id)
    utterance = extract_tuple(trees[0], conversation_id=conversation_id, ordinal=ordinal)

    expected = to_record(utterance)
    for key in ("disfluent", "tags", "fluent"):
        if key in record and record[key] != expected[key]:
            raise CorpusFormatError(f"{utterance_id}: field {key!r} disagrees with the tree")
    split = Split(record["split"]) if "split" in record else None
    return utterance, split


def save_corpus(corpus: Corpus, path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for utterance in corpus.utterances:
            record = to_record(utterance, corpus.split.get(utterance.conversation_id))
            f.write(json.dumps(record, ensure_ascii=False) + "\n")


def load_corpus(path: Union[str, Path]) -> Corpus:
    """
    Read a corpus file.

    Records without a split field are treated as test conversations.
    """
    utterances = []
    split: Dict[str, Split] = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as error:
                raise CorpusFormatError(f"{path}:{lineno}: {error.msg}") from None
            utterance, utterance_split = from_record(record)
            utterances.append(utterance)
            split[utterance.conversation_id] = utterance_split or Split.TEST
    if not utterances:
        raise EmptyInput(f"{path} holds no utterances")
    return Corpus(utterances=utterances, split=split)

