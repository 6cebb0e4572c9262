"""
Evaluation units: what a model sees in one request.

Under the full condition a unit is a whole conversation; under the
segmented condition it is a run of consecutive utterances.
"""

from dataclasses import dataclass
from typing import List, Sequence, Tuple

from core import EmptyInput, ParseTree, Token
from extraction import TokenTag, UtteranceTuple
from .config import Condition


@dataclass(frozen=True)
class EvalUnit:
    """Consecutive utterances of one conversation, scored together"""
    unit_id: str
    conversation_id: str
    utterances: Tuple[UtteranceTuple, ...]

    @property
    def tokens(self) -> List[Token]:
        return [token for u in self.utterances for token in u.disfluent]

    @property
    def tags(self) -> List[TokenTag]:
        return [tag for u in self.utterances for tag in u.tags]

    @property
    def trees(self) -> List[ParseTree]:
        return [u.tree for u in self.utterances]

    @property
    def utterance_ids(self) -> List[str]:
        return [u.id for u in self.utterances]

    @property
    def text(self) -> str:
        """Disfluent input, one utterance per line"""
        return "\n".join(u.disfluent_text for u in self.utterances)

    @property
    def fluent_text(self) -> str:
        return "\n".join(u.fluent_text for u in self.utterances)


def segment(conversation: Sequence[UtteranceTuple], condition: Condition, size: int = 1) -> List[EvalUnit]:
    """
    Cut a conversation into evaluation units.

    Args:
        conversation: Utterances of one conversation, in order
        condition: FULL gives one unit; SEGMENTED gives chunks of `size` utterances
        size: Utterances per chunk under SEGMENTED
    """
    if not conversation:
        raise EmptyInput("Cannot segment an empty conversation")
    if size < 1:
        raise ValueError(f"Segment size must be >= 1, got {size}")
    conversation_id = conversation[0].conversation_id
    if condition is Condition.FULL:
        return [EvalUnit(f"{conversation_id}/f", conversation_id, tuple(conversation))]
    return [
        EvalUnit(f"{conversation_id}/s{i // size:04d}", conversation_id, tuple(conversation[i:i + size]))
        for i in range(0, len(conversation), size)
    ]
