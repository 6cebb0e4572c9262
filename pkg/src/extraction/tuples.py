"""
Utterance tuples: tree, disfluent yield, per-token tags, fluent subsequence.

Tags are assigned top-down: the first disfluent node met on the way down
from the root claims every terminal in its span, so nested disfluencies
inherit the outermost class.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Tuple

from core import NodeClass, ParseTree, Token


class TokenTag(Enum):
    """Per-token disfluency label"""
    FLUENT = "F"
    E = "E"     # Inside an EDITED node
    I = "I"     # Inside an INTJ node
    P = "P"     # Inside a PRN node

    @property
    def is_disfluent(self) -> bool:
        return self is not TokenTag.FLUENT


TAG_FOR_CLASS: Dict[NodeClass, TokenTag] = {
    NodeClass.FLUENT: TokenTag.FLUENT,
    NodeClass.EDITED: TokenTag.E,
    NodeClass.INTJ: TokenTag.I,
    NodeClass.PRN: TokenTag.P,
}


@dataclass(frozen=True)
class UtteranceTuple:
    """
    One utterance of the dataset.

    Attributes:
        tree: Source parse tree
        disfluent: Full yield of the tree
        tags: One TokenTag per disfluent token
        fluent: Tokens tagged FLUENT, in order
        conversation_id: Conversation the utterance belongs to
        ordinal: Position of the utterance inside its conversation
    """
    tree: ParseTree
    disfluent: Tuple[Token, ...]
    tags: Tuple[TokenTag, ...]
    fluent: Tuple[Token, ...]
    conversation_id: str = "conv"
    ordinal: int = 0

    @property
    def id(self) -> str:
        return make_utterance_id(self.conversation_id, self.ordinal)

    @property
    def disfluent_count(self) -> int:
        return sum(tag.is_disfluent for tag in self.tags)

    @property
    def disfluent_text(self) -> str:
        return " ".join(token.surface for token in self.disfluent)

    @property
    def fluent_text(self) -> str:
        return " ".join(token.surface for token in self.fluent)


def make_utterance_id(conversation_id: str, ordinal: int) -> str:
    return f"{conversation_id}_{ordinal:04d}"


def split_utterance_id(utterance_id: str) -> Tuple[str, int]:
    conversation_id, _, ordinal = utterance_id.rpartition("_")
    return conversation_id, int(ordinal)


def tag_tokens(tree: ParseTree) -> Tuple[List[Token], List[TokenTag]]:
    """Top-down tagging of every terminal."""
    tokens: List[Token] = []
    tags: List[TokenTag] = []
    stack: List[Tuple[ParseTree, TokenTag]] = [(tree, TokenTag.FLUENT)]
    while stack:
        node, inherited = stack.pop()
        tag = inherited
        if tag is TokenTag.FLUENT:
            tag = TAG_FOR_CLASS[node.node_class]
        if node.is_leaf:
            tokens.append(node.token)
            tags.append(tag)
            continue
        for child in reversed(node.children):
            stack.append((child, tag))
    return tokens, tags


def extract_tuple(tree: ParseTree, utterance_id: Optional[str] = None,
                  conversation_id: str = "conv", ordinal: int = 0) -> UtteranceTuple:
    """
    Build the utterance tuple of one tree.

    Args:
        tree: Parse tree of the utterance
        utterance_id: "<conversation>_<ordinal>"; overrides the two fields below
        conversation_id: Conversation id when utterance_id is not given
        ordinal: Utterance position when utterance_id is not given
    """
    if utterance_id is not None:
        conversation_id, ordinal = split_utterance_id(utterance_id)
    tokens, tags = tag_tokens(tree)
    fluent = tuple(token for token, tag in zip(tokens, tags) if tag is TokenTag.FLUENT)
    return UtteranceTuple(
        tree=tree,
        disfluent=tuple(tokens),
        tags=tuple(tags),
        fluent=fluent,
        conversation_id=conversation_id,
        ordinal=ordinal,
    )
