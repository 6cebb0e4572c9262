"""
Core data structures for Switchboard-style constituency trees.

This module defines the fundamental building blocks:
- Terminal tokens (verbatim surfaces, partial words and punctuation included)
- Parse tree nodes with terminal spans
- Node classes of the Shriberg disfluency scheme
"""

import re
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, Iterator, List, Optional, Tuple


class NodeClass(Enum):
    """Disfluency class of a tree node"""
    FLUENT = "fluent"
    EDITED = "edited"    # Reparandum of a repair
    INTJ = "intj"        # Interjection / filler
    PRN = "prn"          # Parenthetical


@dataclass(frozen=True)
class Token:
    """
    A single terminal of a parse tree.

    Attributes:
        surface: Word as written in the treebank (PTB escapes kept verbatim)
        index: Position in the tree's yield, starting at 0
        is_punct: True when the preterminal label is a punctuation label
        pos: Preterminal (part-of-speech) label
    """
    surface: str
    index: int = 0
    is_punct: bool = False
    pos: str = ""

    def __post_init__(self):
        if not self.surface:
            raise ValueError("Token surface must be non-empty")


@dataclass(frozen=True)
class ParseTree:
    """
    Immutable constituency tree node.

    A node is either a preterminal holding one token, or an internal
    node with at least one child. span is the half-open range of
    terminal indices covered by the node.
    """
    label: str
    children: Tuple["ParseTree", ...] = ()
    token: Optional[Token] = None
    span: Tuple[int, int] = (0, 0)

    def __post_init__(self):
        if (self.token is None) == (not self.children):
            raise ValueError(f"Node {self.label!r} needs a token xor children")

    @property
    def is_leaf(self) -> bool:
        return self.token is not None

    @property
    def width(self) -> int:
        return self.span[1] - self.span[0]

    @property
    def node_class(self) -> NodeClass:
        return classify_node(self.label)

    def subtrees(self) -> Iterator["ParseTree"]:
        """Pre-order traversal, root first"""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def leaves(self) -> Iterator["ParseTree"]:
        return (node for node in self.subtrees() if node.is_leaf)

    def __str__(self):
        return render(self)


def base_label(label: str) -> str:
    """Strip function tags and co-indices: NP-SBJ-1 -> NP, PRN=2 -> PRN."""
    # Labels such as -NONE- or -LRB- start with a dash and carry no tags
    if label.startswith("-"):
        return label
    return _TAG_SPLIT.split(label, maxsplit=1)[0]


def classify_node(label: str) -> NodeClass:
    """Map a node label onto the Shriberg scheme; everything else is fluent."""
    return _DISFLUENT_LABELS.get(base_label(label), NodeClass.FLUENT)


def is_punct_label(pos: str) -> bool:
    return pos in PUNCT_LABELS


def make_leaf(pos: str, surface: str, index: int = 0) -> ParseTree:
    token = Token(surface=surface, index=index, is_punct=is_punct_label(pos), pos=pos)
    return ParseTree(label=pos, token=token, span=(index, index + 1))


def yield_tokens(tree: ParseTree) -> List[Token]:
    """Terminals left to right"""
    return [leaf.token for leaf in tree.leaves()]


def render(tree: ParseTree) -> str:
    """Canonical single-line S-expression"""
    parts: List[str] = []
    stack: List[object] = [tree]
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            parts.append(item)
            continue
        if item.is_leaf:
            parts.append(f"({item.label} {item.token.surface})")
            continue
        parts.append(f"({item.label}")
        stack.append(")")
        for child in reversed(item.children):
            stack.append(child)
            stack.append(" ")
    return "".join(parts)


def reindex(tree: ParseTree, start: int = 0) -> ParseTree:
    """Rebuild spans and token indices from the tree's shape."""
    counter = [start]

    def walk(node: ParseTree) -> ParseTree:
        if node.is_leaf:
            index = counter[0]
            counter[0] += 1
            token = replace(node.token, index=index)
            return replace(node, token=token, span=(index, index + 1))
        children = tuple(walk(child) for child in node.children)
        return replace(node, children=children, span=(children[0].span[0], children[-1].span[1]))

    return walk(tree)


def prune_traces(tree: ParseTree, labels: Optional[Iterable[str]] = None) -> Optional[ParseTree]:
    """
    Drop preterminals with the given labels (-NONE- traces by default)
    and any ancestors left without children.

    Returns None when nothing remains.
    """
    dropped = frozenset(labels) if labels is not None else frozenset({TRACE_LABEL})

    def walk(node: ParseTree) -> Optional[ParseTree]:
        if node.is_leaf:
            return None if node.label in dropped else node
        children = tuple(kept for kept in (walk(child) for child in node.children) if kept is not None)
        if not children:
            return None
        return replace(node, children=children)

    pruned = walk(tree)
    return reindex(pruned) if pruned is not None else None


_TAG_SPLIT = re.compile(r"[-=]")

_DISFLUENT_LABELS = {
    "EDITED": NodeClass.EDITED,
    "INTJ": NodeClass.INTJ,
    "PRN": NodeClass.PRN,
}

# Standard PTB punctuation preterminals
PUNCT_LABELS = frozenset({".", ",", ":", "''", "``", "-LRB-", "-RRB-"})

TRACE_LABEL = "-NONE-"

# Switchboard dysfluency markup (\[ \+ \] E_S N_S) and speaker-turn trees
MARKUP_LABEL = "-DFL-"
SPEAKER_TURN_LABEL = "CODE"

DISFLUENT_CLASSES = (NodeClass.EDITED, NodeClass.INTJ, NodeClass.PRN)
