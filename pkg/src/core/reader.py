"""
Reader for Penn-Treebank-style `.mrg` text.

Parsing happens in three passes: lexing with source positions,
grouping tokens into balanced top-level expressions, and building one
immutable ParseTree per expression.
"""

import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Iterator, List, Optional, Tuple, Union

from .errors import EmptyTree, TerminalWithChildren, TreebankError, UnbalancedParens, UnlabeledNode
from .tree import ParseTree, make_leaf

logger = logging.getLogger(__name__)

ErrorHandler = Callable[[TreebankError], None]

_TOKEN_RE = re.compile(r"\(|\)|[^()\s]+")

# Lines outside any tree starting with these are comments (.mrg copyright banners start with *x*)
_COMMENT_PREFIXES = ("*", "#", ";")


@dataclass
class _Lexeme:
    text: str
    line: int
    column: int


@dataclass
class _Frame:
    line: int
    column: int
    label: Optional[str] = None
    label_seen: bool = False

    def __post_init__(self):
        self.children: List[ParseTree] = []
        self.words: List[_Lexeme] = []


def _lex(source: str) -> Iterator[_Lexeme]:
    depth = 0
    for lineno, line in enumerate(source.splitlines(), start=1):
        if depth == 0 and line.lstrip().startswith(_COMMENT_PREFIXES):
            continue
        for match in _TOKEN_RE.finditer(line):
            text = match.group()
            if text == "(":
                depth += 1
            elif text == ")":
                depth = max(0, depth - 1)
            yield _Lexeme(text, lineno, match.start() + 1)


def _group(lexemes: Iterable[_Lexeme], on_error: ErrorHandler) -> Iterator[List[_Lexeme]]:
    """Split the token stream into balanced top-level expressions."""
    current: List[_Lexeme] = []
    depth = 0
    for lexeme in lexemes:
        if lexeme.text == "(":
            depth += 1
        elif lexeme.text == ")":
            if depth == 0:
                on_error(UnbalancedParens("unmatched ')'", lexeme.line, lexeme.column))
                continue
            depth -= 1
        elif depth == 0:
            on_error(TreebankError(f"unexpected token {lexeme.text!r} outside a tree",
                                   lexeme.line, lexeme.column))
            continue
        current.append(lexeme)
        if depth == 0:
            yield current
            current = []
    if current:
        opener = current[0]
        on_error(UnbalancedParens("unclosed '(' at end of input", opener.line, opener.column))


def _build(lexemes: List[_Lexeme]) -> ParseTree:
    stack: List[_Frame] = []
    leaf_count = 0
    for lexeme in lexemes:
        if lexeme.text == "(":
            if stack:
                stack[-1].label_seen = True
            stack.append(_Frame(lexeme.line, lexeme.column))
        elif lexeme.text == ")":
            frame = stack.pop()
            node = _close(frame, leaf_count)
            # Unlabeled wrappers pass an already counted leaf through
            if frame.words:
                leaf_count += 1
            if not stack:
                return node
            stack[-1].children.append(node)
        else:
            frame = stack[-1]
            if not frame.label_seen:
                frame.label = lexeme.text
                frame.label_seen = True
            else:
                frame.words.append(lexeme)
    raise UnbalancedParens("unclosed '('", lexemes[0].line, lexemes[0].column)


def _close(frame: _Frame, leaf_count: int) -> ParseTree:
    if frame.words and frame.children:
        word = frame.words[0]
        raise TerminalWithChildren(f"terminal {word.text!r} next to subtrees in {frame.label!r}",
                                   word.line, word.column)
    if len(frame.words) > 1:
        word = frame.words[1]
        raise TerminalWithChildren(f"second terminal {word.text!r} under {frame.label!r}",
                                   word.line, word.column)
    if frame.words:
        if frame.label is None:
            raise UnlabeledNode("terminal without a preterminal label", frame.line, frame.column)
        return make_leaf(frame.label, frame.words[0].text, leaf_count)
    if not frame.children:
        raise EmptyTree(f"node {frame.label or '()'} has no children", frame.line, frame.column)
    if frame.label is None:
        if len(frame.children) == 1:
            return frame.children[0]
        raise UnlabeledNode("unlabeled node with several children", frame.line, frame.column)
    children = tuple(frame.children)
    return ParseTree(label=frame.label, children=children,
                     span=(children[0].span[0], children[-1].span[1]))


def _raise(error: TreebankError) -> None:
    raise error


def parse_trees(source: str, on_error: Optional[ErrorHandler] = None) -> List[ParseTree]:
    """
    Parse every top-level S-expression in source.

    Args:
        source: Treebank text, one or more trees, blank lines and comments allowed
        on_error: Called with each malformed tree's error; the tree is skipped
            and parsing continues. Without a handler the first error is raised.

    Returns:
        One ParseTree per well-formed expression, in source order
    """
    handler = on_error or _raise
    trees = []
    for group in _group(_lex(source), handler):
        try:
            trees.append(_build(group))
        except TreebankError as error:
            handler(error)
    return trees


def read_treebank(
    paths: Iterable[Union[str, Path]],
    on_error: Optional[ErrorHandler] = None
) -> List[Tuple[str, ParseTree]]:
    """
    Read `.mrg` files into (conversation_id, tree) pairs.

    The conversation id is the file stem (sw2005.mrg -> sw2005).
    """
    pairs = []
    for path in map(Path, paths):
        def tagged(error: TreebankError, _name=str(path)):
            error.with_source(_name)
            if on_error is None:
                raise error
            on_error(error)

        trees = parse_trees(path.read_text(encoding="utf-8"), on_error=tagged)
        logger.debug("Read %d trees from %s", len(trees), path)
        pairs.extend((path.stem, tree) for tree in trees)
    return pairs
