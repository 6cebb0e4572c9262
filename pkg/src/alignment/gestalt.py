"""
Ratcliff-Obershelp (Gestalt) alignment over normalized tokens.

The longest contiguous block of equal tokens is matched first and the
procedure recurses on the remainders to its left and right. Ties go to
the block starting earliest in the gold sequence, then earliest in the
hypothesis, which is exactly difflib's find_longest_match contract.
Automatic junk detection is switched off: every token may anchor a block.
"""

import difflib
import re
import string
from dataclasses import dataclass
from typing import List, Sequence, Tuple, Union

from core import Token

GoldToken = Union[Token, str]

# PTB bracket escapes and their literals
PTB_ESCAPES = {
    "-LRB-": "(",
    "-RRB-": ")",
    "-LSB-": "[",
    "-RSB-": "]",
    "-LCB-": "{",
    "-RCB-": "}",
}

_CLITIC_RE = re.compile(r"^(.*\w)(n't|'s|'re|'ve|'ll|'d|'m)([.,!?;:]*)$", re.IGNORECASE)

_PUNCT_KEY = "\x00"


@dataclass(frozen=True)
class Alignment:
    """
    Non-crossing matched blocks between gold and hypothesis tokens.

    Attributes:
        blocks: (gold_start, hyp_start, length) triples, increasing in both coordinates
        gold_len: Number of gold tokens
        hyp_len: Number of hypothesis tokens
    """
    blocks: Tuple[Tuple[int, int, int], ...]
    gold_len: int
    hyp_len: int

    @property
    def matched(self) -> int:
        return sum(length for _, _, length in self.blocks)


@dataclass(frozen=True)
class DeletionLabels:
    """Per-gold-token keep/delete decision derived from an Alignment"""
    deleted: Tuple[bool, ...]
    insertions: int = 0

    @property
    def gold_len(self) -> int:
        return len(self.deleted)

    @property
    def deleted_count(self) -> int:
        return sum(self.deleted)


def _surface(token: GoldToken) -> str:
    return token.surface if isinstance(token, Token) else token


def normalize_token(surface: str) -> str:
    """
    Lower-case and strip surrounding punctuation: "Uh," -> "uh".

    PTB escapes map to their literal bracket. An empty result means the
    token is punctuation only.
    """
    if surface in PTB_ESCAPES:
        return PTB_ESCAPES[surface]
    return surface.lower().strip(string.punctuation)


def match_key(surface: str) -> str:
    """Comparison key; punctuation-only tokens only match identical surfaces."""
    normalized = normalize_token(surface)
    if normalized.strip(string.punctuation):
        return normalized
    return _PUNCT_KEY + PTB_ESCAPES.get(surface, surface)


def is_punctuation_only(token: GoldToken) -> bool:
    if isinstance(token, Token) and token.is_punct:
        return True
    return match_key(_surface(token)).startswith(_PUNCT_KEY)


def tokenize_hypothesis(text: str) -> List[str]:
    """Whitespace split, then PTB clitic split: "don't" -> "do", "n't"."""
    tokens = []
    for piece in text.split():
        match = _CLITIC_RE.match(piece)
        if match and match.group(1)[-1] != "'":
            tokens.append(match.group(1))
            tokens.append(match.group(2) + match.group(3))
        else:
            tokens.append(piece)
    return tokens


def align(gold: Sequence[GoldToken], hyp: Sequence[str]) -> Alignment:
    """Align hypothesis tokens against gold tokens (either side may be empty)."""
    gold_keys = [match_key(_surface(token)) for token in gold]
    hyp_keys = [match_key(token) for token in hyp]
    matcher = difflib.SequenceMatcher(None, gold_keys, hyp_keys, autojunk=False)
    blocks = tuple(
        (block.a, block.b, block.size)
        for block in matcher.get_matching_blocks()
        if block.size > 0
    )
    return Alignment(blocks=blocks, gold_len=len(gold_keys), hyp_len=len(hyp_keys))


def deletion_labels(alignment: Alignment) -> DeletionLabels:
    """Gold tokens outside every block are deleted; unmatched hypothesis tokens are insertions."""
    deleted = [True] * alignment.gold_len
    for gold_start, _, length in alignment.blocks:
        for index in range(gold_start, gold_start + length):
            deleted[index] = False
    return DeletionLabels(deleted=tuple(deleted), insertions=alignment.hyp_len - alignment.matched)
