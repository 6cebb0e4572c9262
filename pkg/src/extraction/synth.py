"""
Synthetic disfluency injection for corpus-free testing.

Fluent sentences are wrapped with the three Shriberg node types:
- INTJ fillers (uh, um)
- PRN asides (you know, i mean)
- EDITED reparanda that duplicate a 1-3 token prefix of the following fluent span

Every generated utterance is checked against the aligner: the fluent
version, aligned back onto the disfluent one, must delete exactly the
injected tokens. Candidates failing the check are redrawn.
"""

import logging
import random
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

from alignment import align, deletion_labels
from core import EmptyInput, InvalidRate, ParseTree, Token, is_punct_label, make_leaf, reindex, yield_tokens
from .corpus import Corpus, split_conversations
from .tuples import TokenTag, UtteranceTuple

logger = logging.getLogger(__name__)

FILLERS = ("uh", "um")
PARENTHETICALS = (("you", "know"), ("i", "mean"))
MAX_EDITED_LENGTH = 3

_PUNCT_POS = {".": ".", "?": ".", "!": ".", ",": ",", ":": ":", ";": ":"}


@dataclass
class DisfluencyRates:
    """
    Per-position insertion probabilities.

    Before every fluent token an EDITED reparandum, an INTJ filler and a
    PRN aside are each inserted with their own probability.
    """
    edited: float = 0.1
    intj: float = 0.15
    prn: float = 0.05

    def __post_init__(self):
        for name in ("edited", "intj", "prn"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise InvalidRate(f"{name} rate must be in [0, 1], got {value}")

    @classmethod
    def zero(cls) -> "DisfluencyRates":
        return cls(edited=0.0, intj=0.0, prn=0.0)


def _as_pairs(tokens: Sequence[Union[Token, str]]) -> List[Tuple[str, str]]:
    pairs = []
    for token in tokens:
        if isinstance(token, Token):
            pairs.append((token.pos or "XX", token.surface))
        else:
            pairs.append((_PUNCT_POS.get(token, "XX"), token))
    return pairs


def _phrase(label: str, leaves: List[ParseTree]) -> ParseTree:
    return ParseTree(label=label, children=tuple(leaves))


def _draw(pairs: List[Tuple[str, str]], rng: random.Random,
          rates: DisfluencyRates) -> Tuple[ParseTree, List[TokenTag]]:
    children: List[ParseTree] = []
    tags: List[TokenTag] = []
    for i, (pos, surface) in enumerate(pairs):
        roll_edited, roll_intj, roll_prn = rng.random(), rng.random(), rng.random()
        if roll_edited < rates.edited and not is_punct_label(pos):
            run = 0
            while i + run < len(pairs) and run < MAX_EDITED_LENGTH and not is_punct_label(pairs[i + run][0]):
                run += 1
            length = rng.randint(1, run)
            children.append(_phrase("EDITED", [make_leaf(p, s) for p, s in pairs[i:i + length]]))
            tags.extend([TokenTag.E] * length)
        if roll_intj < rates.intj:
            children.append(_phrase("INTJ", [make_leaf("UH", rng.choice(FILLERS))]))
            tags.append(TokenTag.I)
        if roll_prn < rates.prn:
            subject, verb = rng.choice(PARENTHETICALS)
            clause = _phrase("S", [make_leaf("PRP", subject), make_leaf("VBP", verb)])
            children.append(_phrase("PRN", [clause]))
            tags.extend([TokenTag.P] * 2)
        children.append(make_leaf(pos, surface))
        tags.append(TokenTag.FLUENT)
    return reindex(ParseTree(label="S", children=tuple(children))), tags


def is_recoverable(disfluent: Sequence[Token], tags: Sequence[TokenTag]) -> bool:
    """True when aligning the fluent subsequence deletes exactly the disfluent tokens."""
    fluent = [token.surface for token, tag in zip(disfluent, tags) if tag is TokenTag.FLUENT]
    labels = deletion_labels(align(disfluent, fluent))
    return list(labels.deleted) == [tag.is_disfluent for tag in tags]


def inject_disfluencies(
    fluent_tokens: Sequence[Union[Token, str]],
    seed: int,
    rates: DisfluencyRates = None,
    conversation_id: str = "synth",
    ordinal: int = 0,
    max_attempts: int = 20
) -> UtteranceTuple:
    """
    Wrap a fluent sentence with synthetic disfluencies.

    Args:
        fluent_tokens: Tokens (or bare words) of the fluent sentence
        seed: Seed of the private random generator
        rates: Insertion probabilities
        conversation_id: Conversation id of the returned tuple
        ordinal: Utterance ordinal of the returned tuple
        max_attempts: Redraws before giving up on EDITED insertions, then on all

    Returns:
        UtteranceTuple whose tags are the injector's own bookkeeping
    """
    if not fluent_tokens:
        raise EmptyInput("Cannot inject disfluencies into an empty sentence")
    rates = rates or DisfluencyRates()
    pairs = _as_pairs(fluent_tokens)
    rng = random.Random(seed)

    schedule = [rates] * max_attempts
    schedule += [DisfluencyRates(edited=0.0, intj=rates.intj, prn=rates.prn)] * max_attempts
    for attempt in schedule:
        tree, tags = _draw(pairs, rng, attempt)
        tokens = yield_tokens(tree)
        if is_recoverable(tokens, tags):
            break
    else:
        logger.debug("Seed %d: no recoverable draw, keeping the sentence fluent", seed)
        tree, tags = _draw(pairs, rng, DisfluencyRates.zero())
        tokens = yield_tokens(tree)

    return UtteranceTuple(
        tree=tree,
        disfluent=tuple(tokens),
        tags=tuple(tags),
        fluent=tuple(token for token, tag in zip(tokens, tags) if tag is TokenTag.FLUENT),
        conversation_id=conversation_id,
        ordinal=ordinal,
    )


class SentenceGenerator:
    """
    Seeded generator of short fluent sentences with POS labels.

    Sentences follow "subject (adverb) verb determiner noun (preposition
    determiner noun) (.)" over a small fixed lexicon.
    """

    SUBJECTS = [("PRP", "i"), ("PRP", "we"), ("PRP", "they"), ("NNS", "people"), ("NN", "everybody")]
    ADVERBS = [("RB", "really"), ("RB", "probably"), ("RB", "usually"), ("RB", "actually")]
    VERBS = [("VBP", w) for w in ("like", "want", "need", "see", "remember", "watch", "visit")]
    DETERMINERS = [("DT", "the"), ("DT", "a"), ("DT", "that")]
    NOUNS = [("NN", w) for w in ("house", "car", "job", "school", "weather", "game", "dog",
                                  "garden", "program", "city", "movie", "team")]
    PREPOSITIONS = [("IN", "in"), ("IN", "at"), ("IN", "near")]

    def __init__(self, seed: Optional[int] = None):
        self.rng = random.Random(seed)

    def sentence(self) -> List[Token]:
        rng = self.rng
        pairs = [rng.choice(self.SUBJECTS)]
        if rng.random() < 0.4:
            pairs.append(rng.choice(self.ADVERBS))
        pairs += [rng.choice(self.VERBS), rng.choice(self.DETERMINERS), rng.choice(self.NOUNS)]
        if rng.random() < 0.5:
            pairs += [rng.choice(self.PREPOSITIONS), rng.choice(self.DETERMINERS), rng.choice(self.NOUNS)]
        if rng.random() < 0.5:
            pairs.append((".", "."))
        return [Token(surface=word, index=i, is_punct=is_punct_label(pos), pos=pos)
                for i, (pos, word) in enumerate(pairs)]


def synthesize_corpus(
    count: int,
    seed: int = 0,
    rates: DisfluencyRates = None,
    utterances_per_conversation: int = 10,
    train_fraction: float = 0.5,
    max_attempts: int = 20
) -> Corpus:
    """
    Build a synthetic corpus of `count` utterances.

    Utterances are grouped into conversations of up to
    `utterances_per_conversation`. A conversation also stays recoverable
    as a whole (the full-transcript condition aligns it in one piece);
    an utterance that cannot be fitted closes the conversation and opens
    the next one.
    """
    if count < 1:
        raise EmptyInput("Synthetic corpus needs at least one utterance")
    if utterances_per_conversation < 1:
        raise ValueError("utterances_per_conversation must be >= 1")
    rates = rates or DisfluencyRates()
    rng = random.Random(seed)
    generator = SentenceGenerator(rng.getrandbits(32))

    conversations: List[List[UtteranceTuple]] = [[]]
    for _ in range(count):
        sentence = generator.sentence()
        current = conversations[-1]
        if len(current) >= utterances_per_conversation:
            current = []
            conversations.append(current)
        conversation_id = f"synth{len(conversations) - 1:03d}"
        utterance = None
        for _ in range(max_attempts):
            candidate = inject_disfluencies(sentence, rng.getrandbits(32), rates,
                                            conversation_id=conversation_id, ordinal=len(current))
            if _fits(current, candidate):
                utterance = candidate
                break
        if utterance is None:
            current = []
            conversations.append(current)
            conversation_id = f"synth{len(conversations) - 1:03d}"
            utterance = inject_disfluencies(sentence, rng.getrandbits(32), rates,
                                            conversation_id=conversation_id, ordinal=0)
        current.append(utterance)

    utterances = [u for conversation in conversations for u in conversation]
    split = split_conversations([u.conversation_id for u in utterances], train_fraction, seed)
    logger.info("Synthesized %d utterances in %d conversations", len(utterances), len(conversations))
    return Corpus(utterances=utterances, split=split)


def _fits(conversation: List[UtteranceTuple], candidate: UtteranceTuple) -> bool:
    if not conversation:
        return True
    tokens = [t for u in conversation for t in u.disfluent] + list(candidate.disfluent)
    tags = [t for u in conversation for t in u.tags] + list(candidate.tags)
    return is_recoverable(tokens, tags)
