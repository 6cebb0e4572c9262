"""
Prompt construction and transcript extraction.

A prompt is a chat message list: the instruction, k exemplar pairs as
user/assistant turns, then the unit's disfluent text. Message lists are
serialized with sorted keys so fingerprints are byte-stable.
"""

import hashlib
import json
import random
import re
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

from core import InsufficientExemplars
from extraction import UtteranceTuple
from .units import EvalUnit

Exemplar = Tuple[str, str]


@dataclass(frozen=True)
class Prompt:
    """Chat messages of one request"""
    messages: Tuple[Dict[str, str], ...]

    def to_json(self) -> str:
        return json.dumps(list(self.messages), sort_keys=True, ensure_ascii=False)

    @property
    def text(self) -> str:
        return "\n\n".join(message["content"] for message in self.messages)


def select_exemplars(train: Sequence[UtteranceTuple], seed: int) -> List[Exemplar]:
    """
    (disfluent, fluent) pairs from train utterances with at least one
    disfluent token, in a seeded shuffle of utterance-id order.
    """
    candidates = sorted((u for u in train if u.disfluent_count > 0), key=lambda u: u.id)
    random.Random(seed).shuffle(candidates)
    return [(u.disfluent_text, u.fluent_text) for u in candidates]


def build_prompt(unit: EvalUnit, exemplars: Sequence[Exemplar], k: int, instruction: str,
                 system_message: bool = True) -> Prompt:
    """
    Assemble the messages of one request.

    Args:
        unit: Unit whose disfluent text is cleaned
        exemplars: Exemplar pairs in selection order; the first k are used
        k: Number of shots
        instruction: Task instruction
        system_message: Send the instruction as a system message; otherwise
            prefix it to the first user turn
    """
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    if len(exemplars) < k:
        raise InsufficientExemplars(f"{k} shots requested, {len(exemplars)} exemplars available")
    turns: List[Dict[str, str]] = []
    for disfluent, fluent in exemplars[:k]:
        turns.append({"role": "user", "content": disfluent})
        turns.append({"role": "assistant", "content": fluent})
    turns.append({"role": "user", "content": unit.text})
    if system_message:
        messages = [{"role": "system", "content": instruction}] + turns
    else:
        first = dict(turns[0], content=f"{instruction}\n\n{turns[0]['content']}")
        messages = [first] + turns[1:]
    return Prompt(messages=tuple(messages))


def fingerprint(prompt: Prompt, model_id: str, temperature: float, max_tokens: int) -> str:
    """SHA-256 over the prompt and the decoding settings"""
    payload = json.dumps(
        {"messages": json.loads(prompt.to_json()), "model": model_id,
         "temperature": temperature, "max_tokens": max_tokens},
        sort_keys=True, ensure_ascii=False,
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def estimate_tokens(text: str) -> int:
    """Rough subword count, four characters per token"""
    return max(1, (len(text) + 3) // 4)


_FENCE_RE = re.compile(r"```(?:[^\n`]*\n)?(.*?)```", re.DOTALL)
_LABEL_RE = re.compile(
    r"^\s*(?:here is the\s+)?(?:cleaned|clean|fluent|corrected|disfluency-free|final)?\s*"
    r"(?:transcript|text|version|output|answer)\s*:\s*",
    re.IGNORECASE,
)


def extract_transcript(raw: str, markers: Tuple[str, str] = ("<think>", "</think>")) -> str:
    """
    Pull the cleaned transcript out of a raw model reply.

    Reasoning blocks between the markers are dropped (an unterminated
    block drops the rest of the reply, a dangling close marker drops
    everything before it). Code fences are unwrapped to their content and
    a leading "Cleaned transcript:"-style label is removed.
    """
    text = raw or ""
    open_marker, close_marker = markers
    if open_marker and close_marker:
        text = re.sub(re.escape(open_marker) + r".*?" + re.escape(close_marker), " ", text, flags=re.DOTALL)
        if close_marker in text:
            text = text.rsplit(close_marker, 1)[1]
        if open_marker in text:
            text = text.split(open_marker, 1)[0]
    text = _FENCE_RE.sub(lambda m: m.group(1), text)
    text = _LABEL_RE.sub("", text, count=1)
    return text.strip()
