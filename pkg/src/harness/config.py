"""
Evaluation configuration for one grid cell (model, condition, shots).
"""

from dataclasses import dataclass, fields, replace
from enum import Enum
from pathlib import Path
from typing import Optional, Tuple, Union

import yaml

from core import ConfigurationError

DEFAULT_INSTRUCTION = (
    "Remove all disfluencies (filled pauses such as uh and um, interjections, "
    "parentheticals, and edited or restarted phrases) from the transcript. "
    "Keep every other word exactly as written, in the same order. "
    "Output only the cleaned transcript."
)


class Condition(Enum):
    """Input granularity: whole conversation or segmented chunks"""
    FULL = "f"
    SEGMENTED = "s"

    @classmethod
    def parse(cls, value: Union[str, "Condition"]) -> "Condition":
        if isinstance(value, Condition):
            return value
        key = str(value).strip().lower()
        aliases = {"f": cls.FULL, "full": cls.FULL, "s": cls.SEGMENTED, "segmented": cls.SEGMENTED}
        if key not in aliases:
            raise ConfigurationError(f"Unknown condition {value!r}; use f or s")
        return aliases[key]


@dataclass
class EvalConfig:
    """
    Settings of one evaluation run.

    Attributes:
        model_id: Backend model name (mock-* names select built-in mocks)
        condition: FULL (f) or SEGMENTED (s)
        shots: Number of exemplar pairs k in the prompt
        temperature: Decoding temperature
        max_tokens: Output cap; None means twice the input token estimate
        exemplar_seed: Seed of the exemplar shuffle
        cache_dir: Response cache directory; None disables caching
        concurrency: Maximum simultaneous backend requests
        segment_size: Utterances per unit under SEGMENTED
        max_retries: Attempts per request before the unit is marked failed
        backoff_factor: Base delay (s) of the exponential retry backoff
        timeout: Per-request timeout (s)
        base_url: Chat-completion endpoint; None uses OPENAI_BASE_URL or the default
        api_key_env: Environment variable holding the API credential
        instruction: Task instruction placed before the exemplars
        reasoning_markers: Open/close markers of reasoning blocks to strip
        context_length: Override of the backend's context length, in tokens
    """
    model_id: str = "mock-oracle"
    condition: Condition = Condition.SEGMENTED
    shots: int = 0
    temperature: float = 0.0
    max_tokens: Optional[int] = None
    exemplar_seed: int = 0
    cache_dir: Optional[str] = None
    concurrency: int = 4
    segment_size: int = 1
    max_retries: int = 4
    backoff_factor: float = 1.0
    timeout: float = 60.0
    base_url: Optional[str] = None
    api_key_env: str = "OPENAI_API_KEY"
    instruction: str = DEFAULT_INSTRUCTION
    reasoning_markers: Tuple[str, str] = ("<think>", "</think>")
    context_length: Optional[int] = None

    def __post_init__(self):
        self.condition = Condition.parse(self.condition)
        self.reasoning_markers = tuple(self.reasoning_markers)
        if self.shots < 0:
            raise ValueError(f"shots must be >= 0, got {self.shots}")
        if self.concurrency < 1:
            raise ValueError(f"concurrency must be >= 1, got {self.concurrency}")
        if self.segment_size < 1:
            raise ValueError(f"segment_size must be >= 1, got {self.segment_size}")
        if self.max_retries < 1:
            raise ValueError(f"max_retries must be >= 1, got {self.max_retries}")
        if len(self.reasoning_markers) != 2:
            raise ValueError("reasoning_markers needs an open and a close marker")

    def for_cell(self, condition: Union[str, Condition], shots: int) -> "EvalConfig":
        return replace(self, condition=Condition.parse(condition), shots=shots)

    @property
    def cell_name(self) -> str:
        return f"{self.condition.value}_k{self.shots}"

    @classmethod
    def from_file(cls, path: Union[str, Path], **overrides) -> "EvalConfig":
        """
        Load a YAML key-value file; non-None overrides win over file values.

        The extra key `instruction_file` replaces `instruction` with the
        content of the named file (relative to the config file).
        """
        path = Path(path)
        with open(path, encoding="utf-8") as f:
            data = yaml.safe_load(f) or {}
        if not isinstance(data, dict):
            raise ConfigurationError(f"{path}: expected a mapping of keys to values")
        instruction_file = data.pop("instruction_file", None)
        if instruction_file:
            data["instruction"] = (path.parent / instruction_file).read_text(encoding="utf-8").strip()
        return cls.from_dict(data, **overrides)

    @classmethod
    def from_dict(cls, data: dict, **overrides) -> "EvalConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigurationError(f"Unknown configuration keys: {', '.join(unknown)}")
        merged = dict(data)
        merged.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**merged)
