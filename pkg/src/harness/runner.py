"""
Evaluation runner for one grid cell.

Units of the test split are turned into prompts, looked up in the
response cache, and sent to the backend with bounded concurrency.
Transient failures are retried with exponential backoff; a unit whose
retries run out is recorded as failed and the run carries on.
"""

import logging
import threading
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import backoff
from tqdm import tqdm

from core import BackendError, BackendUnreachable, EmptyInput, InsufficientExemplars, TransientBackendError
from extraction import Corpus, Split
from .backends import CompletionRequest, ModelBackend
from .cache import ResponseCache
from .config import EvalConfig
from .prompts import Exemplar, build_prompt, estimate_tokens, extract_transcript, fingerprint, select_exemplars
from .units import EvalUnit, segment

logger = logging.getLogger(__name__)


@dataclass
class ModelOutput:
    """
    Reply of the backend for one unit.

    Attributes:
        unit_id: Evaluation unit id
        conversation_id: Conversation of the unit
        utterance_ids: Utterances the unit covers
        fingerprint: Hash of prompt and decoding settings; keys the cache
        raw_text: Reply as returned
        transcript: Cleaned transcript extracted from the reply
        latency: Request latency in seconds (None for deterministic mocks)
        usage: Token usage if the backend reports it
        error: Failure description when the unit could not be completed
    """
    unit_id: str
    conversation_id: str
    utterance_ids: List[str]
    fingerprint: str
    raw_text: str = ""
    transcript: str = ""
    latency: Optional[float] = None
    usage: Dict[str, int] = field(default_factory=dict)
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None

    def to_record(self) -> dict:
        return {
            "unit_id": self.unit_id,
            "conversation_id": self.conversation_id,
            "utterance_ids": self.utterance_ids,
            "fingerprint": self.fingerprint,
            "raw_text": self.raw_text,
            "transcript": self.transcript,
            "latency": self.latency,
            "usage": self.usage,
            "error": self.error,
        }

    @classmethod
    def from_record(cls, record: dict) -> "ModelOutput":
        return cls(**record)


class RunStats:
    """Counters of one run"""

    def __init__(self):
        self.units = 0
        self.backend_calls = 0
        self.cache_hits = 0
        self.retries = 0
        self.failures = 0
        self._lock = threading.Lock()

    def count(self, name: str, amount: int = 1) -> None:
        with self._lock:
            setattr(self, name, getattr(self, name) + amount)

    def log_summary(self, label: str = "") -> None:
        logger.info("=== Run statistics %s===", f"{label} " if label else "")
        logger.info("Units: %d, backend calls: %d, cache hits: %d, retries: %d, failures: %d",
                    self.units, self.backend_calls, self.cache_hits, self.retries, self.failures)


def build_units(corpus: Corpus, config: EvalConfig) -> List[EvalUnit]:
    """Units of every test conversation, in corpus order."""
    units = []
    for conversation_id in corpus.conversation_ids(Split.TEST):
        units.extend(segment(corpus.conversations[conversation_id], config.condition, config.segment_size))
    return units


class EvalRunner:
    """
    Drives one backend over the units of a corpus.

    Args:
        backend: Model backend
        config: Cell configuration
        cache: Response cache; None disables caching
        show_progress: Display a progress bar
    """

    def __init__(self, backend: ModelBackend, config: EvalConfig,
                 cache: Optional[ResponseCache] = None, show_progress: bool = False):
        self.backend = backend
        self.config = config
        self.cache = cache
        self.show_progress = show_progress
        self.stats = RunStats()
        self._call = backoff.on_exception(
            backoff.expo,
            TransientBackendError,
            max_tries=config.max_retries,
            factor=config.backoff_factor,
            on_backoff=lambda details: self.stats.count("retries"),
            logger=logger,
        )(self._call_once)

    def _call_once(self, request: CompletionRequest):
        self.stats.count("backend_calls")
        return self.backend.complete(request)

    def run(self, corpus: Corpus) -> List[ModelOutput]:
        """One output per test unit, in unit order."""
        units = build_units(corpus, self.config)
        if not units:
            raise EmptyInput("Corpus has no test conversations")
        exemplars: List[Exemplar] = []
        if self.config.shots > 0:
            exemplars = select_exemplars(corpus.utterances_in(Split.TRAIN), self.config.exemplar_seed)
            if len(exemplars) < self.config.shots:
                raise InsufficientExemplars(
                    f"{self.config.shots} shots requested, train split offers {len(exemplars)} exemplars")
        self.stats.units = len(units)

        results: Dict[str, ModelOutput] = {}
        with ThreadPoolExecutor(max_workers=self.config.concurrency) as pool:
            futures = {pool.submit(self._run_unit, unit, exemplars): unit.unit_id for unit in units}
            progress = tqdm(as_completed(futures), total=len(futures), disable=not self.show_progress,
                            desc=f"{self.config.model_id} {self.config.cell_name}")
            for future in progress:
                results[futures[future]] = future.result()
        return [results[unit.unit_id] for unit in units]

    def _run_unit(self, unit: EvalUnit, exemplars: List[Exemplar]) -> ModelOutput:
        config = self.config
        capabilities = self.backend.capabilities
        prompt = build_prompt(unit, exemplars, config.shots, config.instruction,
                              system_message=capabilities.supports_system_message)
        max_tokens = config.max_tokens or 2 * estimate_tokens(unit.text)
        key = fingerprint(prompt, config.model_id, config.temperature, max_tokens)
        output = ModelOutput(unit_id=unit.unit_id, conversation_id=unit.conversation_id,
                             utterance_ids=unit.utterance_ids, fingerprint=key)

        context_length = config.context_length or capabilities.context_length
        needed = estimate_tokens(prompt.text) + max_tokens
        if context_length is not None and needed > context_length:
            output.error = f"ContextOverflow: needs ~{needed} tokens, context holds {context_length}"
            self.stats.count("failures")
            return output

        entry = self.cache.get(key) if self.cache is not None else None
        if entry is not None:
            self.stats.count("cache_hits")
        else:
            request = CompletionRequest(prompt=prompt, unit=unit, model_id=config.model_id,
                                        temperature=config.temperature, max_tokens=max_tokens)
            try:
                completion = self._call(request)
            except TransientBackendError as error:
                failure = BackendUnreachable(f"{config.max_retries} attempts failed, last: {error}")
                output.error = f"{type(failure).__name__}: {failure}"
                self.stats.count("failures")
                logger.warning("Unit %s failed: %s", unit.unit_id, output.error)
                return output
            except BackendError as error:
                output.error = f"{type(error).__name__}: {error}"
                self.stats.count("failures")
                logger.warning("Unit %s failed: %s", unit.unit_id, output.error)
                return output
            latency = None if self.backend.deterministic else completion.latency
            entry = {"model_id": config.model_id, "raw_text": completion.text,
                     "usage": completion.usage, "latency": latency}
            if self.cache is not None:
                self.cache.put(key, entry)

        output.raw_text = entry["raw_text"]
        output.usage = dict(entry.get("usage") or {})
        output.latency = entry.get("latency")
        output.transcript = extract_transcript(output.raw_text, config.reasoning_markers)
        return output


def run_eval(corpus: Corpus, backend: ModelBackend, config: EvalConfig,
             cache: Optional[ResponseCache] = None) -> List[ModelOutput]:
    """Run one cell; see EvalRunner."""
    runner = EvalRunner(backend, config, cache)
    outputs = runner.run(corpus)
    runner.stats.log_summary(config.cell_name)
    return outputs
