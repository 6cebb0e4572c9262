"""
Model backends.

Built-in mocks answer from the unit itself and are deterministic; the
chat backend speaks the chat-completion wire protocol (message list in,
choice list out) to any compatible endpoint.
"""

import logging
import os
import time
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Dict, Optional

import openai

from core import BackendError, ConfigurationError, TransientBackendError
from .config import EvalConfig
from .prompts import Prompt
from .units import EvalUnit

logger = logging.getLogger(__name__)

FILLER_WORDS = frozenset({"uh", "um", "uh-huh", "huh", "oh", "ah", "er", "hm"})


@dataclass(frozen=True)
class BackendCapabilities:
    """What a backend accepts"""
    context_length: Optional[int] = None    # tokens; None means unbounded
    supports_system_message: bool = True


@dataclass(frozen=True)
class CompletionRequest:
    """
    One request to a backend.

    unit is carried for the mocks; network backends only read the prompt.
    """
    prompt: Prompt
    unit: EvalUnit
    model_id: str
    temperature: float
    max_tokens: int


@dataclass(frozen=True)
class Completion:
    text: str
    usage: Dict[str, int] = field(default_factory=dict)
    latency: Optional[float] = None


class ModelBackend(ABC):
    """Base class for model backends"""

    capabilities = BackendCapabilities()
    deterministic = False

    @abstractmethod
    def complete(self, request: CompletionRequest) -> Completion:
        """Return the raw reply; raise TransientBackendError for retryable failures."""


class MockEchoBackend(ModelBackend):
    """Returns the disfluent input unchanged"""
    deterministic = True

    def complete(self, request: CompletionRequest) -> Completion:
        return Completion(text=request.unit.text)


class MockOracleBackend(ModelBackend):
    """Returns the gold fluent transcript"""
    deterministic = True

    def complete(self, request: CompletionRequest) -> Completion:
        return Completion(text=request.unit.fluent_text)


class MockEmptyBackend(ModelBackend):
    """Deletes everything"""
    deterministic = True

    def complete(self, request: CompletionRequest) -> Completion:
        return Completion(text="")


class MockFillerBackend(ModelBackend):
    """Rule-based baseline: drops filler words only"""
    deterministic = True

    def complete(self, request: CompletionRequest) -> Completion:
        lines = []
        for utterance in request.unit.utterances:
            kept = [t.surface for t in utterance.disfluent if t.surface.lower() not in FILLER_WORDS]
            lines.append(" ".join(kept))
        return Completion(text="\n".join(lines))


class OpenAIChatBackend(ModelBackend):
    """
    Chat-completion client for hosted or local OpenAI-compatible servers.

    Timeouts, connection errors, rate limits and 5xx replies are raised as
    TransientBackendError so the runner can retry them; anything else is a
    BackendError and fails the unit at once.
    """

    def __init__(
        self,
        base_url: Optional[str] = None,
        api_key_env: str = "OPENAI_API_KEY",
        timeout: float = 60.0,
        capabilities: BackendCapabilities = None,
    ):
        base_url = (base_url or os.getenv("OPENAI_BASE_URL", "")).strip() or None
        api_key = os.getenv(api_key_env, "").strip()
        if not api_key:
            if base_url is None:
                raise ConfigurationError(f"Missing required env: {api_key_env}")
            # Local inference servers accept any key
            api_key = "EMPTY"
        self.client = openai.OpenAI(api_key=api_key, base_url=base_url, timeout=timeout, max_retries=0)
        self.capabilities = capabilities or BackendCapabilities()

    def complete(self, request: CompletionRequest) -> Completion:
        started = time.perf_counter()
        try:
            response = self.client.chat.completions.create(
                model=request.model_id,
                messages=list(request.prompt.messages),
                temperature=request.temperature,
                max_tokens=request.max_tokens,
            )
        except (openai.APITimeoutError, openai.APIConnectionError, openai.RateLimitError,
                openai.InternalServerError) as error:
            raise TransientBackendError(f"{type(error).__name__}: {error}") from error
        except openai.OpenAIError as error:
            raise BackendError(f"{type(error).__name__}: {error}") from error

        if not response.choices:
            raise BackendError("Response carries no choices")
        text = response.choices[0].message.content or ""
        usage = {}
        if response.usage is not None:
            usage = {"prompt_tokens": response.usage.prompt_tokens,
                     "completion_tokens": response.usage.completion_tokens}
        return Completion(text=text, usage=usage, latency=time.perf_counter() - started)


MOCK_BACKENDS = {
    "mock-echo": MockEchoBackend,
    "mock-oracle": MockOracleBackend,
    "mock-empty": MockEmptyBackend,
    "mock-fillers": MockFillerBackend,
}


def create_backend(config: EvalConfig) -> ModelBackend:
    """
    Factory function to create backends.

    Model ids starting with "mock-" select a built-in mock; any other id
    is sent to the chat-completion endpoint.
    """
    if config.model_id.startswith("mock-"):
        if config.model_id not in MOCK_BACKENDS:
            raise ConfigurationError(f"Unknown mock backend: {config.model_id}. "
                                     f"Choose from: {sorted(MOCK_BACKENDS)}")
        return MOCK_BACKENDS[config.model_id]()
    backend = OpenAIChatBackend(base_url=config.base_url, api_key_env=config.api_key_env,
                                timeout=config.timeout)
    logger.info("Using chat-completion backend for %s", config.model_id)
    return backend
