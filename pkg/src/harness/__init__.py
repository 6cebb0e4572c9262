"""Evaluation harness: units, prompts, backends, cache, runner and output store."""

from .config import Condition, EvalConfig, DEFAULT_INSTRUCTION
from .units import EvalUnit, segment
from .prompts import Prompt, build_prompt, select_exemplars, fingerprint, estimate_tokens, extract_transcript
from .backends import (
    BackendCapabilities, CompletionRequest, Completion, ModelBackend,
    MockEchoBackend, MockOracleBackend, MockEmptyBackend, MockFillerBackend,
    OpenAIChatBackend, MOCK_BACKENDS, create_backend,
)
from .cache import ResponseCache
from .runner import ModelOutput, RunStats, EvalRunner, build_units, run_eval
from .store import CellInfo, save_cell, load_cells, read_outputs, cell_dir, model_slug
from .evaluate import ScoredCell, score_output, score_outputs

__all__ = [
    'Condition',
    'EvalConfig',
    'DEFAULT_INSTRUCTION',
    'EvalUnit',
    'segment',
    'Prompt',
    'build_prompt',
    'select_exemplars',
    'fingerprint',
    'estimate_tokens',
    'extract_transcript',
    'BackendCapabilities',
    'CompletionRequest',
    'Completion',
    'ModelBackend',
    'MockEchoBackend',
    'MockOracleBackend',
    'MockEmptyBackend',
    'MockFillerBackend',
    'OpenAIChatBackend',
    'MOCK_BACKENDS',
    'create_backend',
    'ResponseCache',
    'ModelOutput',
    'RunStats',
    'EvalRunner',
    'build_units',
    'run_eval',
    'CellInfo',
    'save_cell',
    'load_cells',
    'read_outputs',
    'cell_dir',
    'model_slug',
    'ScoredCell',
    'score_output',
    'score_outputs',
]
