"""Unit tests for the evaluation harness."""

import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

import json
import random
import re
import threading
from collections import Counter
from dataclasses import fields
from types import SimpleNamespace

import httpx
import openai
import pytest

from core import (
    BackendError, TransientBackendError, CacheCorruption, ConfigurationError, EmptyInput,
    InsufficientExemplars,
)
from extraction import Split, inject_disfluencies, synthesize_corpus
from scoring import Scope, scope_mask
from harness import (
    Condition, EvalConfig, segment, build_prompt, select_exemplars, fingerprint, extract_transcript,
    Completion, ModelBackend, MockEchoBackend, MockOracleBackend, MockEmptyBackend, MockFillerBackend,
    OpenAIChatBackend, CompletionRequest, create_backend, ResponseCache, EvalRunner, build_units, run_eval,
    save_cell, load_cells, score_output, score_outputs,
)
from harness.backends import FILLER_WORDS


class CountingBackend(ModelBackend):
    """Oracle replies, counting calls"""
    deterministic = True

    def __init__(self):
        self.calls = 0
        self._lock = threading.Lock()

    def complete(self, request):
        with self._lock:
            self.calls += 1
        return Completion(text=request.unit.fluent_text)


class FlakyBackend(ModelBackend):
    """Fails the first `failures` attempts of every unit"""
    deterministic = True

    def __init__(self, failures, error=TransientBackendError):
        self.failures = failures
        self.error = error
        self.attempts = Counter()
        self._lock = threading.Lock()

    def complete(self, request):
        with self._lock:
            self.attempts[request.unit.unit_id] += 1
            attempt = self.attempts[request.unit.unit_id]
        if attempt <= self.failures:
            raise self.error("connection reset")
        return Completion(text=request.unit.fluent_text)


class RecordingBackend(MockOracleBackend):
    def __init__(self):
        self.prompts = []
        self._lock = threading.Lock()

    def complete(self, request):
        with self._lock:
            self.prompts.append(request.prompt)
        return super().complete(request)


def cell(condition="s", shots=0, **kwargs):
    kwargs.setdefault("backoff_factor", 0.0)
    return EvalConfig(condition=condition, shots=shots, **kwargs)


def conversation_scores(corpus, backend, config):
    outputs = run_eval(corpus, backend, config)
    return score_outputs(corpus, outputs)


class TestConfig:
    """Test evaluation settings"""

    def test_condition_parse(self):
        assert Condition.parse("f") is Condition.FULL
        assert Condition.parse("Segmented") is Condition.SEGMENTED
        with pytest.raises(ConfigurationError):
            Condition.parse("x")

    def test_cell_name(self):
        assert cell("f", 3).cell_name == "f_k3"
        assert cell().for_cell("f", 5).cell_name == "f_k5"

    @pytest.mark.parametrize("field,value", [
        ("shots", -1), ("concurrency", 0), ("segment_size", 0), ("max_retries", 0),
    ])
    def test_validation(self, field, value):
        with pytest.raises(ValueError):
            EvalConfig(**{field: value})

    def test_from_file_with_overrides(self, tmp_path):
        (tmp_path / "instruction.txt").write_text("Clean it.\n", encoding="utf-8")
        path = tmp_path / "eval.yaml"
        path.write_text("model_id: gpt-4o\ntemperature: 0.2\nconcurrency: 2\n"
                        "instruction_file: instruction.txt\n", encoding="utf-8")
        config = EvalConfig.from_file(path, concurrency=8, base_url=None)
        assert config.model_id == "gpt-4o"
        assert config.temperature == 0.2
        assert config.concurrency == 8
        assert config.instruction == "Clean it."

    def test_unknown_key(self, tmp_path):
        path = tmp_path / "eval.yaml"
        path.write_text("modle_id: x\n", encoding="utf-8")
        with pytest.raises(ConfigurationError):
            EvalConfig.from_file(path)

    def test_readme_lists_every_key(self):
        readme = os.path.join(os.path.dirname(__file__), '..', 'README.md')
        with open(readme, encoding="utf-8") as f:
            documented = set(re.findall(r"^\| `(\w+)` \|", f.read(), re.MULTILINE))
        assert documented == {field.name for field in fields(EvalConfig)} | {"instruction_file"}


class TestSegment:
    """Test evaluation units"""

    def _conversation(self, n):
        return [inject_disfluencies(["we", "agree"], seed=i, conversation_id="c", ordinal=i) for i in range(n)]

    def test_segmented(self):
        units = segment(self._conversation(10), Condition.SEGMENTED)
        assert len(units) == 10
        assert units[0].unit_id.endswith("/s0000")

    def test_full(self):
        conversation = self._conversation(10)
        (unit,) = segment(conversation, Condition.FULL)
        assert len(unit.tokens) == sum(len(u.disfluent) for u in conversation)
        assert unit.unit_id.endswith("/f")

    def test_chunk_sizes(self):
        units = segment(self._conversation(5), Condition.SEGMENTED, size=2)
        assert [len(u.utterances) for u in units] == [2, 2, 1]

    def test_empty(self):
        with pytest.raises(EmptyInput):
            segment([], Condition.FULL)

    def test_faithful(self, synth_corpus):
        for conversation in synth_corpus.conversations.values():
            (full,) = segment(conversation, Condition.FULL)
            for size in (1, 3):
                parts = segment(conversation, Condition.SEGMENTED, size)
                assert [t for unit in parts for t in unit.tokens] == full.tokens
                assert "\n".join(unit.text for unit in parts) == full.text


class TestPrompts:
    """Test prompt construction"""

    def _unit(self, synth_corpus):
        return build_units(synth_corpus, cell())[0]

    def test_zero_shot(self, synth_corpus):
        unit = self._unit(synth_corpus)
        prompt = build_prompt(unit, [], 0, "Clean.")
        assert [m["role"] for m in prompt.messages] == ["system", "user"]
        assert prompt.messages[1]["content"] == unit.text

    def test_k_shot_stable(self, synth_corpus):
        unit = self._unit(synth_corpus)
        exemplars = select_exemplars(synth_corpus.train, seed=0)
        a = build_prompt(unit, exemplars, 3, "Clean.")
        b = build_prompt(unit, select_exemplars(synth_corpus.train, seed=0), 3, "Clean.")
        assert a.to_json() == b.to_json()
        assert [m["role"] for m in a.messages] == ["system"] + ["user", "assistant"] * 3 + ["user"]

    def test_exemplars_have_disfluencies(self, synth_corpus):
        exemplars = select_exemplars(synth_corpus.train, seed=1)
        train = {(u.disfluent_text, u.fluent_text) for u in synth_corpus.train if u.disfluent_count}
        assert exemplars and set(exemplars) <= train

    def test_insufficient(self, synth_corpus):
        unit = self._unit(synth_corpus)
        with pytest.raises(InsufficientExemplars):
            build_prompt(unit, [("uh hi", "hi")] * 4, 5, "Clean.")

    def test_without_system_message(self, synth_corpus):
        unit = self._unit(synth_corpus)
        prompt = build_prompt(unit, [("uh hi", "hi")], 1, "Clean.", system_message=False)
        assert prompt.messages[0] == {"role": "user", "content": "Clean.\n\nuh hi"}

    def test_fingerprint(self, synth_corpus):
        prompt = build_prompt(self._unit(synth_corpus), [], 0, "Clean.")
        base = fingerprint(prompt, "m", 0.0, 100)
        assert base == fingerprint(prompt, "m", 0.0, 100)
        assert base != fingerprint(prompt, "m", 0.7, 100)
        assert base != fingerprint(prompt, "n", 0.0, 100)
        assert base != fingerprint(prompt, "m", 0.0, 101)


class TestExtractTranscript:
    """Test reply cleanup"""

    @pytest.mark.parametrize("raw,expected", [
        ("Cleaned transcript: i agree", "i agree"),
        ("<think>the uh is a filler</think>i agree", "i agree"),
        ("i agree", "i agree"),
        ("```\ni agree\n```", "i agree"),
        ("```i agree```", "i agree"),
        ("Cleaned transcript: ```i agree```", "i agree"),
        ("Here is the cleaned transcript:\n```text\ni agree\n```", "i agree"),
        ("reasoning</think>\ni agree", "i agree"),
        ("i agree <think>unfinished", "i agree"),
        ("", ""),
    ])
    def test_extract(self, raw, expected):
        assert extract_transcript(raw) == expected

    def test_custom_markers(self):
        assert extract_transcript("[R]x[/R] i agree", ("[R]", "[/R]")) == "i agree"


class TestCache:
    """Test the response cache"""

    def test_round_trip(self, tmp_path):
        cache = ResponseCache(tmp_path)
        assert cache.get("ab" * 32) is None
        cache.put("ab" * 32, {"raw_text": "i agree", "usage": {}})
        assert cache.get("ab" * 32)["raw_text"] == "i agree"
        assert cache.path_for("ab" * 32).parent.name == "ab"
        assert (cache.hits, cache.misses) == (1, 1)

    def test_unreadable_entry(self, tmp_path):
        cache = ResponseCache(tmp_path)
        path = cache.path_for("cd" * 32)
        path.parent.mkdir(parents=True)
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(CacheCorruption):
            cache.get("cd" * 32)

    def test_wrong_fingerprint(self, tmp_path):
        cache = ResponseCache(tmp_path)
        cache.put("ef" * 32, {"raw_text": "x"})
        os.replace(cache.path_for("ef" * 32), cache.path_for("ef" * 31 + "00"))
        with pytest.raises(CacheCorruption):
            cache.get("ef" * 31 + "00")

    def test_lock_pool_fixed(self, tmp_path):
        cache = ResponseCache(tmp_path)
        pool = len(cache._locks)
        for i in range(500):
            key = f"{i:064x}"
            cache.put(key, {"raw_text": str(i)})
            assert cache.get(key)["raw_text"] == str(i)
        assert len(cache._locks) == pool
        assert cache._lock("ab" * 32) is cache._lock("ab" * 32)


class TestBackends:
    """Test backend selection and the chat client"""

    @pytest.mark.parametrize("model_id,cls", [
        ("mock-echo", MockEchoBackend), ("mock-oracle", MockOracleBackend),
        ("mock-empty", MockEmptyBackend), ("mock-fillers", MockFillerBackend),
    ])
    def test_mocks(self, model_id, cls):
        assert isinstance(create_backend(EvalConfig(model_id=model_id)), cls)

    def test_unknown_mock(self):
        with pytest.raises(ConfigurationError):
            create_backend(EvalConfig(model_id="mock-nothing"))

    def test_missing_credential(self, monkeypatch):
        monkeypatch.delenv("OPENAI_API_KEY", raising=False)
        monkeypatch.delenv("OPENAI_BASE_URL", raising=False)
        with pytest.raises(ConfigurationError):
            create_backend(EvalConfig(model_id="gpt-4o"))

    def test_local_server_without_key(self, monkeypatch):
        monkeypatch.delenv("OPENAI_API_KEY", raising=False)
        backend = create_backend(EvalConfig(model_id="llama", base_url="http://localhost:8000/v1"))
        assert isinstance(backend, OpenAIChatBackend)
        assert not backend.deterministic

    def _backend(self, monkeypatch, create):
        monkeypatch.setenv("TEST_KEY", "sk-test")
        backend = OpenAIChatBackend(api_key_env="TEST_KEY")
        backend.client = SimpleNamespace(chat=SimpleNamespace(completions=SimpleNamespace(create=create)))
        return backend

    def _request(self, synth_corpus):
        unit = build_units(synth_corpus, cell())[0]
        return CompletionRequest(prompt=build_prompt(unit, [], 0, "Clean."), unit=unit,
                                 model_id="gpt-4o", temperature=0.0, max_tokens=64)

    def test_chat_reply(self, monkeypatch, synth_corpus):
        seen = {}

        def create(**kwargs):
            seen.update(kwargs)
            message = SimpleNamespace(content="i agree")
            usage = SimpleNamespace(prompt_tokens=12, completion_tokens=3)
            return SimpleNamespace(choices=[SimpleNamespace(message=message)], usage=usage)

        completion = self._backend(monkeypatch, create).complete(self._request(synth_corpus))
        assert completion.text == "i agree"
        assert completion.usage == {"prompt_tokens": 12, "completion_tokens": 3}
        assert seen["model"] == "gpt-4o"
        assert seen["max_tokens"] == 64
        assert seen["messages"][0]["role"] == "system"

    def test_connection_error_is_transient(self, monkeypatch, synth_corpus):
        def create(**kwargs):
            raise openai.APIConnectionError(request=httpx.Request("POST", "http://localhost/v1"))

        with pytest.raises(TransientBackendError):
            self._backend(monkeypatch, create).complete(self._request(synth_corpus))

    def test_no_choices(self, monkeypatch, synth_corpus):
        backend = self._backend(monkeypatch, lambda **kwargs: SimpleNamespace(choices=[], usage=None))
        with pytest.raises(BackendError):
            backend.complete(self._request(synth_corpus))


class TestRunner:
    """Test grid-cell runs"""

    def test_one_output_per_test_unit(self, synth_corpus):
        outputs = run_eval(synth_corpus, MockOracleBackend(), cell())
        assert len(outputs) == len(synth_corpus.test)
        assert [o.unit_id for o in outputs] == [u.unit_id for u in build_units(synth_corpus, cell())]
        assert all(o.latency is None for o in outputs)

    @pytest.mark.parametrize("condition", ["f", "s"])
    def test_oracle_identity(self, synth_corpus, condition):
        scored = conversation_scores(synth_corpus, MockOracleBackend(), cell(condition, 1))
        for unit in scored.conversations:
            assert unit.e.precision == unit.e.recall == unit.e.f1 == 100.0
            assert all(v == 100.0 for v in unit.z.metrics().values() if v is not None)

    @pytest.mark.parametrize("condition", ["f", "s"])
    def test_echo_identity(self, synth_corpus, condition):
        scored = conversation_scores(synth_corpus, MockEchoBackend(), cell(condition))
        for unit in scored.conversations:
            assert unit.e.recall in (0.0, None)
            assert all(v == 0.0 for v in unit.z.metrics().values() if v is not None)

    def test_empty_identity(self, synth_corpus):
        outputs = run_eval(synth_corpus, MockEmptyBackend(), cell("s"))
        by_id = {u.id: u for u in synth_corpus.utterances}
        disfluent = [o for o in outputs if by_id[o.utterance_ids[0]].disfluent_count]
        for output in random.Random(0).sample(disfluent, 20):
            (utterance,) = [by_id[uid] for uid in output.utterance_ids]
            mask = scope_mask(utterance.disfluent, Scope.WORDS)
            words = [tag for tag, keep in zip(utterance.tags, mask) if keep]
            expected = 100.0 * sum(t.is_disfluent for t in words) / len(words)
            unit_score = score_output(output, [utterance])
            assert unit_score.e.recall == 100.0
            assert unit_score.e.precision == pytest.approx(expected, abs=0.01)

    def test_filler_baseline_drops_fillers(self, synth_corpus):
        outputs = run_eval(synth_corpus, MockFillerBackend(), cell("s"))
        for output in outputs:
            assert not FILLER_WORDS & {w.lower() for w in output.transcript.split()}

    def test_warm_cache(self, synth_corpus, tmp_path):
        cache = ResponseCache(tmp_path / "cache")
        cold = CountingBackend()
        first = run_eval(synth_corpus, cold, cell(), cache)
        assert cold.calls == len(first)
        warm = CountingBackend()
        second = run_eval(synth_corpus, warm, cell(), ResponseCache(tmp_path / "cache"))
        assert warm.calls == 0
        assert [o.to_record() for o in second] == [o.to_record() for o in first]

    def test_cache_keyed_by_settings(self, synth_corpus, tmp_path):
        cache = ResponseCache(tmp_path / "cache")
        run_eval(synth_corpus, CountingBackend(), cell(), cache)
        backend = CountingBackend()
        run_eval(synth_corpus, backend, cell(temperature=0.5), cache)
        assert backend.calls == len(synth_corpus.test)

    def test_transient_failures_retried(self, synth_corpus):
        backend = FlakyBackend(failures=2)
        runner = EvalRunner(backend, cell(max_retries=4))
        outputs = runner.run(synth_corpus)
        assert all(o.ok for o in outputs)
        assert runner.stats.retries == 2 * len(outputs)
        assert runner.stats.backend_calls == 3 * len(outputs)

    def test_retries_exhausted(self, synth_corpus):
        backend = FlakyBackend(failures=10)
        runner = EvalRunner(backend, cell(max_retries=3))
        outputs = runner.run(synth_corpus)
        assert all(o.error.startswith("BackendUnreachable") for o in outputs)
        assert all(o.transcript == "" for o in outputs)
        assert set(backend.attempts.values()) == {3}
        assert runner.stats.failures == len(outputs)
        scored = score_outputs(synth_corpus, outputs)
        assert scored.excluded == len(outputs)
        assert scored.conversations == []

    def test_permanent_error_not_retried(self, synth_corpus):
        backend = FlakyBackend(failures=10, error=BackendError)
        outputs = EvalRunner(backend, cell()).run(synth_corpus)
        assert all(o.error.startswith("BackendError") for o in outputs)
        assert set(backend.attempts.values()) == {1}

    def test_context_guard(self, synth_corpus):
        backend = CountingBackend()
        outputs = run_eval(synth_corpus, backend, cell(context_length=5))
        assert backend.calls == 0
        assert all(o.error.startswith("ContextOverflow") for o in outputs)

    def test_insufficient_exemplars(self):
        corpus = synthesize_corpus(20, seed=1, utterances_per_conversation=10)
        with pytest.raises(InsufficientExemplars):
            run_eval(corpus, MockOracleBackend(), cell(shots=50))

    def test_no_leakage(self, synth_corpus):
        backend = RecordingBackend()
        run_eval(synth_corpus, backend, cell("s", 5))
        train = {(u.disfluent_text, u.fluent_text) for u in synth_corpus.train}
        assert set(synth_corpus.conversation_ids(Split.TRAIN)).isdisjoint(synth_corpus.conversation_ids(Split.TEST))
        for prompt in backend.prompts:
            turns = prompt.messages[1:-1]
            pairs = [(turns[i]["content"], turns[i + 1]["content"]) for i in range(0, len(turns), 2)]
            assert len(pairs) == 5
            assert set(pairs) <= train

    def test_deterministic(self, synth_corpus):
        a = run_eval(synth_corpus, MockFillerBackend(), cell("f", 3, concurrency=8))
        b = run_eval(synth_corpus, MockFillerBackend(), cell("f", 3, concurrency=1))
        assert [o.to_record() for o in a] == [o.to_record() for o in b]


class TestStore:
    """Test the per-cell output store"""

    def test_save_and_load(self, synth_corpus, tmp_path):
        config = cell("f", 1, model_id="org/model:v1")
        outputs = run_eval(synth_corpus, MockOracleBackend(), config)
        directory = save_cell(tmp_path, config, outputs)
        assert directory == tmp_path / "org_model_v1" / "f_k1"
        ((info, path, loaded),) = list(load_cells(tmp_path))
        assert info.model_id == "org/model:v1"
        assert info.cell_name == "f_k1"
        assert info.failures == 0
        assert [o.to_record() for o in loaded] == [o.to_record() for o in outputs]
        records = [json.loads(line) for line in (path / "outputs.jsonl").read_text(encoding="utf-8").splitlines()]
        assert records[0]["unit_id"] == outputs[0].unit_id


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
