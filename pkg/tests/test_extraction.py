"""Unit tests for utterance tuples, corpora and synthetic disfluencies."""

import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

import json
import random

import pytest

from core import (
    NodeClass, ParseTree, make_leaf, parse_trees, reindex, render, classify_node,
    EmptyInput, InvalidRate, CorpusFormatError,
)
from extraction import (
    TokenTag, TAG_FOR_CLASS, extract_tuple, tag_tokens, Split, CorpusConfig, build_corpus,
    split_conversations, to_record, from_record, save_corpus, load_corpus,
    DisfluencyRates, SentenceGenerator, inject_disfluencies, is_recoverable, synthesize_corpus,
)

F, E, I, P = TokenTag.FLUENT, TokenTag.E, TokenTag.I, TokenTag.P


def surfaces(tokens):
    return [t.surface for t in tokens]


def one(source):
    (tree,) = parse_trees(source)
    return tree


def first_disfluent_ancestor_tags(tree):
    """Walk every root-to-leaf path and take the first disfluent label from the top"""
    tags = []

    def walk(node, path):
        path = path + [node.label]
        if node.is_leaf:
            classes = [classify_node(label) for label in path]
            first = next((c for c in classes if c is not NodeClass.FLUENT), NodeClass.FLUENT)
            tags.append(TAG_FOR_CLASS[first])
            return
        for child in node.children:
            walk(child, path)

    walk(tree, [])
    return tags


def random_tree(rng, depth=4):
    if depth == 0 or rng.random() < 0.3:
        return make_leaf(rng.choice(["NN", "UH", "PRP", "VBP", "."]), rng.choice(["uh", "i", "go", "the", "."]))
    label = rng.choice(["S", "NP", "VP", "EDITED", "INTJ", "PRN", "PRN-1", "EDITED=2", "SBAR"])
    children = tuple(random_tree(rng, depth - 1) for _ in range(rng.randint(1, 3)))
    return ParseTree(label, children)


class TestExtractTuple:
    """Test top-down tagging"""

    def test_single_intj(self):
        u = extract_tuple(one("(S (INTJ (UH uh)) (NP (PRP i)) (VP (VBP agree)))"))
        assert surfaces(u.disfluent) == ["uh", "i", "agree"]
        assert list(u.tags) == [I, F, F]
        assert surfaces(u.fluent) == ["i", "agree"]

    def test_edited_and_prn(self):
        tree = one("(S (EDITED (NP (PRP i))) (NP (PRP i)) (VP (VBP think) "
                   "(PRN (S (PRP you) (VBP know))) (SBAR (S (NP (PRP it)) (VP (VBZ works))))))")
        u = extract_tuple(tree)
        assert list(u.tags) == [E, F, F, P, P, F, F]
        assert surfaces(u.fluent) == ["i", "think", "it", "works"]

    def test_nested_takes_outermost(self):
        u = extract_tuple(one("(EDITED (S (INTJ (UH uh)) (NP (PRP i))))"))
        assert list(u.tags) == [E, E]
        assert u.fluent == ()

    def test_fluent_tree_unchanged(self):
        u = extract_tuple(one("(S (NP (PRP i)) (VP (VBP agree)) (. .))"))
        assert u.fluent == u.disfluent
        assert u.disfluent_count == 0

    def test_punctuation_and_partial_words_tagged_like_terminals(self):
        u = extract_tuple(one("(S (EDITED (VBP th-) (, ,)) (VP (VBP think)) (. .))"))
        assert list(u.tags) == [E, E, F, F]
        assert surfaces(u.fluent) == ["think", "."]

    def test_ids(self):
        tree = one("(S (UH yeah))")
        assert extract_tuple(tree, conversation_id="sw2005", ordinal=3).id == "sw2005_0003"
        u = extract_tuple(tree, utterance_id="sw_4617_0012")
        assert u.conversation_id == "sw_4617"
        assert u.ordinal == 12

    def test_tag_alphabet(self):
        assert [t.value for t in TokenTag] == ["F", "E", "I", "P"]


class TestExtractionOracle:
    """Compare tagging with a brute-force ancestor walk"""

    def test_thousand_random_trees(self):
        rng = random.Random(2024)
        for _ in range(1000):
            tree = reindex(random_tree(rng))
            tokens, tags = tag_tokens(tree)
            assert tags == first_disfluent_ancestor_tags(tree)
            u = extract_tuple(tree)
            assert len(u.tags) == len(u.disfluent)
            assert u.disfluent_count == len(u.disfluent) - len(u.fluent)
            it = iter(u.disfluent)
            assert all(any(t is d for d in it) for t in u.fluent)

    def test_synthetic_corpus_trees(self, synth_corpus):
        for u in synth_corpus.utterances:
            assert list(u.tags) == first_disfluent_ancestor_tags(u.tree)


class TestInjector:
    """Test synthetic disfluency injection"""

    def test_zero_rates(self):
        u = inject_disfluencies(["i", "agree"], seed=1, rates=DisfluencyRates.zero())
        assert u.fluent == u.disfluent
        assert all(tag is F for tag in u.tags)

    def test_forced_intj(self):
        u = inject_disfluencies(["i", "agree"], seed=1, rates=DisfluencyRates(edited=0.0, intj=1.0, prn=0.0))
        assert I in u.tags
        assert surfaces(u.fluent) == ["i", "agree"]
        assert all(t.surface in ("uh", "um") for t, tag in zip(u.disfluent, u.tags) if tag is I)

    def test_forced_prn(self):
        u = inject_disfluencies(["we", "agree"], seed=3, rates=DisfluencyRates(edited=0.0, intj=0.0, prn=1.0))
        words = [t.surface for t, tag in zip(u.disfluent, u.tags) if tag is P]
        assert len(words) == 4
        assert {tuple(words[:2]), tuple(words[2:])} <= {("you", "know"), ("i", "mean")}
        assert surfaces(u.fluent) == ["we", "agree"]

    def test_deterministic(self):
        sentence = SentenceGenerator(5).sentence()
        a = inject_disfluencies(sentence, seed=11)
        b = inject_disfluencies(sentence, seed=11)
        assert a == b
        assert render(a.tree) == render(b.tree)

    def test_round_trip(self):
        generator = SentenceGenerator(0)
        rates = DisfluencyRates(edited=0.3, intj=0.3, prn=0.2)
        for seed in range(300):
            u = inject_disfluencies(generator.sentence(), seed=seed, rates=rates, ordinal=seed)
            assert extract_tuple(u.tree, conversation_id=u.conversation_id, ordinal=u.ordinal) == u
            assert is_recoverable(u.disfluent, u.tags)

    def test_edited_duplicates_following_span(self):
        rates = DisfluencyRates(edited=1.0, intj=0.0, prn=0.0)
        u = inject_disfluencies(["we", "like", "the", "dog"], seed=4, rates=rates)
        for node in u.tree.subtrees():
            if node.node_class is NodeClass.EDITED:
                start, end = node.span
                reparandum = surfaces(u.disfluent[start:end])
                following = [t.surface for t, tag in zip(u.disfluent[end:], u.tags[end:]) if tag is F]
                assert following[:len(reparandum)] == reparandum

    def test_invalid_rate(self):
        with pytest.raises(InvalidRate):
            DisfluencyRates(intj=1.5)
        with pytest.raises(InvalidRate):
            DisfluencyRates(edited=-0.1)

    def test_empty_sentence(self):
        with pytest.raises(EmptyInput):
            inject_disfluencies([], seed=0)


class TestSynthesizeCorpus:
    """Test whole synthetic corpora"""

    def test_size_and_grouping(self, synth_corpus):
        assert len(synth_corpus) == 200
        assert all(len(conv) <= 10 for conv in synth_corpus.conversations.values())
        assert synth_corpus.train and synth_corpus.test

    def test_reproducible(self):
        a = synthesize_corpus(50, seed=7)
        b = synthesize_corpus(50, seed=7)
        assert [to_record(u) for u in a.utterances] == [to_record(u) for u in b.utterances]
        assert a.split == b.split

    def test_zero_rates_all_fluent(self):
        corpus = synthesize_corpus(30, seed=1, rates=DisfluencyRates.zero())
        assert all(u.disfluent_count == 0 for u in corpus.utterances)

    def test_conversations_recoverable(self, synth_corpus):
        for conversation in synth_corpus.conversations.values():
            tokens = [t for u in conversation for t in u.disfluent]
            tags = [t for u in conversation for t in u.tags]
            assert is_recoverable(tokens, tags)

    def test_has_every_class(self, synth_corpus):
        tags = {tag for u in synth_corpus.utterances for tag in u.tags}
        assert tags == {F, E, I, P}


class TestCorpus:
    """Test corpus build, split and files"""

    def _pairs(self, conversations=4, per_conversation=3):
        tree = one("(S (INTJ (UH uh)) (NP (PRP i)) (VP (VBP agree)))")
        return [(f"sw{c:04d}", tree) for c in range(conversations) for _ in range(per_conversation)]

    def test_split_half(self):
        corpus = build_corpus(self._pairs(), CorpusConfig(train_fraction=0.5, seed=7))
        assert len(corpus.conversation_ids(Split.TRAIN)) == 2
        assert len(corpus.conversation_ids(Split.TEST)) == 2
        again = build_corpus(self._pairs(), CorpusConfig(train_fraction=0.5, seed=7))
        assert corpus.split == again.split

    def test_split_is_by_conversation(self):
        corpus = build_corpus(self._pairs(), CorpusConfig(seed=3))
        train_ids = {u.conversation_id for u in corpus.train}
        test_ids = {u.conversation_id for u in corpus.test}
        assert not train_ids & test_ids
        assert len(corpus.train) + len(corpus.test) == len(corpus)

    def test_seed_changes_split_not_content(self):
        a = build_corpus(self._pairs(8), CorpusConfig(seed=1))
        b = build_corpus(self._pairs(8), CorpusConfig(seed=2))
        assert [to_record(u) for u in a.utterances] == [to_record(u) for u in b.utterances]

    def test_split_both_sides_nonempty(self):
        split = split_conversations(["a", "b", "c"], 0.1, seed=0)
        assert Split.TRAIN in split.values() and Split.TEST in split.values()

    def test_single_tree(self):
        corpus = build_corpus([one("(S (UH yeah))")])
        assert len(corpus) == 1
        assert corpus.utterances[0].id == "conv_0000"

    def test_ordinals_per_conversation(self):
        corpus = build_corpus(self._pairs(2, 2))
        assert [u.id for u in corpus.utterances] == ["sw0000_0000", "sw0000_0001", "sw0001_0000", "sw0001_0001"]

    def test_drop_none(self):
        tree = one("(S (NP-SBJ (-NONE- *)) (INTJ (UH uh)) (VP (VBP go)))")
        dropped = build_corpus([tree])
        kept = build_corpus([tree], CorpusConfig(drop_none=False))
        assert surfaces(dropped.utterances[0].disfluent) == ["uh", "go"]
        assert surfaces(kept.utterances[0].disfluent) == ["*", "uh", "go"]

    SWITCHBOARD = (
        "*x*                                                                     *x*\n"
        "*x*            Copyright (C) 1995 University of Pennsylvania            *x*\n"
        "( (CODE (SYM SpeakerA1) (. .) ))\n"
        "( (S\n"
        "    (EDITED\n"
        "      (RM (-DFL- \\[) )\n"
        "      (NP-SBJ (PRP I) )\n"
        "      (, ,)\n"
        "      (IP (-DFL- \\+) ))\n"
        "    (NP-SBJ (PRP I) )\n"
        "    (VP (VBP agree) )\n"
        "    (RS (-DFL- \\]) )\n"
        "    (. .) (-DFL- E_S) ))\n"
    )

    def test_switchboard_markup_removed(self):
        corpus = build_corpus([("sw2005", tree) for tree in parse_trees(self.SWITCHBOARD)])
        (utterance,) = corpus.utterances
        assert surfaces(utterance.disfluent) == ["I", ",", "I", "agree", "."]
        assert list(utterance.tags) == [E, E, F, F, F]
        assert utterance.fluent_text == "I agree ."
        assert [t.index for t in utterance.disfluent] == [0, 1, 2, 3, 4]

    def test_switchboard_markup_kept_on_request(self):
        trees = [("sw2005", tree) for tree in parse_trees(self.SWITCHBOARD)]
        corpus = build_corpus(trees, CorpusConfig(drop_markup=False, skip_speaker_turns=False))
        speaker, utterance = corpus.utterances
        assert speaker.disfluent_text == "SpeakerA1 ."
        assert surfaces(utterance.disfluent)[:2] == ["\\[", "I"]
        assert "E_S" in surfaces(utterance.disfluent)

    def test_empty_input(self):
        with pytest.raises(EmptyInput):
            build_corpus([])
        with pytest.raises(EmptyInput):
            build_corpus([one("(S (-NONE- *))")])

    def test_record_fields(self):
        u = extract_tuple(one("(S (INTJ (UH uh)) (NP (PRP i)) (VP (VBP agree)))"), conversation_id="sw1")
        record = to_record(u, Split.TEST)
        assert record["id"] == "sw1_0000"
        assert record["disfluent"] == ["uh", "i", "agree"]
        assert record["tags"] == ["I", "F", "F"]
        assert record["fluent"] == ["i", "agree"]
        assert record["split"] == "test"

    def test_save_and_load(self, tmp_path, synth_corpus):
        path = tmp_path / "corpus.jsonl"
        save_corpus(synth_corpus, path)
        loaded = load_corpus(path)
        assert [to_record(u) for u in loaded.utterances] == [to_record(u) for u in synth_corpus.utterances]
        assert loaded.split == synth_corpus.split

    def test_load_rejects_inconsistent_tags(self, tmp_path):
        u = extract_tuple(one("(S (INTJ (UH uh)) (NP (PRP i)))"))
        record = to_record(u)
        record["tags"] = ["F", "F"]
        path = tmp_path / "bad.jsonl"
        path.write_text(json.dumps(record) + "\n", encoding="utf-8")
        with pytest.raises(CorpusFormatError):
            load_corpus(path)

    def test_load_rejects_missing_tree(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text(json.dumps({"id": "a_0000", "disfluent": ["x"]}) + "\n", encoding="utf-8")
        with pytest.raises(CorpusFormatError):
            load_corpus(path)

    def test_load_without_split_is_test(self, tmp_path):
        u = extract_tuple(one("(S (UH yeah))"))
        path = tmp_path / "c.jsonl"
        path.write_text(json.dumps(to_record(u)) + "\n", encoding="utf-8")
        assert load_corpus(path).split == {"conv": Split.TEST}


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
