import random

import numpy as np
import pytest

from stixpipe.ttp import (
    Label,
    LabelSpace,
    TfidfModel,
    TrainError,
    default_label_space,
    load_corpus,
    micro_f1,
    predict,
    predictions_to_mentions,
    train,
)

TINY_SPACE = LabelSpace((
    Label("T0001", "Alpha Technique", "attack-pattern"),
    Label("TA0099", "Beta Tactic", "x-mitre-tactic"),
))

TINY_CORPUS = [
    ("alpha keywords about lateral tooling", ["T0001"]),
    ("beta words covering spearphish waves", ["TA0099"]),
    ("more alpha keywords tooling lateral", ["T0001"]),
    ("extra beta spearphish waves words", ["TA0099"]),
]


def split_corpus(corpus, seed=7, frac=0.8):
    rng = random.Random(seed)
    idx = list(range(len(corpus)))
    rng.shuffle(idx)
    cut = int(len(corpus) * frac)
    return [corpus[i] for i in idx[:cut]], [corpus[i] for i in idx[cut:]]


class TestTrain:
    def test_separable_corpus_memorized(self):
        model = train(TINY_CORPUS, TINY_SPACE)
        for text, labels in TINY_CORPUS:
            assert [l for l, _ in predict(model, text)] == labels

    def test_unknown_label_rejected(self):
        with pytest.raises(TrainError):
            train([("text", ["NOPE"])], TINY_SPACE)

    def test_empty_corpus_rejected(self):
        with pytest.raises(TrainError):
            train([], TINY_SPACE)

    def test_zero_positive_label_never_fires(self):
        model = train(TINY_CORPUS[:2], LabelSpace(TINY_SPACE.labels + (
            Label("T9999", "Unused", "attack-pattern"),)))
        for text, _ in TINY_CORPUS:
            assert all(l != "T9999" for l, _ in predict(model, text))
            scores = dict(predict(model, text, threshold=0.0))
            assert scores.get("T9999", 0.0) < 1e-6

    def test_bit_deterministic(self):
        corpus = load_corpus()[:60]
        m1 = train(corpus)
        m2 = train(corpus)
        assert np.array_equal(m1.weights, m2.weights)
        assert np.array_equal(m1.bias, m2.bias)
        assert m1.vocabulary == m2.vocabulary


class TestPredict:
    def test_empty_text(self):
        model = train(TINY_CORPUS, TINY_SPACE)
        assert predict(model, "") == []
        assert predict(model, "   ") == []

    def test_threshold_above_one_empty(self):
        model = train(TINY_CORPUS, TINY_SPACE)
        for text, _ in TINY_CORPUS:
            assert predict(model, text, threshold=1.01) == []

    def test_scores_sorted_descending(self):
        corpus = load_corpus()
        model = train(corpus[:150])
        for text, _ in corpus[150:170]:
            scores = [s for _, s in predict(model, text, threshold=0.0)]
            assert scores == sorted(scores, reverse=True)

    def test_duplication_invariance(self):
        model = train(TINY_CORPUS, TINY_SPACE)
        text = TINY_CORPUS[0][0]
        single = predict(model, text, threshold=0.0)
        double = predict(model, text + " " + text, threshold=0.0)
        for (l1, s1), (l2, s2) in zip(single, double):
            assert l1 == l2
            assert abs(s1 - s2) < 1e-9

    def test_mentions_have_no_span(self):
        model = train(TINY_CORPUS, TINY_SPACE)
        preds = predict(model, TINY_CORPUS[0][0])
        mentions = predictions_to_mentions(model, preds)
        assert mentions and all(m.span is None and m.provenance == "ttp" for m in mentions)
        assert mentions[0].stix_type == "attack-pattern"
        assert mentions[0].surface == "Alpha Technique"


class TestToyCorpusGate:
    def test_micro_f1_on_heldout(self):
        corpus = load_corpus()
        assert len(corpus) >= 200
        space = default_label_space()
        assert len(space.labels) == 10
        train_set, test_set = split_corpus(corpus)
        model = train(train_set, space)
        pairs = [(set(labels), {l for l, _ in predict(model, text)})
                 for text, labels in test_set]
        assert micro_f1(pairs) >= 0.8


class TestPersistence:
    def test_save_load_round_trip(self, tmp_path):
        model = train(TINY_CORPUS, TINY_SPACE)
        p = tmp_path / "model.json"
        model.save(str(p))
        loaded = TfidfModel.load(str(p))
        assert np.array_equal(loaded.weights, model.weights)
        assert np.array_equal(loaded.idf, model.idf)
        assert loaded.vocabulary == model.vocabulary
        for text, _ in TINY_CORPUS:
            assert predict(loaded, text) == predict(model, text)


def test_micro_f1_helper():
    assert micro_f1([({"a"}, {"a"})]) == 1.0
    assert micro_f1([({"a"}, set())]) == 0.0
    assert micro_f1([({"a", "b"}, {"a", "c"})]) == pytest.approx(0.5)
