"""Multi-label TTP classification of report text.

TF-IDF over lowercased word unigrams and bigrams feeds one-vs-rest logistic
regression trained by full-batch gradient descent. Everything is written
against plain numpy with zero-initialized weights, so training is exactly
reproducible run to run.
"""

from __future__ import annotations

import json
import logging
import math
import re
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .matcher import EntityMention

log = logging.getLogger(__name__)

_TOKEN_RE = re.compile(r"[a-z0-9][a-z0-9'-]*")

LEARNING_RATE = 4.0
MAX_EPOCHS = 400
L2_PENALTY = 1e-4
CONVERGENCE_TOL = 1e-6
_NEVER = -100.0  # bias for labels with no positive examples


class TrainError(ValueError):
    pass


@dataclass(frozen=True)
class Label:
    id: str
    name: str
    stix_type: str


@dataclass(frozen=True)
class LabelSpace:
    labels: tuple[Label, ...]

    def __post_init__(self):
        ids = [l.id for l in self.labels]
        if len(ids) != len(set(ids)):
            raise ValueError("duplicate label ids")

    def ids(self) -> list[str]:
        return [l.id for l in self.labels]

    def by_id(self, label_id: str) -> Label:
        for l in self.labels:
            if l.id == label_id:
                return l
        raise KeyError(label_id)


def default_label_space() -> LabelSpace:
    text = resources.files("stixpipe.data").joinpath("ttp_labels.json").read_text("utf-8")
    raw = json.loads(text)
    return LabelSpace(tuple(Label(l["id"], l["name"], l["stix_type"]) for l in raw["labels"]))


def load_corpus(path: str | None = None) -> list[tuple[str, list[str]]]:
    """JSONL corpus of {"text", "labels"} records (bundled toy corpus by default)."""
    if path is None:
        text = resources.files("stixpipe.data").joinpath("ttp_corpus.jsonl").read_text("utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    corpus = []
    for line in text.splitlines():
        if not line.strip():
            continue
        rec = json.loads(line)
        corpus.append((rec["text"], list(rec["labels"])))
    return corpus


def _terms(text: str) -> list[str]:
    words = _TOKEN_RE.findall(text.lower())
    return words + [f"{a} {b}" for a, b in zip(words, words[1:])]


@dataclass
class TfidfModel:
    space: LabelSpace
    vocabulary: dict[str, int]
    idf: np.ndarray
    weights: np.ndarray  # (n_labels, n_terms)
    bias: np.ndarray     # (n_labels,)

    def vectorize(self, text: str) -> np.ndarray:
        vec = np.zeros(len(self.vocabulary), dtype=np.float64)
        for term in _terms(text):
            idx = self.vocabulary.get(term)
            if idx is not None:
                vec[idx] += 1.0
        vec *= self.idf
        norm = np.linalg.norm(vec)
        return vec / norm if norm > 0 else vec

    def save(self, path: str) -> None:
        payload = {
            "version": 1,
            "labels": [{"id": l.id, "name": l.name, "stix_type": l.stix_type}
                       for l in self.space.labels],
            "vocabulary": self.vocabulary,
            "idf": self.idf.tolist(),
            "weights": self.weights.tolist(),
            "bias": self.bias.tolist(),
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh)

    @classmethod
    def load(cls, path: str) -> "TfidfModel":
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        space = LabelSpace(tuple(Label(l["id"], l["name"], l["stix_type"])
                                 for l in raw["labels"]))
        return cls(
            space=space,
            vocabulary={k: int(v) for k, v in raw["vocabulary"].items()},
            idf=np.array(raw["idf"], dtype=np.float64),
            weights=np.array(raw["weights"], dtype=np.float64),
            bias=np.array(raw["bias"], dtype=np.float64),
        )


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def train(corpus: list[tuple[str, list[str]]], space: LabelSpace | None = None) -> TfidfModel:
    """Fit TF-IDF + one-vs-rest logistic regression.

    idf = ln((1+N)/(1+df)) + 1 with L2-normalized document rows; weights start
    at zero and take full-batch gradient steps until the update norm falls
    under tolerance or the epoch cap is hit. Deterministic by construction.
    """
    space = space or default_label_space()
    if not corpus:
        raise TrainError("empty corpus")
    known = set(space.ids())
    for _, labels in corpus:
        bad = set(labels) - known
        if bad:
            raise TrainError(f"unknown label ids in corpus: {sorted(bad)}")

    docs = [_terms(text) for text, _ in corpus]
    n_docs = len(docs)
    df: dict[str, int] = {}
    for terms in docs:
        for term in set(terms):
            df[term] = df.get(term, 0) + 1
    vocabulary = {term: i for i, term in enumerate(sorted(df))}
    idf = np.array([math.log((1 + n_docs) / (1 + df[t])) + 1.0 for t in sorted(df)],
                   dtype=np.float64)

    x = np.zeros((n_docs, len(vocabulary)), dtype=np.float64)
    for row, terms in enumerate(docs):
        for term in terms:
            x[row, vocabulary[term]] += 1.0
    x *= idf
    norms = np.linalg.norm(x, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    x /= norms

    label_ids = space.ids()
    y = np.zeros((n_docs, len(label_ids)), dtype=np.float64)
    for row, (_, labels) in enumerate(corpus):
        for lab in labels:
            y[row, label_ids.index(lab)] = 1.0

    weights = np.zeros((len(label_ids), len(vocabulary)), dtype=np.float64)
    bias = np.zeros(len(label_ids), dtype=np.float64)
    for li, lab in enumerate(label_ids):
        yl = y[:, li]
        if yl.sum() == 0:
            log.warning("label %s has no positive examples; it will never fire", lab)
            bias[li] = _NEVER
            continue
        w = np.zeros(len(vocabulary), dtype=np.float64)
        b = 0.0
        for _ in range(MAX_EPOCHS):
            p = _sigmoid(x @ w + b)
            err = p - yl
            grad_w = x.T @ err / n_docs + L2_PENALTY * w
            grad_b = float(err.mean())
            w -= LEARNING_RATE * grad_w
            b -= LEARNING_RATE * grad_b
            if max(np.abs(grad_w).max(), abs(grad_b)) < CONVERGENCE_TOL:
                break
        weights[li] = w
        bias[li] = b

    return TfidfModel(space=space, vocabulary=vocabulary, idf=idf,
                      weights=weights, bias=bias)


def predict(model: TfidfModel, text: str, threshold: float = 0.5) -> list[tuple[str, float]]:
    """(label_id, score) pairs with score >= threshold, best first."""
    if not text.strip():
        return []
    vec = model.vectorize(text)
    scores = _sigmoid(model.weights @ vec + model.bias)
    out = [(lab, float(s)) for lab, s in zip(model.space.ids(), scores) if s >= threshold]
    out.sort(key=lambda p: (-p[1], p[0]))
    return out


def predictions_to_mentions(model: TfidfModel, preds: list[tuple[str, float]]
                            ) -> list[EntityMention]:
    """Document-level mentions (no span) for predicted tactic/technique labels."""
    out = []
    for label_id, score in preds:
        label = model.space.by_id(label_id)
        out.append(EntityMention(
            surface=label.name, span=None, stix_type=label.stix_type,
            provenance="ttp", confidence=min(score, 1.0),
        ))
    return out


def micro_f1(pairs: list[tuple[set[str], set[str]]]) -> float:
    """Micro-averaged F1 over (gold, predicted) label-set pairs."""
    tp = fp = fn = 0
    for gold, pred in pairs:
        tp += len(gold & pred)
        fp += len(pred - gold)
        fn += len(gold - pred)
    if tp == 0:
        return 0.0
    precision = tp / (tp + fp)
    recall = tp / (tp + fn)
    return 2 * precision * recall / (precision + recall)
