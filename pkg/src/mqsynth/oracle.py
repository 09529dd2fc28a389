"""Labeling authorities: a simulated expert and the human-answer queue.

The simulated expert is a bag-of-words logistic regression trained on the
entire dataset (vocabulary from the full corpus, binary word presence),
standing in for a human labeler in batch experiments. Its 5-fold
cross-validation accuracy is computed at training time so users can judge
oracle quality. Human answers arrive through a pending-query queue with
idempotent, conflict-checked resolution.
"""

import random
from dataclasses import dataclass

import numpy as np

from .kernels import logreg_fit, predict_proba_batch, sigmoid_numpy
from .textspace import PUNCT, SentenceInstance, tokenize

SOURCE_SIMULATED = "simulated"
SOURCE_HUMAN = "human"


class LabelConflictError(ValueError):
    """A pending query was re-resolved with a different label."""


@dataclass(frozen=True)
class OracleAnswer:
    label: int
    source: str
    confidence: float | None = None  # simulated answers only


@dataclass(frozen=True)
class BowOracleModel:
    vocabulary: dict[str, int]
    weights: np.ndarray
    bias: float
    cv_accuracy: float

    def score(self, s: SentenceInstance) -> float:
        """P(positive) under the oracle; OOV-only sentences get the bias-only score."""
        z = self.bias
        seen = set()
        for tok in s.tokens:
            if tok.pos == PUNCT:
                continue
            idx = self.vocabulary.get(tok.normalized)
            if idx is not None and idx not in seen:
                seen.add(idx)
                z += float(self.weights[idx])
        return float(sigmoid_numpy(np.asarray([z]))[0])


def _bow_words(text: str) -> set[str]:
    return {
        tok.normalized for tok in tokenize(text) if tok.pos != PUNCT
    }


def _bow_matrix(texts, vocabulary) -> np.ndarray:
    X = np.zeros((len(texts), len(vocabulary)), dtype=np.float64)
    for i, text in enumerate(texts):
        for w in _bow_words(text):
            idx = vocabulary.get(w)
            if idx is not None:
                X[i, idx] = 1.0
        # leave all-OOV rows as zero; the bias carries them
    return X


def train_simulated_oracle(
    records,
    seed: int = 0,
    learning_rate: float = 0.5,
    l2: float = 1e-4,
    max_epochs: int = 600,
    tolerance: float = 1e-6,
    cv_folds: int = 5,
) -> BowOracleModel:
    """Train the full-data BOW expert; records are (text, label) pairs.

    Deterministic given records and seed (the seed only shuffles the
    cross-validation folds). Raises ValueError on a single-class dataset.
    """
    records = list(records)
    texts = [t for t, _ in records]
    y = np.asarray([float(lbl) for _, lbl in records], dtype=np.float64)
    if len(set(int(v) for v in y)) < 2:
        raise ValueError("simulated oracle needs both classes in the dataset")
    vocab_words = sorted({w for t in texts for w in _bow_words(t)})
    vocabulary = {w: i for i, w in enumerate(vocab_words)}
    X = _bow_matrix(texts, vocabulary)

    # Cross-validation accuracy on shuffled folds, then a final fit on everything.
    idx = list(range(len(records)))
    random.Random(seed).shuffle(idx)
    folds = [idx[f::cv_folds] for f in range(cv_folds)]
    correct = 0
    for f in range(cv_folds):
        test_ids = folds[f]
        train_ids = [i for g in range(cv_folds) if g != f for i in folds[g]]
        if len(set(y[train_ids].astype(int))) < 2 or not test_ids:
            continue
        w, b, _, _ = logreg_fit(
            np.ascontiguousarray(X[train_ids]), y[train_ids],
            learning_rate, l2, max_epochs, tolerance,
        )
        p = predict_proba_batch(np.ascontiguousarray(X[test_ids]), w, b)
        correct += int(np.sum((p >= 0.5).astype(int) == y[test_ids].astype(int)))
    cv_accuracy = correct / len(records)

    w, b, _, _ = logreg_fit(X, y, learning_rate, l2, max_epochs, tolerance)
    return BowOracleModel(
        vocabulary=vocabulary,
        weights=np.asarray(w, dtype=np.float64),
        bias=float(b),
        cv_accuracy=float(cv_accuracy),
    )


def oracle_label(model: BowOracleModel, s: SentenceInstance) -> OracleAnswer:
    """Label a sentence with the simulated expert (p >= 0.5 labels positive)."""
    p = model.score(s)
    label = 1 if p >= 0.5 else 0
    return OracleAnswer(label=label, source=SOURCE_SIMULATED, confidence=abs(2.0 * p - 1.0))


class HumanOracleQueue:
    """Pending human queries for one session; resolutions are idempotent.

    Enqueueing the same instance twice returns the existing handle. Resolving
    a handle twice with the same label is a no-op; a different label raises
    LabelConflictError and the first answer stands.
    """

    def __init__(self):
        self._queue: dict[str, SentenceInstance] = {}
        self._answers: dict[str, OracleAnswer] = {}

    def enqueue(self, s: SentenceInstance) -> str:
        if s.id not in self._queue:
            self._queue[s.id] = s
        return s.id

    def pending(self) -> list[SentenceInstance]:
        return [s for hid, s in self._queue.items() if hid not in self._answers]

    def instance(self, handle: str) -> SentenceInstance:
        if handle not in self._queue:
            raise KeyError(f"unknown query handle {handle!r}")
        return self._queue[handle]

    def resolve(self, handle: str, label: int) -> OracleAnswer:
        if handle not in self._queue:
            raise KeyError(f"unknown query handle {handle!r}")
        if label not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {label!r}")
        prior = self._answers.get(handle)
        if prior is not None:
            if prior.label != label:
                raise LabelConflictError(
                    f"query {handle!r} already resolved with label {prior.label}"
                )
            return prior
        answer = OracleAnswer(label=label, source=SOURCE_HUMAN)
        self._answers[handle] = answer
        return answer

    def resolved(self) -> dict[str, OracleAnswer]:
        return dict(self._answers)
