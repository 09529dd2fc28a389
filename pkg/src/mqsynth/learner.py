"""The active learner: mean-embedding features, logistic regression, uncertainty.

Feature vectors are the arithmetic mean of the in-vocabulary word vectors of
a sentence (punctuation excluded; zero vector when nothing is in vocabulary).
The model is L2-regularized logistic regression trained by deterministic
full-batch gradient descent from zero weights. Uncertainty is the margin form
1 - |2p - 1|: 1 at p = 0.5, 0 at full confidence.
"""

from dataclasses import dataclass

import numpy as np

from .embeddings import EmbeddingTable
from .kernels import logreg_fit, predict_proba_batch, sigmoid_numpy
from .textspace import PUNCT, SentenceInstance

_CHECKPOINT_MAGIC = "MQSYNTH-MODEL v1"

# Bias clamp for the degenerate single-class model.
_PRIOR_LOGIT_CLAMP = 10.0


@dataclass(frozen=True)
class TrainingMeta:
    epochs_run: int
    final_grad_norm: float
    l2: float


@dataclass(frozen=True)
class LinearModel:
    weights: np.ndarray
    bias: float
    meta: TrainingMeta

    @property
    def dimension(self) -> int:
        return int(self.weights.shape[0])


@dataclass(frozen=True)
class TrainParams:
    learning_rate: float = 0.5
    l2: float = 1e-4
    max_epochs: int = 500
    tolerance: float = 1e-6


def featurize(s: SentenceInstance, table: EmbeddingTable) -> np.ndarray:
    """Mean of the embedding vectors of in-vocabulary word tokens."""
    vecs = [
        table.vector(tok.normalized)
        for tok in s.tokens
        if tok.pos != PUNCT and tok.normalized in table
    ]
    if not vecs:
        return np.zeros(table.dimension, dtype=np.float64)
    return np.mean(np.asarray(vecs, dtype=np.float64), axis=0)


def logistic_loss_and_grad(w, b, X, y, l2):
    """L2-regularized mean logistic loss and its analytic gradient.

    Standalone numpy reference: the finite-difference tests check this, and
    the training kernels are checked against it.
    """
    w = np.asarray(w, dtype=np.float64)
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = X.shape[0]
    z = X @ w + b
    # log(1 + e^-|z|) + max(z,0) - z*y is the numerically stable cross-entropy.
    loss = float(np.mean(np.log1p(np.exp(-np.abs(z))) + np.maximum(z, 0.0) - z * y))
    loss += 0.5 * l2 * float(w @ w)
    p = sigmoid_numpy(z)
    err = p - y
    grad_w = X.T @ err / n + l2 * w
    grad_b = float(np.mean(err))
    return loss, grad_w, grad_b


def train(labeled, params: TrainParams = TrainParams()) -> LinearModel:
    """Fit logistic regression on (feature vector, label) pairs.

    Deterministic given input order. A single-class training set yields the
    prior-only model: zero weights, bias = logit of the class rate clamped
    to +-10. Raises ValueError on an empty training set.
    """
    pairs = list(labeled)
    if not pairs:
        raise ValueError("empty training set")
    X = np.ascontiguousarray([v for v, _ in pairs], dtype=np.float64)
    y = np.asarray([float(lbl) for _, lbl in pairs], dtype=np.float64)
    d = X.shape[1]
    classes = set(int(v) for v in y)
    if len(classes) == 1:
        rate = float(np.mean(y))
        if rate <= 0.0:
            bias = -_PRIOR_LOGIT_CLAMP
        elif rate >= 1.0:
            bias = _PRIOR_LOGIT_CLAMP
        else:
            bias = float(np.clip(np.log(rate / (1.0 - rate)),
                                 -_PRIOR_LOGIT_CLAMP, _PRIOR_LOGIT_CLAMP))
        meta = TrainingMeta(epochs_run=0, final_grad_norm=0.0, l2=params.l2)
        return LinearModel(weights=np.zeros(d), bias=bias, meta=meta)
    w, b, epochs, grad_norm = logreg_fit(
        X, y, params.learning_rate, params.l2, params.max_epochs, params.tolerance
    )
    meta = TrainingMeta(epochs_run=int(epochs), final_grad_norm=float(grad_norm), l2=params.l2)
    return LinearModel(weights=np.asarray(w, dtype=np.float64), bias=float(b), meta=meta)


def predict_proba(model: LinearModel, x: np.ndarray) -> float:
    """P(label = 1 | x) = sigmoid(w . x + b)."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != model.weights.shape:
        raise ValueError(
            f"feature dimension {x.shape} does not match model {model.weights.shape}"
        )
    z = np.asarray([float(model.weights @ x + model.bias)])
    return float(sigmoid_numpy(z)[0])


def predict_proba_many(model: LinearModel, X: np.ndarray) -> np.ndarray:
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.shape[1] != model.dimension:
        raise ValueError(
            f"feature dimension {X.shape[1]} does not match model {model.dimension}"
        )
    return predict_proba_batch(X, model.weights, model.bias)


def uncertainty(model: LinearModel, s: SentenceInstance, table: EmbeddingTable) -> float:
    """Margin uncertainty 1 - |2p - 1| of the model on a sentence, in [0, 1]."""
    p = predict_proba(model, featurize(s, table))
    return 1.0 - abs(2.0 * p - 1.0)


def select_batch(pool, model: LinearModel, batch_size: int, table: EmbeddingTable):
    """Top `batch_size` pool instances by uncertainty; ties broken by instance id."""
    pool = list(pool)
    if not pool:
        raise ValueError("empty pool")
    if batch_size > len(pool):
        raise ValueError(f"batch size {batch_size} exceeds pool size {len(pool)}")
    scored = [(uncertainty(model, s, table), s) for s in pool]
    scored.sort(key=lambda us: (-us[0], us[1].id))
    return [s for _, s in scored[:batch_size]]


def save_model(model: LinearModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(_CHECKPOINT_MAGIC + "\n")
        fh.write(f"dim {model.dimension}\n")
        fh.write(f"epochs {model.meta.epochs_run}\n")
        fh.write(f"grad_norm {model.meta.final_grad_norm!r}\n")
        fh.write(f"l2 {model.meta.l2!r}\n")
        fh.write(f"bias {model.bias!r}\n")
        fh.write("weights " + " ".join(repr(float(v)) for v in model.weights) + "\n")


def load_model(path) -> LinearModel:
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != _CHECKPOINT_MAGIC:
        raise ValueError(f"{path}: not a model checkpoint (bad magic header)")
    fields = dict(line.split(" ", 1) for line in lines[1:] if line)
    weights = np.asarray([float(v) for v in fields["weights"].split()], dtype=np.float64)
    if weights.shape[0] != int(fields["dim"]):
        raise ValueError(f"{path}: weight count does not match recorded dimension")
    meta = TrainingMeta(
        epochs_run=int(fields["epochs"]),
        final_grad_norm=float(fields["grad_norm"]),
        l2=float(fields["l2"]),
    )
    return LinearModel(weights=weights, bias=float(fields["bias"]), meta=meta)
