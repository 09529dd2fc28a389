"""Datasets, baselines, and the two batch experiment protocols.

Experiment 1 is batch active learning: per repetition, sample a small core
set, then alternate pool generation (membership-query synthesis or a
baseline), uncertainty-based batch selection, oracle labeling, and learner
retraining, recording test accuracy per step. Experiment 2 measures the
label-switch rate: the fraction of generated sentences whose oracle label
differs from their root's oracle label.

Membership-query methods may only touch the core sample, the oracle, and
the test split; dataset access is audited so that tests can prove the
unlabeled train pool was never read.
"""

import csv
import random
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .embeddings import EmbeddingTable
from .kernels import predict_proba_batch
from .learner import TrainParams, featurize, select_batch, train, uncertainty
from .oracle import oracle_label, train_simulated_oracle
from .synthesis import (
    METHODS,
    S_HC_MQ,
    S_MQ,
    US_HC_MQ,
    SynthesisConfig,
    CandidatePool,
    stochastic_fill,
    synthesize,
)
from .textspace import ModOp, PosLexicon, candidate_operators, make_instance

IDEAL = "IDEAL"
WNA = "WNA"
AL_METHODS = METHODS + (IDEAL, WNA)


class DatasetError(ValueError):
    """Raised for malformed dataset files or impossible split requests."""


@dataclass
class Dataset:
    name: str
    records: list[tuple[str, int]]
    train_ids: list[int]
    test_ids: list[int]

    def train_records(self) -> list[tuple[str, int]]:
        return [self.records[i] for i in self.train_ids]

    def test_records(self) -> list[tuple[str, int]]:
        return [self.records[i] for i in self.test_ids]


class AuditedDataset:
    """Facade over a Dataset that logs which parts of the data were touched."""

    def __init__(self, dataset: Dataset):
        self.dataset = dataset
        self.audit: list[str] = []

    def full_records(self):
        self.audit.append("full_records")
        return list(self.dataset.records)

    def test_records(self):
        self.audit.append("test_records")
        return self.dataset.test_records()

    def core_sample(self, size: int, rng: random.Random):
        """Sample a core set from the train split, resampling until both classes appear."""
        self.audit.append("core_sample")
        train = self.dataset.train_records()
        if size > len(train):
            raise DatasetError(
                f"core size {size} exceeds train split of {len(train)}"
            )
        for _ in range(1000):
            picked = rng.sample(range(len(train)), size)
            if size < 2 or len({train[i][1] for i in picked}) > 1:
                return [train[i] for i in picked]
        raise DatasetError("could not sample a two-class core set")

    def unlabeled_pool(self, exclude_texts: set[str]):
        """Train records not yet labeled; only pool-based baselines may call this."""
        self.audit.append("unlabeled_pool")
        return [
            (text, label)
            for text, label in self.dataset.train_records()
            if text.lower() not in exclude_texts
        ]


def load_dataset(path, split_seed: int = 0, test_fraction: float = 0.4,
                 name: str | None = None) -> Dataset:
    """Load a `label,text` CSV and split it deterministically.

    Duplicate texts (case-insensitive) keep their first row so no text can
    appear in both splits. Malformed rows are reported with line numbers.
    """
    if not 0.0 < test_fraction < 1.0:
        raise DatasetError(f"test fraction must be in (0, 1), got {test_fraction}")
    records: list[tuple[str, int]] = []
    seen: set[str] = set()
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DatasetError(f"{path}: empty file") from None
        if [h.strip().lower() for h in header] != ["label", "text"]:
            raise DatasetError(f"{path}: expected header 'label,text', got {header!r}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise DatasetError(f"{path}:{lineno}: expected 2 columns, got {len(row)}")
            label_s, text = row[0].strip(), row[1].strip()
            if label_s not in ("0", "1"):
                raise DatasetError(f"{path}:{lineno}: label must be 0 or 1, got {label_s!r}")
            if not text:
                raise DatasetError(f"{path}:{lineno}: empty text")
            if text.lower() in seen:
                continue
            seen.add(text.lower())
            records.append((text, int(label_s)))
    if not records:
        raise DatasetError(f"{path}: no data rows")
    indices = list(range(len(records)))
    random.Random(split_seed).shuffle(indices)
    n_test = round(len(records) * test_fraction)
    if n_test < 1 or n_test >= len(records):
        raise DatasetError(
            f"test fraction {test_fraction} leaves an empty split for {len(records)} rows"
        )
    test_ids = sorted(indices[:n_test])
    train_ids = sorted(indices[n_test:])
    train_labels = {records[i][1] for i in train_ids}
    if len(train_labels) < 2:
        raise DatasetError("train split has a single class")
    return Dataset(
        name=name or Path(str(path)).stem,
        records=records,
        train_ids=train_ids,
        test_ids=test_ids,
    )


def load_synonyms(path) -> dict[str, list[str]]:
    """Load `word TAB syn1,syn2,...` rows for the synonym-augmentation baseline."""
    synonyms: dict[str, list[str]] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            try:
                word, syns = line.split("\t")
            except ValueError as exc:
                raise DatasetError(f"{path}:{lineno}: bad record: {exc}") from exc
            synonyms[word.lower()] = [s.strip().lower() for s in syns.split(",") if s.strip()]
    return synonyms


@dataclass(frozen=True)
class StepRecord:
    step: int
    n_labeled: int
    accuracy: float


@dataclass
class RunMetrics:
    method: str
    seed: int
    steps: list[StepRecord] = field(default_factory=list)
    switch_rate: float | None = None


@dataclass
class ExperimentConfig:
    core_size: int = 10
    pool_size: int = 20
    batch_size: int = 5
    steps: int = 8
    k_neighbors: int = 10
    depth_min: int = 1
    depth_max: int = 7
    beam_width: int = 3
    max_retries: int = 10
    seed: int = 0
    train_params: TrainParams = TrainParams()

    def synthesis_config(self, method: str, K: int) -> SynthesisConfig:
        return SynthesisConfig(
            K=K,
            method=method,
            k_neighbors=self.k_neighbors,
            depth_min=self.depth_min,
            depth_max=self.depth_max,
            beam_width=self.beam_width,
            max_retries=self.max_retries,
            seed=self.seed,
        )


def feature_matrix(instances, table: EmbeddingTable) -> np.ndarray:
    return np.ascontiguousarray([featurize(s, table) for s in instances])


def model_accuracy(model, X: np.ndarray, y: np.ndarray) -> float:
    p = predict_proba_batch(X, model.weights, model.bias)
    return float(np.mean((p >= 0.5).astype(int) == y.astype(int)))


def fit_labeled(labeled, table: EmbeddingTable, params: TrainParams):
    """Train the learner on (instance, label) pairs."""
    return train([(featurize(s, table), lbl) for s, lbl in labeled], params)


def baseline_ideal(pool_records, P: int, rng: random.Random):
    """Uniform sample of P unlabeled records, without replacement."""
    if P > len(pool_records):
        raise DatasetError(
            f"requested {P} records from an unlabeled pool of {len(pool_records)}"
        )
    return rng.sample(list(pool_records), P)


def wna_op_provider(synonyms: dict[str, list[str]], lexicon: PosLexicon):
    """Operator provider whose neighborhoods are synonym lists (POS filter kept)."""

    def provider(s):
        ops = []
        for pos, tok in enumerate(s.tokens):
            if not tok.replaceable:
                continue
            for w in synonyms.get(tok.normalized, ()):
                if w == tok.normalized:
                    continue
                if lexicon.dominant_tag(w) != tok.pos:
                    continue
                ops.append(ModOp(position=pos, replacement=w, distance=0.0))
        return ops

    return provider


@dataclass
class WNAResult:
    instances: list
    starved: bool


def baseline_wna(seed_instances, synonyms, K: int, rng: random.Random,
                 lexicon: PosLexicon, max_retries: int = 10) -> WNAResult:
    """Synonym-replacement synthesis; small synonym closures starve and the
    result is flagged partial instead of erroring the run."""
    pool = CandidatePool(list(seed_instances))
    provider = wna_op_provider(synonyms, lexicon)
    out, starved = stochastic_fill(pool, K, provider, rng, max_retries,
                                   "WNA synthesis", allow_partial=True)
    return WNAResult(instances=out, starved=starved)


def _method_rng(tag: str, method: str, seed: int) -> random.Random:
    return random.Random(f"{tag}:{method}:{seed}")


def run_batch_al(dataset: Dataset, method: str, cfg: ExperimentConfig,
                 repetitions: int = 20, table: EmbeddingTable | None = None,
                 lexicon: PosLexicon | None = None,
                 synonyms: dict[str, list[str]] | None = None,
                 access: AuditedDataset | None = None) -> list[RunMetrics]:
    """Experiment 1: batch active learning curves for one method."""
    from .resources import default_embeddings, default_lexicon

    if method not in AL_METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {AL_METHODS}")
    table = table or default_embeddings()
    lexicon = lexicon or default_lexicon()
    access = access or AuditedDataset(dataset)
    if method == WNA and synonyms is None:
        raise ValueError("WNA needs a synonym lexicon")

    oracle = None
    if method != IDEAL:
        oracle = train_simulated_oracle(access.full_records(), seed=cfg.seed)

    test_insts = [make_instance(t, lexicon, lbl) for t, lbl in access.test_records()]
    X_test = feature_matrix(test_insts, table)
    y_test = np.asarray([lbl for _, lbl in access.test_records()], dtype=np.float64)

    def op_provider(s):
        return candidate_operators(s, cfg.k_neighbors, table, lexicon)

    runs: list[RunMetrics] = []
    for rep in range(repetitions):
        rep_seed = cfg.seed + rep
        # Core sets depend only on the repetition so methods see matched cores.
        core = access.core_sample(cfg.core_size, _method_rng("al-core", "core", rep_seed))
        rng = _method_rng("al", method, rep_seed)
        labeled = [(make_instance(t, lexicon, lbl), lbl) for t, lbl in core]
        labeled_texts = {s.normalized_text for s, _ in labeled}
        model = fit_labeled(labeled, table, cfg.train_params)
        steps = [StepRecord(0, len(labeled), model_accuracy(model, X_test, y_test))]

        for t in range(1, cfg.steps + 1):
            if method in METHODS:
                frozen = model
                heuristic = lambda inst: uncertainty(frozen, inst, table)  # noqa: E731
                pool = synthesize(
                    [s for s, _ in labeled],
                    cfg.synthesis_config(method, cfg.pool_size),
                    heuristic,
                    op_provider,
                    rng,
                )
                batch = select_batch(pool, model, cfg.batch_size, table)
                new = [(g, oracle_label(oracle, g).label) for g in batch]
            elif method == IDEAL:
                candidates = access.unlabeled_pool(labeled_texts)
                drawn = baseline_ideal(candidates, min(cfg.pool_size, len(candidates)), rng)
                insts = [make_instance(txt, lexicon, lbl) for txt, lbl in drawn]
                batch = select_batch(insts, model, min(cfg.batch_size, len(insts)), table)
                new = [(g, g.provenance.root_label) for g in batch]
            else:  # WNA
                result = baseline_wna(
                    [s for s, _ in labeled], synonyms, cfg.pool_size, rng,
                    lexicon, cfg.max_retries,
                )
                if not result.instances:
                    steps.append(StepRecord(t, len(labeled), steps[-1].accuracy))
                    continue
                take = min(cfg.batch_size, len(result.instances))
                batch = select_batch(result.instances, model, take, table)
                new = [(g, oracle_label(oracle, g).label) for g in batch]

            labeled.extend(new)
            labeled_texts.update(g.normalized_text for g, _ in new)
            model = fit_labeled(labeled, table, cfg.train_params)
            steps.append(StepRecord(t, len(labeled), model_accuracy(model, X_test, y_test)))
        runs.append(RunMetrics(method=method, seed=rep_seed, steps=steps))
    return runs


def run_label_switch(dataset: Dataset, methods=(US_HC_MQ, S_HC_MQ, S_MQ),
                     cfg: ExperimentConfig | None = None, repetitions: int = 20,
                     n_generate: int = 50, table: EmbeddingTable | None = None,
                     lexicon: PosLexicon | None = None,
                     access: AuditedDataset | None = None) -> list[RunMetrics]:
    """Experiment 2: per-method fraction of generated sentences whose oracle
    label differs from their root's oracle label."""
    from .resources import default_embeddings, default_lexicon

    cfg = cfg or ExperimentConfig()
    table = table or default_embeddings()
    lexicon = lexicon or default_lexicon()
    access = access or AuditedDataset(dataset)
    oracle = train_simulated_oracle(access.full_records(), seed=cfg.seed)

    def op_provider(s):
        return candidate_operators(s, cfg.k_neighbors, table, lexicon)

    runs: list[RunMetrics] = []
    for rep in range(repetitions):
        rep_seed = cfg.seed + rep
        core_rng = _method_rng("ls-core", "core", rep_seed)
        core = access.core_sample(cfg.core_size, core_rng)
        core_insts = [make_instance(t, lexicon, lbl) for t, lbl in core]
        root_labels = {s.id: oracle_label(oracle, s).label for s in core_insts}
        model = fit_labeled(list(zip(core_insts, [lbl for _, lbl in core])),
                            table, cfg.train_params)

        for method in methods:
            rng = _method_rng("ls", method, rep_seed)
            heuristic = lambda inst: uncertainty(model, inst, table)  # noqa: E731
            generated = synthesize(
                core_insts, cfg.synthesis_config(method, n_generate),
                heuristic, op_provider, rng,
            )
            switched = sum(
                1 for g in generated
                if oracle_label(oracle, g).label != root_labels[g.provenance.root_id]
            )
            runs.append(RunMetrics(method=method, seed=rep_seed,
                                   switch_rate=switched / n_generate))
    return runs


def emit_metrics(runs, path) -> list[Path]:
    """Write accuracy rows, plus a companion `_switch` CSV when present.

    Rows are sorted (method, seed, step) so re-emission is byte-identical.
    """
    runs = list(runs)
    if not runs:
        raise ValueError("no runs to emit")
    path = Path(path)
    written = [path]
    acc_rows = sorted(
        (
            (run.method, run.seed, rec.step, rec.n_labeled, rec.accuracy)
            for run in runs
            for rec in run.steps
        ),
        key=lambda r: (r[0], r[1], r[2]),
    )
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["method", "seed", "step", "n_labeled", "accuracy"])
        for method, seed, step, n_labeled, accuracy in acc_rows:
            writer.writerow([method, seed, step, n_labeled, f"{accuracy:.6f}"])
    switch_rows = sorted(
        ((run.method, run.seed, run.switch_rate) for run in runs
         if run.switch_rate is not None),
        key=lambda r: (r[0], r[1]),
    )
    if switch_rows:
        switch_path = path.with_name(path.stem + "_switch" + (path.suffix or ".csv"))
        with open(switch_path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["method", "seed", "switch_rate"])
            for method, seed, rate in switch_rows:
                writer.writerow([method, seed, f"{rate:.6f}"])
        written.append(switch_path)
    return written
