"""HTTP session service: synthesis engine plus the human-oracle labeling loop.

Sessions are created from a labeled core-set CSV (or a dataset reference on
the server). Queries are synthesized on demand, served as a pending queue,
and resolved by posted labels; every completed batch retrains the learner
and appends one metrics step. Sessions persist as append-only JSON-lines
event logs and are rebuilt by replaying those logs, so a restarted service
continues exactly where it stopped (pool generation n uses an rng derived
from the session seed and n, never from process state).
"""

import csv
import io
import json
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, ConfigDict, Field

from .embeddings import EmbeddingTable
from .experiments import feature_matrix, fit_labeled, model_accuracy
from .learner import TrainParams, uncertainty
from .oracle import HumanOracleQueue, LabelConflictError
from .synthesis import (
    METHODS,
    US_HC_MQ,
    SynthesisConfig,
    SynthesisStarvationError,
    synthesize,
)
from .textspace import (
    ModOp,
    PosLexicon,
    SentenceInstance,
    chain_records,
    make_instance,
    replay_chain,
)

WIRE_VERSION = 1


class SessionConfigBody(BaseModel):
    model_config = ConfigDict(extra="forbid")

    method: str = US_HC_MQ
    pool_size: int = Field(default=20, ge=1)
    batch_size: int = Field(default=5, ge=1)
    k_neighbors: int = Field(default=10, ge=1)
    depth_min: int = Field(default=1, ge=1)
    depth_max: int = Field(default=7, ge=1)
    beam_width: int = Field(default=3, ge=1)
    max_retries: int = Field(default=10, ge=1)
    seed: int = 0


class CreateSessionBody(BaseModel):
    model_config = ConfigDict(extra="forbid")

    core_csv: str | None = None
    dataset: str | None = None  # server-side CSV path; samples the core set
    core_size: int = Field(default=10, ge=1)
    test_csv: str | None = None
    allow_single_class: bool = False
    config: SessionConfigBody = SessionConfigBody()


class LabelItem(BaseModel):
    model_config = ConfigDict(extra="forbid")

    query_id: str
    label: int = Field(ge=0, le=1)


class LabelsBody(BaseModel):
    model_config = ConfigDict(extra="forbid")

    labels: list[LabelItem]


def _parse_core_csv(text: str) -> list[tuple[str, int]]:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise HTTPException(status_code=400, detail="empty core set CSV") from None
    if [h.strip().lower() for h in header] != ["label", "text"]:
        raise HTTPException(
            status_code=400, detail=f"expected header 'label,text', got {header!r}"
        )
    records: list[tuple[str, int]] = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 2 or row[0].strip() not in ("0", "1") or not row[1].strip():
            raise HTTPException(
                status_code=400, detail=f"line {lineno}: expected `0|1,text`"
            )
        records.append((row[1].strip(), int(row[0].strip())))
    if not records:
        raise HTTPException(status_code=400, detail="core set CSV has no data rows")
    return records


@dataclass
class Session:
    id: str
    config: SessionConfigBody
    core: list[tuple[str, int]]
    test: list[tuple[str, int]] | None
    created: float
    updated: float
    # runtime state (rebuilt on replay)
    core_insts: list[SentenceInstance] = field(default_factory=list)
    roots: dict[str, SentenceInstance] = field(default_factory=dict)
    labeled: list = field(default_factory=list)  # (instance, label), core first
    queue: HumanOracleQueue = field(default_factory=HumanOracleQueue)
    enqueued_order: list[str] = field(default_factory=list)
    resolution_order: list[str] = field(default_factory=list)
    incorporated: int = 0
    pools_generated: int = 0
    model_version: int = 0
    model: object = None
    metrics: list[dict] = field(default_factory=list)
    heuristic_values: dict[str, float] = field(default_factory=dict)
    lock: threading.Lock = field(default_factory=threading.Lock)


class SessionStore:
    """Owns all sessions plus the shared text/embedding resources."""

    def __init__(self, table: EmbeddingTable, lexicon: PosLexicon,
                 data_dir: Path | None = None,
                 train_params: TrainParams = TrainParams()):
        self.table = table
        self.lexicon = lexicon
        self.data_dir = Path(data_dir) if data_dir else None
        self.train_params = train_params
        self.sessions: dict[str, Session] = {}
        if self.data_dir:
            self.data_dir.mkdir(parents=True, exist_ok=True)
            for log in sorted(self.data_dir.glob("*.jsonl")):
                session = self._replay(log)
                self.sessions[session.id] = session

    # -- event log ----------------------------------------------------------

    def _log_path(self, session_id: str) -> Path | None:
        if self.data_dir is None:
            return None
        return self.data_dir / f"{session_id}.jsonl"

    def _append_event(self, session: Session, event: dict) -> None:
        path = self._log_path(session.id)
        if path is None:
            return
        with open(path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(event) + "\n")

    def _replay(self, log: Path) -> Session:
        session: Session | None = None
        with open(log, "r", encoding="utf-8") as fh:
            for line in fh:
                event = json.loads(line)
                kind = event["event"]
                if kind == "created":
                    session = self._build_session(
                        session_id=event["session_id"],
                        config=SessionConfigBody(**event["config"]),
                        core=[(r["text"], r["label"]) for r in event["core"]],
                        test=[(r["text"], r["label"]) for r in event["test"]]
                        if event.get("test")
                        else None,
                        created=event["ts"],
                        log_creation=False,
                    )
                elif kind == "enqueued":
                    assert session is not None
                    for q in event["queries"]:
                        inst = self._rebuild_instance(session, q)
                        session.queue.enqueue(inst)
                        session.enqueued_order.append(inst.id)
                        if q.get("heuristic_value") is not None:
                            session.heuristic_values[inst.id] = q["heuristic_value"]
                    session.pools_generated = event["pool_index"] + 1
                elif kind == "labeled":
                    assert session is not None
                    session.queue.resolve(event["query_id"], event["label"])
                    session.resolution_order.append(event["query_id"])
                    session.updated = event["ts"]
                elif kind == "step":
                    assert session is not None
                    self._incorporate_batch(session, log_event=False)
        if session is None:
            raise ValueError(f"{log}: no creation event")
        return session

    def _rebuild_instance(self, session: Session, q: dict) -> SentenceInstance:
        root = session.roots[q["root_id"]]
        ops = [
            ModOp(position=c["position"], replacement=c["replacement"],
                  distance=c["distance"])
            for c in q["chain"]
        ]
        inst = replay_chain(root, ops)
        if inst.raw_text != q["text"]:
            raise ValueError(
                f"session {session.id}: replay mismatch for query {q['id']}"
            )
        return inst

    # -- session lifecycle ---------------------------------------------------

    def _build_session(self, session_id: str, config: SessionConfigBody,
                       core, test, created: float, log_creation: bool) -> Session:
        session = Session(
            id=session_id, config=config, core=list(core), test=test,
            created=created, updated=created,
        )
        session.core_insts = [
            make_instance(text, self.lexicon, label) for text, label in session.core
        ]
        session.roots = {inst.id: inst for inst in session.core_insts}
        session.labeled = list(zip(session.core_insts, [l for _, l in session.core]))
        session.model = fit_labeled(session.labeled, self.table, self.train_params)
        session.metrics = [self._metrics_row(session, step=0)]
        if log_creation:
            self._append_event(session, {
                "event": "created",
                "session_id": session.id,
                "ts": created,
                "config": config.model_dump(),
                "core": [{"text": t, "label": l} for t, l in session.core],
                "test": [{"text": t, "label": l} for t, l in test] if test else None,
            })
        return session

    def create_session(self, body: CreateSessionBody) -> Session:
        test_records = _parse_core_csv(body.test_csv) if body.test_csv else None
        if body.core_csv is not None:
            core = _parse_core_csv(body.core_csv)
        elif body.dataset is not None:
            import random as _random

            from .experiments import DatasetError, load_dataset

            try:
                ds = load_dataset(body.dataset, split_seed=body.config.seed)
            except (DatasetError, OSError) as exc:
                raise HTTPException(status_code=400, detail=str(exc)) from exc
            rng = _random.Random(f"session-core:{body.config.seed}")
            train = ds.train_records()
            core = [train[i] for i in rng.sample(range(len(train)),
                                                 min(body.core_size, len(train)))]
            if test_records is None:
                test_records = ds.test_records()
        else:
            raise HTTPException(
                status_code=400, detail="body must provide core_csv or dataset"
            )
        return self._finish_create(body, core, test_records)

    def _finish_create(self, body: CreateSessionBody, core, test_records) -> Session:
        if body.config.method not in METHODS:
            raise HTTPException(
                status_code=400,
                detail=f"unknown method {body.config.method!r}; expected one of {METHODS}",
            )
        if body.config.depth_min > body.config.depth_max:
            raise HTTPException(status_code=400, detail="depth_min > depth_max")
        labels = {l for _, l in core}
        if len(labels) < 2 and not body.allow_single_class:
            raise HTTPException(
                status_code=422,
                detail="core set has a single class; pass allow_single_class to override",
            )
        session = self._build_session(
            session_id=uuid.uuid4().hex[:12],
            config=body.config,
            core=core,
            test=test_records,
            created=time.time(),
            log_creation=True,
        )
        self.sessions[session.id] = session
        return session

    def get(self, session_id: str) -> Session:
        session = self.sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")
        return session

    # -- labeling loop -------------------------------------------------------

    def _metrics_row(self, session: Session, step: int) -> dict:
        row = {
            "step": step,
            "n_labeled": len(session.labeled),
            "model_version": session.model_version,
            "accuracy": None,
            "mean_uncertainty": None,
        }
        if session.test:
            insts = [make_instance(t, self.lexicon, l) for t, l in session.test]
            X = feature_matrix(insts, self.table)
            y = np.asarray([l for _, l in session.test], dtype=np.float64)
            row["accuracy"] = model_accuracy(session.model, X, y)
        scored = [
            uncertainty(session.model, inst, self.table)
            for inst, _ in session.labeled
        ]
        row["mean_uncertainty"] = float(np.mean(scored))
        return row

    def _top_up_queue(self, session: Session, limit: int) -> None:
        pending = session.queue.pending()
        needed = limit - len(pending)
        if needed <= 0:
            return
        import random as _random

        rng = _random.Random(f"{session.config.seed}:pool:{session.pools_generated}")
        cfg = SynthesisConfig(
            K=session.config.pool_size,
            method=session.config.method,
            k_neighbors=session.config.k_neighbors,
            depth_min=session.config.depth_min,
            depth_max=session.config.depth_max,
            beam_width=session.config.beam_width,
            max_retries=session.config.max_retries,
            seed=session.config.seed,
        )
        from .textspace import candidate_operators

        model = session.model
        heuristic = lambda inst: uncertainty(model, inst, self.table)  # noqa: E731

        def op_provider(s):
            return candidate_operators(s, cfg.k_neighbors, self.table, self.lexicon)

        known = {inst.normalized_text for inst, _ in session.labeled}
        known.update(s.normalized_text for s in session.queue.pending())
        seed_insts = [inst for inst, _ in session.labeled]
        pool = synthesize(seed_insts, cfg, heuristic, op_provider, rng)
        fresh = [g for g in pool if g.normalized_text not in known]
        fresh.sort(key=lambda g: (-heuristic(g), g.id))
        enqueued = []
        for g in fresh[:needed]:
            session.queue.enqueue(g)
            session.enqueued_order.append(g.id)
            session.heuristic_values[g.id] = heuristic(g)
            enqueued.append(g)
        if enqueued:
            self._append_event(session, {
                "event": "enqueued",
                "pool_index": session.pools_generated,
                "queries": [
                    {
                        "id": g.id,
                        "text": g.raw_text,
                        "root_id": g.provenance.root_id,
                        "chain": chain_records(
                            session.roots[g.provenance.root_id], g.provenance.chain
                        ),
                        "heuristic_value": session.heuristic_values[g.id],
                    }
                    for g in enqueued
                ],
            })
        session.pools_generated += 1

    def _incorporate_batch(self, session: Session, log_event: bool = True) -> None:
        batch_ids = session.resolution_order[
            session.incorporated : session.incorporated + session.config.batch_size
        ]
        answers = session.queue.resolved()
        for qid in batch_ids:
            session.labeled.append((session.queue.instance(qid), answers[qid].label))
        session.incorporated += len(batch_ids)
        session.model = fit_labeled(session.labeled, self.table, self.train_params)
        session.model_version += 1
        row = self._metrics_row(session, step=len(session.metrics))
        session.metrics.append(row)
        if log_event:
            self._append_event(session, {
                "event": "step",
                "step": row["step"],
                "n_labeled": row["n_labeled"],
                "model_version": session.model_version,
                "accuracy": row["accuracy"],
            })

    def record_labels(self, session: Session, items: list[LabelItem]) -> dict:
        accepted = 0
        for item in items:
            try:
                before = item.query_id in session.queue.resolved()
                session.queue.resolve(item.query_id, item.label)
            except KeyError:
                raise HTTPException(
                    status_code=409, detail=f"unknown query id {item.query_id!r}"
                ) from None
            except LabelConflictError as exc:
                raise HTTPException(status_code=409, detail=str(exc)) from None
            if not before:
                session.resolution_order.append(item.query_id)
                accepted += 1
                self._append_event(session, {
                    "event": "labeled",
                    "query_id": item.query_id,
                    "label": item.label,
                    "ts": time.time(),
                })
        while (
            len(session.resolution_order) - session.incorporated
            >= session.config.batch_size
        ):
            self._incorporate_batch(session)
        session.updated = time.time()
        latest = session.metrics[-1]
        return {
            "labels_accepted": accepted,
            "model_version": session.model_version,
            "test_accuracy": latest["accuracy"],
        }


def create_app(table: EmbeddingTable | None = None,
               lexicon: PosLexicon | None = None,
               data_dir=None, ui_dir=None,
               train_params: TrainParams = TrainParams()) -> FastAPI:
    from .resources import default_embeddings, default_lexicon

    store = SessionStore(
        table=table or default_embeddings(),
        lexicon=lexicon or default_lexicon(),
        data_dir=data_dir,
        train_params=train_params,
    )
    app = FastAPI(title="mqsynth labeling service", version=str(WIRE_VERSION))
    app.state.store = store
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSessionBody):
        session = store.create_session(body)
        initial = session.metrics[0]
        return {
            "wire_version": WIRE_VERSION,
            "session_id": session.id,
            "initial_accuracy": initial["accuracy"],
            "batch_size": session.config.batch_size,
            "method": session.config.method,
        }

    @app.get("/sessions/{session_id}/queries")
    def get_queries(session_id: str, limit: int | None = None):
        session = store.get(session_id)
        with session.lock:
            m = limit if limit is not None else session.config.batch_size
            if m < 1:
                raise HTTPException(status_code=400, detail="limit must be >= 1")
            try:
                store._top_up_queue(session, m)
            except SynthesisStarvationError as exc:
                raise HTTPException(status_code=409, detail=str(exc)) from None
            pending = session.queue.pending()[:m]
            return {
                "wire_version": WIRE_VERSION,
                "queries": [
                    {
                        "query_id": g.id,
                        "text": g.raw_text,
                        "chain": [
                            {k: c[k] for k in ("position", "original", "replacement")}
                            for c in chain_records(
                                session.roots[g.provenance.root_id], g.provenance.chain
                            )
                        ],
                        "heuristic_value": session.heuristic_values.get(g.id),
                    }
                    for g in pending
                ],
            }

    @app.post("/sessions/{session_id}/labels")
    def post_labels(session_id: str, body: LabelsBody):
        session = store.get(session_id)
        with session.lock:
            result = store.record_labels(session, body.labels)
            result["wire_version"] = WIRE_VERSION
            return result

    @app.get("/sessions/{session_id}/metrics")
    def get_metrics(session_id: str):
        session = store.get(session_id)
        with session.lock:
            return {
                "wire_version": WIRE_VERSION,
                "session_id": session.id,
                "steps": list(session.metrics),
            }

    @app.get("/sessions/{session_id}/provenance/{query_id}")
    def get_provenance(session_id: str, query_id: str):
        session = store.get(session_id)
        with session.lock:
            if query_id in session.roots:
                inst = session.roots[query_id]
            else:
                try:
                    inst = session.queue.instance(query_id)
                except KeyError:
                    raise HTTPException(
                        status_code=404, detail=f"unknown query {query_id!r}"
                    ) from None
            prov = inst.provenance
            root = session.roots[prov.root_id]
            return {
                "wire_version": WIRE_VERSION,
                "query_id": query_id,
                "text": inst.raw_text,
                "root_id": prov.root_id,
                "root_label": prov.root_label,
                "root_text": root.raw_text,
                "chain": chain_records(root, prov.chain),
            }

    if ui_dir and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")
    return app
