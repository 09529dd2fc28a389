"""Session service wire contract: creation, query queue, labels, metrics, replay."""

import numpy as np
import pytest
from fastapi.testclient import TestClient

from mqsynth.service import create_app

CORE_ROWS = [
    "1,The film was wonderful .",
    "0,The movie was dreadful .",
    "1,I love this film .",
    "0,I hate this picture .",
    "1,The acting was superb .",
    "0,The plot was boring .",
    "1,We would recommend this film .",
    "0,We would avoid this movie .",
    "1,It was a delightful story .",
    "0,It was a tedious story .",
]
CORE_CSV = "label,text\n" + "\n".join(CORE_ROWS)

TEST_CSV = "label,text\n" + "\n".join(
    [
        "1,The story was terrific .",
        "0,The ending was horrible .",
        "1,We adore this picture .",
        "0,They dislike this film .",
        "1,The dialogue was splendid .",
        "0,The pacing was dull .",
    ]
)


@pytest.fixture
def client(tmp_path):
    app = create_app(data_dir=tmp_path / "sessions")
    return TestClient(app)


def create_session(client, **overrides):
    body = {"core_csv": CORE_CSV, "config": {"seed": 5}}
    body.update(overrides)
    resp = client.post("/sessions", json=body)
    assert resp.status_code == 201, resp.text
    return resp.json()


class TestCreate:
    def test_creation_gives_session_and_empty_queue_until_asked(self, client):
        data = create_session(client)
        assert data["session_id"]
        assert data["batch_size"] == 5

    def test_two_sessions_have_distinct_ids(self, client):
        a = create_session(client)
        b = create_session(client)
        assert a["session_id"] != b["session_id"]

    def test_empty_body_rejected(self, client):
        resp = client.post("/sessions", json={})
        assert resp.status_code == 400

    def test_malformed_csv_rejected(self, client):
        resp = client.post("/sessions", json={"core_csv": "label,text\n3,broken"})
        assert resp.status_code == 400

    def test_single_class_needs_override(self, client):
        csv_1class = "label,text\n" + "\n".join(
            f"1,{t.split(',', 1)[1]}" for t in CORE_ROWS[:4]
        )
        resp = client.post("/sessions", json={"core_csv": csv_1class})
        assert resp.status_code == 422
        resp = client.post(
            "/sessions", json={"core_csv": csv_1class, "allow_single_class": True}
        )
        assert resp.status_code == 201

    def test_unknown_fields_rejected(self, client):
        resp = client.post("/sessions", json={"core_csv": CORE_CSV, "bogus": 1})
        assert resp.status_code == 422
        resp = client.post(
            "/sessions", json={"core_csv": CORE_CSV, "config": {"zzz": 3}}
        )
        assert resp.status_code == 422

    def test_dataset_reference_creates_session_with_accuracy(self, client):
        from mqsynth.resources import default_corpus_path

        resp = client.post(
            "/sessions", json={"dataset": str(default_corpus_path())}
        )
        assert resp.status_code == 201
        assert 0.0 <= resp.json()["initial_accuracy"] <= 1.0

    def test_initial_accuracy_with_test_csv(self, client):
        data = create_session(client, test_csv=TEST_CSV)
        assert data["initial_accuracy"] is not None


class TestQueries:
    def test_batch_of_five_with_nonempty_chains(self, client):
        sid = create_session(client)["session_id"]
        resp = client.get(f"/sessions/{sid}/queries", params={"limit": 5})
        queries = resp.json()["queries"]
        assert len(queries) == 5
        for q in queries:
            assert q["chain"], "membership queries must differ from their root"
            assert q["heuristic_value"] is not None

    def test_repeated_get_is_idempotent_until_resolved(self, client):
        sid = create_session(client)["session_id"]
        a = client.get(f"/sessions/{sid}/queries", params={"limit": 5}).json()
        b = client.get(f"/sessions/{sid}/queries", params={"limit": 5}).json()
        assert [q["query_id"] for q in a["queries"]] == [
            q["query_id"] for q in b["queries"]
        ]

    def test_queries_replay_from_root_over_the_wire(self, client, bundled_lexicon):
        from mqsynth.textspace import ModOp, make_instance, replay_chain

        sid = create_session(client)["session_id"]
        queries = client.get(f"/sessions/{sid}/queries").json()["queries"]
        for q in queries:
            prov = client.get(f"/sessions/{sid}/provenance/{q['query_id']}").json()
            root = make_instance(prov["root_text"], bundled_lexicon)
            chain = [
                ModOp(c["position"], c["replacement"], c["distance"])
                for c in prov["chain"]
            ]
            assert replay_chain(root, chain).raw_text == q["text"]

    def test_unknown_session_404(self, client):
        assert client.get("/sessions/nope/queries").status_code == 404

    def test_starvation_409(self, client):
        stuck = "label,text\n1,the of and\n0,of the to"
        sid = client.post(
            "/sessions", json={"core_csv": stuck}
        ).json()["session_id"]
        resp = client.get(f"/sessions/{sid}/queries")
        assert resp.status_code == 409
        assert "no operator" in resp.json()["detail"]


class TestLabels:
    def test_full_batch_increments_model_version(self, client):
        sid = create_session(client)["session_id"]
        qs = client.get(f"/sessions/{sid}/queries").json()["queries"]
        resp = client.post(
            f"/sessions/{sid}/labels",
            json={"labels": [{"query_id": q["query_id"], "label": 1} for q in qs]},
        )
        data = resp.json()
        assert data["labels_accepted"] == 5
        assert data["model_version"] == 1

    def test_partial_batch_keeps_version(self, client):
        sid = create_session(client)["session_id"]
        qs = client.get(f"/sessions/{sid}/queries").json()["queries"]
        resp = client.post(
            f"/sessions/{sid}/labels",
            json={"labels": [{"query_id": q["query_id"], "label": 0} for q in qs[:3]]},
        )
        assert resp.json()["labels_accepted"] == 3
        assert resp.json()["model_version"] == 0
        # batch completes across calls
        resp = client.post(
            f"/sessions/{sid}/labels",
            json={"labels": [{"query_id": q["query_id"], "label": 0} for q in qs[3:]]},
        )
        assert resp.json()["model_version"] == 1

    def test_conflicting_relabel_409_first_kept(self, client):
        sid = create_session(client)["session_id"]
        qs = client.get(f"/sessions/{sid}/queries").json()["queries"]
        qid = qs[0]["query_id"]
        client.post(f"/sessions/{sid}/labels",
                    json={"labels": [{"query_id": qid, "label": 1}]})
        resp = client.post(f"/sessions/{sid}/labels",
                           json={"labels": [{"query_id": qid, "label": 0}]})
        assert resp.status_code == 409
        # idempotent repeat is accepted and counted as zero new labels
        resp = client.post(f"/sessions/{sid}/labels",
                           json={"labels": [{"query_id": qid, "label": 1}]})
        assert resp.status_code == 200
        assert resp.json()["labels_accepted"] == 0

    def test_unknown_query_id_409(self, client):
        sid = create_session(client)["session_id"]
        resp = client.post(f"/sessions/{sid}/labels",
                           json={"labels": [{"query_id": "zzz", "label": 1}]})
        assert resp.status_code == 409

    def test_label_value_validated(self, client):
        sid = create_session(client)["session_id"]
        resp = client.post(f"/sessions/{sid}/labels",
                           json={"labels": [{"query_id": "x", "label": 7}]})
        assert resp.status_code == 422


class TestMetricsAndProvenance:
    def test_fresh_session_has_only_step_zero(self, client):
        sid = create_session(client)["session_id"]
        steps = client.get(f"/sessions/{sid}/metrics").json()["steps"]
        assert len(steps) == 1
        assert steps[0]["step"] == 0
        assert steps[0]["n_labeled"] == 10

    def test_core_instance_has_empty_chain(self, client):
        sid = create_session(client)["session_id"]
        store = client.app.state.store
        root_id = next(iter(store.sessions[sid].roots))
        prov = client.get(f"/sessions/{sid}/provenance/{root_id}").json()
        assert prov["chain"] == []
        assert prov["root_id"] == root_id

    def test_unknown_query_404(self, client):
        sid = create_session(client)["session_id"]
        assert client.get(f"/sessions/{sid}/provenance/zzz").status_code == 404

    def test_metrics_match_batch_runner_computation(self, client, bundled_table,
                                                    bundled_lexicon):
        # The service must produce the same numbers the experiment pipeline
        # computes for the same core set, labels, and test split.
        from mqsynth.experiments import feature_matrix, fit_labeled, model_accuracy
        from mqsynth.learner import TrainParams
        from mqsynth.textspace import make_instance

        sid = create_session(client, test_csv=TEST_CSV)["session_id"]
        qs = client.get(f"/sessions/{sid}/queries").json()["queries"]
        labels = [{"query_id": q["query_id"], "label": i % 2}
                  for i, q in enumerate(qs)]
        client.post(f"/sessions/{sid}/labels", json={"labels": labels})
        steps = client.get(f"/sessions/{sid}/metrics").json()["steps"]
        assert len(steps) == 2

        store = client.app.state.store
        session = store.sessions[sid]
        expected_model = fit_labeled(session.labeled, bundled_table, TrainParams())
        test_insts = [make_instance(t, bundled_lexicon, l) for t, l in session.test]
        X = feature_matrix(test_insts, bundled_table)
        y = np.asarray([l for _, l in session.test], dtype=np.float64)
        assert steps[1]["accuracy"] == pytest.approx(
            model_accuracy(expected_model, X, y), abs=1e-12
        )
        assert steps[1]["n_labeled"] == 15
        assert steps[1]["model_version"] == 1


class TestPersistence:
    def test_restart_replays_state_and_continues(self, tmp_path):
        data_dir = tmp_path / "sessions"
        app = create_app(data_dir=data_dir)
        client = TestClient(app)
        sid = create_session(client, test_csv=TEST_CSV)["session_id"]
        qs = client.get(f"/sessions/{sid}/queries").json()["queries"]
        client.post(
            f"/sessions/{sid}/labels",
            json={"labels": [{"query_id": q["query_id"], "label": 1} for q in qs[:3]]},
        )
        before_metrics = client.get(f"/sessions/{sid}/metrics").json()
        before_queries = client.get(f"/sessions/{sid}/queries").json()

        app2 = create_app(data_dir=data_dir)
        client2 = TestClient(app2)
        assert client2.get(f"/sessions/{sid}/metrics").json() == before_metrics
        after_queries = client2.get(f"/sessions/{sid}/queries").json()
        assert [q["query_id"] for q in after_queries["queries"]] == [
            q["query_id"] for q in before_queries["queries"]
        ]
        # finishing the batch after restart retrains exactly once
        resp = client2.post(
            f"/sessions/{sid}/labels",
            json={"labels": [{"query_id": q["query_id"], "label": 0} for q in qs[3:]]},
        )
        assert resp.json()["model_version"] == 1
        steps = client2.get(f"/sessions/{sid}/metrics").json()["steps"]
        assert len(steps) == 2

    def test_restart_equals_uninterrupted_run(self, tmp_path):
        # the same labeling sequence with and without a restart in the middle
        def drive(client, sid, split):
            qs = client.get(f"/sessions/{sid}/queries").json()["queries"]
            ids = [q["query_id"] for q in qs]
            client.post(f"/sessions/{sid}/labels", json={
                "labels": [{"query_id": i, "label": 1} for i in ids[:split]]})
            return ids

        app_a = create_app(data_dir=tmp_path / "a")
        client_a = TestClient(app_a)
        sid_a = create_session(client_a, test_csv=TEST_CSV)["session_id"]
        ids_a = drive(client_a, sid_a, 2)
        client_a.post(f"/sessions/{sid_a}/labels", json={
            "labels": [{"query_id": i, "label": 1} for i in ids_a[2:]]})

        app_b = create_app(data_dir=tmp_path / "b")
        client_b = TestClient(app_b)
        sid_b = create_session(client_b, test_csv=TEST_CSV)["session_id"]
        ids_b = drive(client_b, sid_b, 2)
        client_b2 = TestClient(create_app(data_dir=tmp_path / "b"))
        client_b2.post(f"/sessions/{sid_b}/labels", json={
            "labels": [{"query_id": i, "label": 1} for i in ids_b[2:]]})

        assert ids_a == ids_b
        ma = client_a.get(f"/sessions/{sid_a}/metrics").json()["steps"]
        mb = client_b2.get(f"/sessions/{sid_b}/metrics").json()["steps"]
        assert ma == mb
