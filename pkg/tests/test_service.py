"""HTTP service contract: status codes, wire schema round-trips, determinism."""

from __future__ import annotations

import itertools

import pytest
from fastapi.testclient import TestClient

from gazette_rag.embeddings import EmbedderConfig
from gazette_rag.llm import LlmClient, LlmConfig, ScriptedBackend
from gazette_rag.pipeline import PipelineConfig
from gazette_rag.service import QueryResponse, ServiceSettings, create_app
from gazette_rag.store import RetrievalConfig

RELEVANT = "VERDICT: RELEVANT"
IRRELEVANT = "VERDICT: IRRELEVANT\nREFINED_QUERY: refined question"


def scripted(role, script):
    return LlmClient(
        LlmConfig(role=role, backend="scripted", model_id=f"{role}-test"),
        backend=ScriptedBackend(script),
    )


class FakeClock:
    """Monotone clock advancing a fixed step per call: deterministic timings."""

    def __init__(self, step=0.5):
        self._ticks = itertools.count()
        self._step = step

    def __call__(self):
        return next(self._ticks) * self._step


def make_app(generator_script=None, checker_script=None, top_k=2):
    if generator_script is None:
        generator_script = ["scripted answer"] * 8
    if checker_script is None:
        checker_script = [RELEVANT] * 8
    settings = ServiceSettings(
        pipeline=PipelineConfig(
            mode="vanilla",
            retrieval=RetrievalConfig(top_k=top_k, fetch_k=max(4, top_k)),
            generator=LlmConfig(role="generator", backend="scripted"),
            max_refinements=3,
        ),
        embedder=EmbedderConfig(backend="mock", model_id="mock", dim=64),
        generator_client=scripted("generator", generator_script),
        checker_client=scripted("checker", checker_script),
        clock=FakeClock(),
    )
    return create_app(settings)


@pytest.fixture
def client():
    app = make_app()
    with TestClient(app, raise_server_exceptions=False) as c:
        c.post("/v1/corpora", json={"name": "laws"})
        c.post(
            "/v1/corpora/laws/documents",
            json={
                "doc_id": "tp",
                "title": "Tourist Police",
                "page_count": 2,
                "language_hint": "mixed",
                "text": "ট্যুরিস্ট পুলিশ ২০১৩ সালে গঠিত হয়। Tourist Police formed in 2013.",
            },
        )
        c.post(
            "/v1/corpora/laws/documents",
            json={
                "doc_id": "rp",
                "title": "River Police",
                "page_count": 1,
                "language_hint": "mixed",
                "text": "নৌ পুলিশ নদীপথে টহল দেয়। River Police patrol waterways.",
            },
        )
        yield c


class TestHealthAndCorpora:
    def test_health(self, client):
        body = client.get("/v1/health").json()
        assert body["status"] == "ok"
        assert body["version"]

    def test_corpora_listing(self, client):
        body = client.get("/v1/corpora").json()
        assert body["corpora"] == [{"corpus_id": "laws", "documents": 2, "chunks": 2}]

    def test_duplicate_corpus_conflict(self, client):
        assert client.post("/v1/corpora", json={"name": "laws"}).status_code == 409

    def test_ingest_unknown_corpus_404(self, client):
        response = client.post(
            "/v1/corpora/ghost/documents",
            json={
                "doc_id": "x",
                "title": "t",
                "page_count": 1,
                "language_hint": "en",
                "text": "hello",
            },
        )
        assert response.status_code == 404

    def test_duplicate_document_conflict(self, client):
        response = client.post(
            "/v1/corpora/laws/documents",
            json={
                "doc_id": "tp",
                "title": "again",
                "page_count": 1,
                "language_hint": "en",
                "text": "repeat",
            },
        )
        assert response.status_code == 409


class TestQueryStatusCases:
    def test_valid_request_200_with_trace(self, client):
        response = client.post(
            "/v1/query",
            json={"corpus_id": "laws", "question": "পুলিশ কবে গঠিত?", "pipeline": "vanilla"},
        )
        assert response.status_code == 200
        body = response.json()
        assert body["answer"] == "scripted answer"
        assert len(body["trace"]) == 1
        assert body["trace"][0]["verdict"] is None
        assert body["trace"][0]["chunk_count"] == len(body["chunks"]) == 2
        assert body["refinement_exhausted"] is False

    def test_unknown_corpus_404(self, client):
        response = client.post(
            "/v1/query",
            json={"corpus_id": "nope", "question": "q", "pipeline": "vanilla"},
        )
        assert response.status_code == 404

    def test_oversized_question_400_names_limit(self, client):
        response = client.post(
            "/v1/query",
            json={"corpus_id": "laws", "question": "x" * 5000, "pipeline": "vanilla"},
        )
        assert response.status_code == 400
        assert "4096" in response.json()["detail"]

    def test_missing_field_400_with_field_messages(self, client):
        response = client.post("/v1/query", json={"corpus_id": "laws"})
        assert response.status_code == 400
        fields = {err["field"] for err in response.json()["detail"]}
        assert "question" in fields and "pipeline" in fields

    def test_empty_question_400(self, client):
        response = client.post(
            "/v1/query", json={"corpus_id": "laws", "question": "", "pipeline": "vanilla"}
        )
        assert response.status_code == 400

    def test_backend_failure_502_with_partial_trace(self):
        app = make_app(generator_script=[])  # generator exhausted: backend failure
        with TestClient(app, raise_server_exceptions=False) as c:
            c.post("/v1/corpora", json={"name": "laws"})
            c.post(
                "/v1/corpora/laws/documents",
                json={
                    "doc_id": "d",
                    "title": "t",
                    "page_count": 1,
                    "language_hint": "en",
                    "text": "some text",
                },
            )
            response = c.post(
                "/v1/query",
                json={"corpus_id": "laws", "question": "q", "pipeline": "vanilla"},
            )
        assert response.status_code == 502
        body = response.json()
        assert len(body["trace"]) == 1  # retrieval completed before the failure

    def test_advanced_pipeline_trace_shows_refinement(self):
        app = make_app(checker_script=[IRRELEVANT, RELEVANT] * 4)
        with TestClient(app, raise_server_exceptions=False) as c:
            c.post("/v1/corpora", json={"name": "laws"})
            c.post(
                "/v1/corpora/laws/documents",
                json={
                    "doc_id": "d",
                    "title": "t",
                    "page_count": 1,
                    "language_hint": "en",
                    "text": "tourist police formed 2013",
                },
            )
            response = c.post(
                "/v1/query",
                json={"corpus_id": "laws", "question": "when?", "pipeline": "advanced"},
            )
        body = response.json()
        assert [entry["verdict"] for entry in body["trace"]] == ["irrelevant", "relevant"]
        assert body["trace"][0]["refined_query"] == "refined question"
        assert body["trace"][1]["query_used"] == "refined question"

    def test_fail_open_verdict_marked_on_wire(self):
        app = make_app(checker_script=["unparseable gibberish"] * 4)
        with TestClient(app, raise_server_exceptions=False) as c:
            c.post("/v1/corpora", json={"name": "laws"})
            c.post(
                "/v1/corpora/laws/documents",
                json={
                    "doc_id": "d",
                    "title": "t",
                    "page_count": 1,
                    "language_hint": "en",
                    "text": "text body",
                },
            )
            response = c.post(
                "/v1/query",
                json={"corpus_id": "laws", "question": "q", "pipeline": "advanced"},
            )
        assert response.json()["trace"][0]["verdict"] == "fail_open"


class TestOverrides:
    def test_top_k_override_changes_chunk_count(self, client):
        response = client.post(
            "/v1/query",
            json={
                "corpus_id": "laws",
                "question": "পুলিশ?",
                "pipeline": "vanilla",
                "overrides": {"retrieval": {"top_k": 1, "fetch_k": 4}},
            },
        )
        assert response.status_code == 200
        assert len(response.json()["chunks"]) == 1

    def test_unknown_override_rejected(self, client):
        response = client.post(
            "/v1/query",
            json={
                "corpus_id": "laws",
                "question": "q",
                "pipeline": "vanilla",
                "overrides": {"beam_width": 7},
            },
        )
        assert response.status_code == 400
        assert "beam_width" in response.json()["detail"]

    def test_endpoint_override_rejected(self, client):
        response = client.post(
            "/v1/query",
            json={
                "corpus_id": "laws",
                "question": "q",
                "pipeline": "vanilla",
                "overrides": {"generator": {"endpoint_url": "http://evil"}},
            },
        )
        assert response.status_code == 400
        assert "environment" in response.json()["detail"]

    def test_mode_override_rejected(self, client):
        response = client.post(
            "/v1/query",
            json={
                "corpus_id": "laws",
                "question": "q",
                "pipeline": "vanilla",
                "overrides": {"mode": "advanced"},
            },
        )
        assert response.status_code == 400


class TestWireSchema:
    def test_identical_requests_identical_bodies(self, client):
        payload = {"corpus_id": "laws", "question": "পুলিশ কবে গঠিত?", "pipeline": "vanilla"}
        first = client.post("/v1/query", json=payload)
        second = client.post("/v1/query", json=payload)
        assert first.content == second.content

    def test_response_round_trips_through_model(self, client):
        payload = {"corpus_id": "laws", "question": "নৌ পুলিশ কী করে?", "pipeline": "vanilla"}
        raw = client.post("/v1/query", json=payload).json()
        reparsed = QueryResponse.model_validate(raw)
        assert reparsed.model_dump() == raw

    def test_scores_survive_serialization_exactly(self, client):
        payload = {"corpus_id": "laws", "question": "টহল", "pipeline": "vanilla"}
        body = client.post("/v1/query", json=payload).json()
        again = client.post("/v1/query", json=payload).json()
        assert [c["score"] for c in body["chunks"]] == [c["score"] for c in again["chunks"]]
