"""HTTP front door: corpus management, querying, health.

Thin adapter over the pipeline: validation failures map to 400 with
field-level messages, unknown corpora to 404, backend failures to 502 with
whatever partial trace the pipeline collected. Wire responses carry the
full refinement trace so clients can show how an answer came to be.
"""

from __future__ import annotations

import os
import threading
import time
from dataclasses import dataclass, field, fields, replace
from typing import Callable, Literal

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import __version__
from .corpus import Corpus, ingest_document, list_corpora, load_corpus
from .embeddings import EmbedderConfig
from .errors import (
    ConfigError,
    DuplicateDocumentError,
    EmbeddingError,
    EmptyCorpusError,
    IngestError,
    LlmBackendError,
    PipelineError,
    StoreError,
)
from .ingest import DocumentMeta
from .llm import LlmClient, LlmConfig, RelevanceVerdict
from .pipeline import MAX_QUERY_CHARS, PipelineConfig, Query, RagPipeline, RagResult
from .store import RetrievalConfig

ENV_PREFIX = "GAZETTE_RAG"


def _env(name: str, default: str = "") -> str:
    return os.environ.get(f"{ENV_PREFIX}_{name}", default)


@dataclass
class ServiceSettings:
    pipeline: PipelineConfig = field(default_factory=PipelineConfig)
    embedder: EmbedderConfig = field(default_factory=EmbedderConfig)
    generator_client: LlmClient | None = None
    checker_client: LlmClient | None = None
    corpora_dir: str | None = None
    template_dir: str | None = None
    max_concurrency: int = 8
    clock: Callable[[], float] = time.perf_counter


def settings_from_env(pipeline: PipelineConfig | None = None) -> ServiceSettings:
    """Build settings from environment variables (endpoints and keys live there)."""
    pipeline = pipeline or PipelineConfig()
    embedder = EmbedderConfig(
        backend=_env("EMBED_BACKEND", "mock"),
        endpoint_url=_env("EMBED_URL"),
        model_id=_env("EMBED_MODEL", "mock"),
        dim=int(_env("EMBED_DIM", "256")),
        api_key=_env("EMBED_API_KEY"),
    )
    generator_client = None
    if _env("GENERATOR_URL"):
        generator_client = LlmClient(
            replace(
                pipeline.generator,
                backend="http",
                endpoint_url=_env("GENERATOR_URL"),
                api_key=_env("GENERATOR_API_KEY"),
            )
        )
    checker_client = None
    if _env("CHECKER_URL"):
        checker_base = pipeline.checker or LlmConfig(role="checker", backend="scripted")
        checker_client = LlmClient(
            replace(
                checker_base,
                backend="http",
                endpoint_url=_env("CHECKER_URL"),
                api_key=_env("CHECKER_API_KEY"),
            )
        )
    return ServiceSettings(
        pipeline=pipeline,
        embedder=embedder,
        generator_client=generator_client,
        checker_client=checker_client,
        corpora_dir=_env("DATA_DIR") or None,
    )


class CreateCorpusRequest(BaseModel):
    name: str


class IngestDocumentRequest(BaseModel):
    doc_id: str
    title: str
    page_count: int
    language_hint: Literal["bn", "en", "mixed"]
    text: str


class QueryRequest(BaseModel):
    corpus_id: str
    question: str
    pipeline: Literal["vanilla", "advanced"]
    overrides: dict | None = None


class WireChunk(BaseModel):
    chunk_id: str
    doc_id: str
    text: str
    score: float


class WireTraceEntry(BaseModel):
    iteration: int
    query_used: str
    verdict: str | None  # "relevant" | "irrelevant" | "fail_open" | null
    refined_query: str | None
    chunk_count: int


class QueryResponse(BaseModel):
    answer: str
    chunks: list[WireChunk]
    trace: list[WireTraceEntry]
    refinement_exhausted: bool
    timings_ms: dict[str, float]


def wire_verdict(verdict: RelevanceVerdict | None) -> str | None:
    if verdict is None:
        return None
    if verdict.parse_failed:
        return "fail_open"
    return verdict.verdict


def trace_to_wire(trace) -> list[WireTraceEntry]:
    return [
        WireTraceEntry(
            iteration=it.iteration,
            query_used=it.query_used,
            verdict=wire_verdict(it.verdict),
            refined_query=it.verdict.refined_query if it.verdict else None,
            chunk_count=len(it.retrieved),
        )
        for it in trace
    ]


def result_to_response(result: RagResult, timings_ms: dict[str, float]) -> QueryResponse:
    return QueryResponse(
        answer=result.answer,
        chunks=[
            WireChunk(
                chunk_id=sc.record.chunk_id,
                doc_id=sc.record.doc_id,
                text=sc.record.text,
                score=sc.score,
            )
            for sc in result.final_chunks
        ],
        trace=trace_to_wire(result.trace),
        refinement_exhausted=result.refinement_exhausted,
        timings_ms=timings_ms,
    )


_NESTED_OVERRIDES = {"retrieval": RetrievalConfig, "generator": LlmConfig, "checker": LlmConfig}
_SECRET_KEYS = ("api_key", "endpoint_url")


def apply_overrides(base: PipelineConfig, overrides: dict) -> PipelineConfig:
    """Merge a partial config dict over ``base``; unknown or secret keys are rejected."""
    allowed = {f.name for f in fields(PipelineConfig)}
    kwargs = {}
    for key, value in overrides.items():
        if key == "mode":
            raise ConfigError("set the pipeline via the 'pipeline' request field, not overrides")
        if key not in allowed:
            raise ConfigError(f"unknown override key {key!r}")
        if key in _NESTED_OVERRIDES:
            cls = _NESTED_OVERRIDES[key]
            if not isinstance(value, dict):
                raise ConfigError(f"override {key!r} must be a mapping")
            nested_allowed = {f.name for f in fields(cls)}
            for nested_key in value:
                if nested_key in _SECRET_KEYS:
                    raise ConfigError(f"{key}.{nested_key} must come from environment variables")
                if nested_key not in nested_allowed:
                    raise ConfigError(f"unknown override key {key}.{nested_key}")
            current = getattr(base, key)
            if current is None:
                kwargs[key] = cls(**value)
            else:
                kwargs[key] = replace(current, **value)
        else:
            kwargs[key] = value
    return replace(base, **kwargs)


def create_app(settings: ServiceSettings | None = None) -> FastAPI:
    settings = settings or settings_from_env()
    app = FastAPI(title="gazette-rag", version=__version__)
    corpora: dict[str, Corpus] = {}
    ingest_locks: dict[str, threading.Lock] = {}
    query_gate = threading.Semaphore(settings.max_concurrency)

    if settings.corpora_dir:
        for corpus_id in list_corpora(settings.corpora_dir):
            corpora[corpus_id] = load_corpus(corpus_id, settings.corpora_dir, settings.embedder)
            ingest_locks[corpus_id] = threading.Lock()

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError):
        details = [
            {"field": ".".join(str(p) for p in err["loc"] if p != "body"), "message": err["msg"]}
            for err in exc.errors()
        ]
        return JSONResponse(status_code=400, content={"detail": details})

    def error(status: int, message: str, **extra):
        return JSONResponse(status_code=status, content={"detail": message, **extra})

    @app.get("/v1/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.get("/v1/corpora")
    def get_corpora():
        return {
            "corpora": [
                {"corpus_id": c.corpus_id, "documents": len(c.docs), "chunks": len(c.store)}
                for c in corpora.values()
            ]
        }

    @app.post("/v1/corpora", status_code=201)
    def create_corpus(req: CreateCorpusRequest):
        if not req.name:
            return error(400, "corpus name must be non-empty")
        if req.name in corpora:
            return error(409, f"corpus {req.name!r} already exists")
        corpora[req.name] = Corpus(req.name, settings.embedder)
        ingest_locks[req.name] = threading.Lock()
        return {"corpus_id": req.name}

    @app.post("/v1/corpora/{corpus_id}/documents")
    def ingest_doc(corpus_id: str, req: IngestDocumentRequest):
        corpus = corpora.get(corpus_id)
        if corpus is None:
            return error(404, f"unknown corpus {corpus_id!r}")
        try:
            meta = DocumentMeta(
                doc_id=req.doc_id,
                title=req.title,
                page_count=req.page_count,
                language_hint=req.language_hint,
                source_path=f"api:{req.doc_id}",
            )
            with ingest_locks[corpus_id]:
                report = ingest_document(corpus, meta, req.text)
        except DuplicateDocumentError as exc:
            return error(409, str(exc))
        except (ConfigError, IngestError, StoreError) as exc:
            return error(400, str(exc))
        except EmbeddingError as exc:
            return error(502, str(exc))
        return {"chunk_count": report.chunk_count, "chunk_ids": report.chunk_ids}

    @app.post("/v1/query", response_model=QueryResponse)
    def handle_query(req: QueryRequest):
        corpus = corpora.get(req.corpus_id)
        if corpus is None:
            return error(404, f"unknown corpus {req.corpus_id!r}")
        if not req.question:
            return error(400, "question must be non-empty")
        if len(req.question) > MAX_QUERY_CHARS:
            return error(
                400,
                f"question exceeds the {MAX_QUERY_CHARS}-character limit "
                f"({len(req.question)} characters)",
            )
        try:
            cfg = apply_overrides(settings.pipeline, req.overrides or {})
            cfg = replace(cfg, mode=req.pipeline)
        except ConfigError as exc:
            return error(400, str(exc))
        started = settings.clock()
        with query_gate:
            try:
                pipeline = RagPipeline(
                    corpus,
                    cfg,
                    generator=settings.generator_client,
                    checker=settings.checker_client if req.pipeline == "advanced" else None,
                    template_dir=settings.template_dir,
                )
                result = pipeline.answer(Query(text=req.question, corpus_id=req.corpus_id))
            except EmptyCorpusError as exc:
                return error(400, str(exc))
            except PipelineError as exc:
                return error(
                    502,
                    str(exc),
                    trace=[entry.model_dump() for entry in trace_to_wire(exc.trace)],
                )
            except (LlmBackendError, EmbeddingError) as exc:
                return error(502, str(exc), trace=[])
            except ConfigError as exc:
                return error(400, str(exc))
        pipeline_ms = (settings.clock() - started) * 1000.0
        timings = {"pipeline": pipeline_ms, "total": pipeline_ms}
        return result_to_response(result, timings)

    return app


def run_server(app: FastAPI, host: str, port: int) -> None:
    import uvicorn

    uvicorn.run(app, host=host, port=port, log_level="info")
