"""Vanilla and advanced retrieval-augmented answering flows.

The vanilla flow is retrieve-once-then-generate. The advanced flow inserts a
relevance check after retrieval: when the checker judges the retrieved chunks
irrelevant it supplies a meaning-preserving rewrite of the query, retrieval
runs again with the rewrite, and the cycle repeats up to ``max_refinements``
times before generation proceeds with whatever the last round retrieved.
Refined queries steer retrieval only; the generator always sees the user's
original question. Every round is recorded in the result trace.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from pathlib import Path

import httpx
import yaml

from .corpus import Corpus
from .embeddings import embed_texts
from .errors import (
    ConfigError,
    EmbeddingError,
    EmptyCorpusError,
    LlmBackendError,
    PipelineError,
)
from .llm import (
    GENERATOR_SYSTEM_PROMPT,
    LlmClient,
    LlmConfig,
    RelevanceVerdict,
    check_relevance,
    join_chunks,
    load_template,
    render_template,
)
from .store import RetrievalConfig, ScoredChunk

MAX_QUERY_CHARS = 4096
MAX_REFINEMENT_CAP = 10
DEFAULT_MAX_REFINEMENTS = 3

_REFUSAL_TEXT = {
    "en": "The retrieved documents do not appear to contain the requested information.",
    "bn": "প্রাপ্ত নথিগুলোতে অনুরোধকৃত তথ্য পাওয়া যায়নি।",
}


@dataclass(frozen=True)
class Query:
    text: str
    corpus_id: str = ""

    def __post_init__(self):
        if not self.text:
            raise ConfigError("query text must be non-empty")
        if len(self.text) > MAX_QUERY_CHARS:
            raise ConfigError(
                f"query text exceeds {MAX_QUERY_CHARS} characters ({len(self.text)})"
            )


@dataclass
class PipelineConfig:
    mode: str = "advanced"  # "vanilla" or "advanced"
    retrieval: RetrievalConfig = field(default_factory=RetrievalConfig)
    generator: LlmConfig = field(default_factory=lambda: LlmConfig(role="generator", backend="scripted"))
    checker: LlmConfig | None = None
    max_refinements: int = DEFAULT_MAX_REFINEMENTS
    prompt_language: str = "en"  # "bn" or "en"
    refuse_on_exhaustion: bool = False

    def __post_init__(self):
        if self.mode not in ("vanilla", "advanced"):
            raise ConfigError(f"unknown pipeline mode {self.mode!r}")
        if not 0 <= self.max_refinements <= MAX_REFINEMENT_CAP:
            raise ConfigError(
                f"max_refinements must lie in [0, {MAX_REFINEMENT_CAP}], got {self.max_refinements}"
            )
        if self.prompt_language not in ("bn", "en"):
            raise ConfigError(f"prompt_language must be bn or en, got {self.prompt_language!r}")


@dataclass(frozen=True)
class IterationTrace:
    iteration: int  # 0-based; iteration 0 always uses the original query
    query_used: str
    retrieved: list[ScoredChunk]
    verdict: RelevanceVerdict | None  # None in vanilla mode


@dataclass(frozen=True)
class RagResult:
    answer: str
    final_chunks: list[ScoredChunk]
    trace: list[IterationTrace]
    refinement_exhausted: bool
    generator_prompt: str


def build_generation_prompt(
    query_text: str,
    chunks: list[ScoredChunk],
    language: str = "en",
    template_dir: str | Path | None = None,
) -> str:
    """Instantiate the generator template with the query and retrieved chunks.

    Chunk texts keep their retrieval order and are joined by a bare ``---``
    delimiter line.
    """
    if not chunks:
        raise ValueError("cannot build a generation prompt from zero chunks")
    template = load_template("generator", language, template_dir)
    return render_template(
        template,
        query=query_text,
        chunks=join_chunks([sc.record.text for sc in chunks]),
        language=language,
    )


class RagPipeline:
    """One corpus plus configured model clients, ready to answer queries."""

    def __init__(
        self,
        corpus: Corpus,
        cfg: PipelineConfig,
        *,
        generator: LlmClient | None = None,
        checker: LlmClient | None = None,
        embed_transport: httpx.BaseTransport | None = None,
        template_dir: str | Path | None = None,
    ):
        self.corpus = corpus
        self.cfg = cfg
        self.generator = generator or LlmClient(cfg.generator)
        self.checker = checker
        if self.checker is None and cfg.mode == "advanced":
            if cfg.checker is None:
                raise ConfigError("advanced mode requires a checker config or client")
            self.checker = LlmClient(cfg.checker)
        self._embed_transport = embed_transport
        self._template_dir = template_dir

    def answer(self, q: Query) -> RagResult:
        if self.cfg.mode == "vanilla":
            return self.answer_vanilla(q)
        return self.answer_advanced(q)

    def _require_nonempty_corpus(self) -> None:
        if len(self.corpus.store) == 0:
            raise EmptyCorpusError(f"corpus {self.corpus.corpus_id!r} holds no chunks")

    def _retrieve(self, query_text: str, trace: list[IterationTrace]) -> list[ScoredChunk]:
        try:
            qvec = embed_texts([query_text], self.corpus.embedder, transport=self._embed_transport)[0]
        except EmbeddingError as exc:
            raise PipelineError(f"query embedding failed: {exc}", trace=list(trace)) from exc
        return self.corpus.store.retrieve(qvec, self.cfg.retrieval)

    def _generate(self, prompt: str, trace: list[IterationTrace]) -> str:
        try:
            return self.generator.chat_complete(GENERATOR_SYSTEM_PROMPT, prompt)
        except LlmBackendError as exc:
            raise PipelineError(f"generation failed: {exc}", trace=list(trace)) from exc

    def answer_vanilla(self, q: Query) -> RagResult:
        """Single retrieval, no relevance checking, generate from what came back."""
        if self.cfg.mode != "vanilla":
            raise ConfigError("answer_vanilla requires mode=vanilla")
        self._require_nonempty_corpus()
        retrieved = self._retrieve(q.text, [])
        trace = [IterationTrace(iteration=0, query_used=q.text, retrieved=retrieved, verdict=None)]
        prompt = build_generation_prompt(
            q.text, retrieved, self.cfg.prompt_language, self._template_dir
        )
        answer = self._generate(prompt, trace)
        return RagResult(
            answer=answer,
            final_chunks=retrieved,
            trace=trace,
            refinement_exhausted=False,
            generator_prompt=prompt,
        )

    def answer_advanced(self, q: Query) -> RagResult:
        """Retrieve, check relevance, refine and re-retrieve while the checker objects.

        Performs at most ``1 + max_refinements`` retrieve/check rounds. A
        relevant (or unparseable, which fails open to relevant) verdict stops
        the loop; exhausting the budget sets ``refinement_exhausted`` and
        generation proceeds with the last round's chunks. The generator prompt
        always embeds the original query text.
        """
        if self.cfg.mode != "advanced":
            raise ConfigError("answer_advanced requires mode=advanced")
        self._require_nonempty_corpus()
        trace: list[IterationTrace] = []
        current_query = q.text
        exhausted = False
        final_chunks: list[ScoredChunk] = []
        for iteration in range(self.cfg.max_refinements + 1):
            retrieved = self._retrieve(current_query, trace)
            try:
                verdict = check_relevance(
                    self.checker,
                    current_query,
                    [sc.record.text for sc in retrieved],
                    language=self.cfg.prompt_language,
                    template_dir=self._template_dir,
                )
            except LlmBackendError as exc:
                raise PipelineError(f"relevance check failed: {exc}", trace=list(trace)) from exc
            trace.append(
                IterationTrace(
                    iteration=iteration,
                    query_used=current_query,
                    retrieved=retrieved,
                    verdict=verdict,
                )
            )
            final_chunks = retrieved
            if verdict.verdict == "irrelevant" and verdict.refined_query:
                if iteration == self.cfg.max_refinements:
                    exhausted = True
                else:
                    current_query = verdict.refined_query
                    continue
            break
        if exhausted and self.cfg.refuse_on_exhaustion:
            return RagResult(
                answer=_REFUSAL_TEXT[self.cfg.prompt_language],
                final_chunks=final_chunks,
                trace=trace,
                refinement_exhausted=True,
                generator_prompt="",
            )
        prompt = build_generation_prompt(
            q.text, final_chunks, self.cfg.prompt_language, self._template_dir
        )
        answer = self._generate(prompt, trace)
        return RagResult(
            answer=answer,
            final_chunks=final_chunks,
            trace=trace,
            refinement_exhausted=exhausted,
            generator_prompt=prompt,
        )


def verdict_to_dict(verdict: RelevanceVerdict | None) -> dict | None:
    if verdict is None:
        return None
    return {
        "verdict": verdict.verdict,
        "refined_query": verdict.refined_query,
        "parse_failed": verdict.parse_failed,
        "raw_response": verdict.raw_response,
    }


def scored_chunk_to_dict(sc: ScoredChunk) -> dict:
    return {
        "chunk_id": sc.record.chunk_id,
        "doc_id": sc.record.doc_id,
        "text": sc.record.text,
        "score": sc.score,
    }


def rag_result_to_dict(result: RagResult) -> dict:
    """Canonical dict form of a result; stable across runs and platforms."""
    return {
        "answer": result.answer,
        "final_chunks": [scored_chunk_to_dict(sc) for sc in result.final_chunks],
        "trace": [
            {
                "iteration": it.iteration,
                "query_used": it.query_used,
                "retrieved": [scored_chunk_to_dict(sc) for sc in it.retrieved],
                "verdict": verdict_to_dict(it.verdict),
            }
            for it in result.trace
        ],
        "refinement_exhausted": result.refinement_exhausted,
        "generator_prompt": result.generator_prompt,
    }


_SECRET_KEYS = ("api_key", "endpoint_url")


def _build_strict(cls, data: dict, context: str):
    allowed = {f.name for f in fields(cls)}
    for key in data:
        if key in _SECRET_KEYS:
            raise ConfigError(
                f"{context}.{key} must come from environment variables, not config files"
            )
        if key not in allowed:
            raise ConfigError(f"unknown key {context}.{key}")
    return cls(**data)


def load_pipeline_config(path: str | Path) -> PipelineConfig:
    """Read a pipeline config file (YAML or JSON). Unknown keys are rejected."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"pipeline config not found: {path}")
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ConfigError(f"unreadable pipeline config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"pipeline config {path} must be a mapping")
    top_allowed = {f.name for f in fields(PipelineConfig)}
    for key in data:
        if key not in top_allowed:
            raise ConfigError(f"unknown key {key!r} in pipeline config")
    kwargs = dict(data)
    if "retrieval" in kwargs:
        kwargs["retrieval"] = _build_strict(RetrievalConfig, kwargs["retrieval"], "retrieval")
    if "generator" in kwargs:
        kwargs["generator"] = _build_strict(LlmConfig, kwargs["generator"], "generator")
    if kwargs.get("checker") is not None:
        kwargs["checker"] = _build_strict(LlmConfig, kwargs["checker"], "checker")
    return PipelineConfig(**kwargs)
