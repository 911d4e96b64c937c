"""Bilingual retrieval-augmented question answering over gazette corpora.

The package ships two answering flows over the same corpus machinery: a
single-pass retrieve-then-generate pipeline, and an advanced pipeline that
checks retrieved chunks for relevance and iteratively refines the query
before generating. See the demos/ directory for narrative walkthroughs and
the README for the CLI and HTTP service.
"""

__version__ = "0.1.0"

from .corpus import Corpus, IngestReport, ingest_document, load_corpus, save_corpus
from .embeddings import (
    EmbedderConfig,
    EmbeddingVector,
    cosine_similarity,
    embed_texts,
    mock_embed,
)
from .evaluation import (
    DOMAINS,
    EvalReport,
    HumanRatings,
    QaItem,
    aggregate_human_scores,
    compare_pipelines,
    format_mu_sigma,
    load_testset,
    semantic_similarity_eval,
)
from .ingest import (
    Chunk,
    ChunkConfig,
    ChunkDraft,
    DocumentMeta,
    StatsReport,
    corpus_stats,
    load_manifest,
    preprocess_document,
    split_text,
)
from .llm import (
    LlmClient,
    LlmConfig,
    RelevanceVerdict,
    ScriptedBackend,
    chat_complete,
    check_relevance,
    parse_verdict,
)
from .pipeline import (
    IterationTrace,
    PipelineConfig,
    Query,
    RagPipeline,
    RagResult,
    build_generation_prompt,
    load_pipeline_config,
    rag_result_to_dict,
)
from .store import (
    RetrievalConfig,
    ScoredChunk,
    StoreRecord,
    VectorStore,
    load_store,
    persist_store,
)

__all__ = [
    "__version__",
    "Corpus",
    "IngestReport",
    "ingest_document",
    "load_corpus",
    "save_corpus",
    "EmbedderConfig",
    "EmbeddingVector",
    "cosine_similarity",
    "embed_texts",
    "mock_embed",
    "DOMAINS",
    "EvalReport",
    "HumanRatings",
    "QaItem",
    "aggregate_human_scores",
    "compare_pipelines",
    "format_mu_sigma",
    "load_testset",
    "semantic_similarity_eval",
    "Chunk",
    "ChunkConfig",
    "ChunkDraft",
    "DocumentMeta",
    "StatsReport",
    "corpus_stats",
    "load_manifest",
    "preprocess_document",
    "split_text",
    "LlmClient",
    "LlmConfig",
    "RelevanceVerdict",
    "ScriptedBackend",
    "chat_complete",
    "check_relevance",
    "parse_verdict",
    "IterationTrace",
    "PipelineConfig",
    "Query",
    "RagPipeline",
    "RagResult",
    "build_generation_prompt",
    "load_pipeline_config",
    "rag_result_to_dict",
    "RetrievalConfig",
    "ScoredChunk",
    "StoreRecord",
    "VectorStore",
    "load_store",
    "persist_store",
]
