"""A corpus binds document metadata to an embedded chunk store."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import httpx

from .embeddings import EmbedderConfig, embed_texts
from .errors import ConfigError, DuplicateDocumentError, IngestError
from .ingest import ChunkConfig, DocumentMeta, assign_chunk_ids, split_text
from .store import StoreRecord, VectorStore, load_store, persist_store

_STORE_FILE = "store.jsonl"
_DOCS_FILE = "docs.jsonl"


@dataclass(frozen=True)
class IngestReport:
    chunk_count: int
    chunk_ids: list[str]


class Corpus:
    """Named collection of documents with one shared vector store."""

    def __init__(self, corpus_id: str, embedder: EmbedderConfig, store: VectorStore | None = None):
        if not corpus_id:
            raise ConfigError("corpus_id must be non-empty")
        self.corpus_id = corpus_id
        self.embedder = embedder
        self.store = store or VectorStore(dim=embedder.dim, model_id=embedder.model_id)
        if self.store.dim != embedder.dim or self.store.model_id != embedder.model_id:
            raise ConfigError(
                f"store was built with (dim={self.store.dim}, model={self.store.model_id!r}) "
                f"but embedder is (dim={embedder.dim}, model={embedder.model_id!r})"
            )
        self.docs: dict[str, DocumentMeta] = {}


def ingest_document(
    corpus: Corpus,
    meta: DocumentMeta,
    text: str,
    chunk_cfg: ChunkConfig | None = None,
    *,
    transport: httpx.BaseTransport | None = None,
) -> IngestReport:
    """Chunk, embed, and store one document. All-or-nothing on failure.

    Embeddings are computed before anything touches the store, and the batch
    insert is itself atomic, so a backend failure leaves the corpus unchanged.
    """
    if meta.doc_id in corpus.docs:
        raise DuplicateDocumentError(f"doc_id {meta.doc_id!r} already ingested")
    chunk_cfg = chunk_cfg or ChunkConfig()
    chunks = assign_chunk_ids(meta.doc_id, split_text(text, chunk_cfg))
    if not chunks:
        raise IngestError(f"document {meta.doc_id!r} produced no chunks (empty text?)")
    vectors = embed_texts([c.text for c in chunks], corpus.embedder, transport=transport)
    records = [
        StoreRecord(chunk_id=c.chunk_id, doc_id=c.doc_id, text=c.text, embedding=v)
        for c, v in zip(chunks, vectors)
    ]
    corpus.store.add_chunks(records)
    corpus.docs[meta.doc_id] = meta
    return IngestReport(chunk_count=len(records), chunk_ids=[r.chunk_id for r in records])


def save_corpus(corpus: Corpus, corpora_dir: str | Path) -> Path:
    """Persist store and document metadata under ``corpora_dir/<corpus_id>/``."""
    root = Path(corpora_dir) / corpus.corpus_id
    root.mkdir(parents=True, exist_ok=True)
    persist_store(corpus.store, root / _STORE_FILE)
    lines = [
        json.dumps(
            {
                "doc_id": m.doc_id,
                "title": m.title,
                "page_count": m.page_count,
                "language_hint": m.language_hint,
                "source_path": m.source_path,
            },
            ensure_ascii=False,
            sort_keys=True,
        )
        for m in corpus.docs.values()
    ]
    (root / _DOCS_FILE).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
    return root


def load_corpus(corpus_id: str, corpora_dir: str | Path, embedder: EmbedderConfig) -> Corpus:
    """Load a saved corpus, checking the embedder still matches the store."""
    root = Path(corpora_dir) / corpus_id
    if not root.exists():
        raise IngestError(f"corpus {corpus_id!r} not found under {corpora_dir}")
    store = load_store(root / _STORE_FILE)
    corpus = Corpus(corpus_id, embedder, store=store)
    docs_file = root / _DOCS_FILE
    if docs_file.exists():
        for line in docs_file.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            record = json.loads(line)
            corpus.docs[record["doc_id"]] = DocumentMeta(**record)
    return corpus


def list_corpora(corpora_dir: str | Path) -> list[str]:
    root = Path(corpora_dir)
    if not root.exists():
        return []
    return sorted(p.name for p in root.iterdir() if (p / _STORE_FILE).exists())
