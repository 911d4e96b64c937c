"""Persisted vector index with exact cosine search and MMR selection.

The corpus scale (tens of documents, hundreds of chunks) makes a brute-force
scan exact, fast, and trivially deterministic, so there is no approximate
index. Searches read an immutable snapshot of the record tuple; writers swap
snapshots under a lock (many readers or one writer).
"""

from __future__ import annotations

import hashlib
import json
import threading
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .embeddings import EmbeddingVector, cosine_similarity
from .errors import ConfigError, DimensionMismatchError, StoreError, StoreFormatError

STORE_FORMAT_VERSION = 1
DEFAULT_TOP_K = 4
DEFAULT_MMR_LAMBDA = 0.5
_FETCH_K_FLOOR = 20


@dataclass(frozen=True)
class StoreRecord:
    """One retrievable chunk: id, provenance, text, embedding."""

    chunk_id: str
    doc_id: str
    text: str
    embedding: EmbeddingVector


@dataclass(frozen=True)
class ScoredChunk:
    """A record paired with its cosine similarity to the query."""

    record: StoreRecord
    score: float


@dataclass
class RetrievalConfig:
    top_k: int = DEFAULT_TOP_K
    fetch_k: int | None = None  # None -> max(20, 4 * top_k)
    mmr_lambda: float = DEFAULT_MMR_LAMBDA
    strategy: str = "mmr"  # "mmr" or "similarity"

    def __post_init__(self):
        if self.top_k < 1:
            raise ConfigError("top_k must be positive")
        if self.fetch_k is None:
            self.fetch_k = max(_FETCH_K_FLOOR, 4 * self.top_k)
        if self.fetch_k < self.top_k:
            raise ConfigError("fetch_k must be >= top_k")
        if not 0.0 <= self.mmr_lambda <= 1.0:
            raise ConfigError("mmr_lambda must lie in [0, 1]")
        if self.strategy not in ("mmr", "similarity"):
            raise ConfigError(f"unknown retrieval strategy {self.strategy!r}")


class VectorStore:
    """Exact (non-approximate) cosine index over uniform-dim records."""

    def __init__(self, dim: int, model_id: str):
        if dim <= 0:
            raise ConfigError("store dim must be positive")
        self.dim = dim
        self.model_id = model_id
        self._records: tuple[StoreRecord, ...] = ()
        self._ids: frozenset[str] = frozenset()
        self._write_lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._records)

    @property
    def records(self) -> tuple[StoreRecord, ...]:
        return self._records

    def _check_vector(self, vec: EmbeddingVector, what: str) -> None:
        if vec.dim != self.dim or vec.model_id != self.model_id:
            raise DimensionMismatchError(
                f"{what} has (dim={vec.dim}, model={vec.model_id!r}); "
                f"store holds (dim={self.dim}, model={self.model_id!r})"
            )

    def add_chunks(self, records: list[StoreRecord]) -> int:
        """Add a batch atomically: either every record lands or none does."""
        with self._write_lock:
            seen: set[str] = set()
            for rec in records:
                self._check_vector(rec.embedding, f"record {rec.chunk_id!r}")
                if rec.chunk_id in self._ids or rec.chunk_id in seen:
                    raise StoreError(f"duplicate chunk_id {rec.chunk_id!r}")
                seen.add(rec.chunk_id)
            self._records = self._records + tuple(records)
            self._ids = self._ids | seen
            return len(records)

    def top_k_by_similarity(self, query: EmbeddingVector, k: int) -> list[ScoredChunk]:
        """Exact top-k scan, descending score, ties broken by ascending chunk_id."""
        if k < 0:
            raise ValueError("k must be >= 0")
        self._check_vector(query, "query")
        snapshot = self._records
        scored = [ScoredChunk(rec, cosine_similarity(query, rec.embedding)) for rec in snapshot]
        scored.sort(key=lambda sc: (-sc.score, sc.record.chunk_id))
        return scored[:k]

    def mmr_select(self, query: EmbeddingVector, cfg: RetrievalConfig) -> list[ScoredChunk]:
        """Diversified selection from the fetch_k most query-similar candidates.

        Seeds with the single most similar chunk, then repeatedly takes the
        candidate maximizing ``lambda * sim(q, d) - (1 - lambda) * max_s sim(d, s)``
        over the already-selected set. Ties go to the ascending chunk_id. Scores
        reported on the result are plain query similarities, not the objective.
        """
        candidates = self.top_k_by_similarity(query, cfg.fetch_k)
        if not candidates:
            return []
        lam = cfg.mmr_lambda
        selected = [candidates[0]]
        remaining = list(candidates[1:])
        # max similarity of each remaining candidate to anything selected so far
        best_to_selected = {
            sc.record.chunk_id: cosine_similarity(sc.record.embedding, selected[0].record.embedding)
            for sc in remaining
        }
        while remaining and len(selected) < cfg.top_k:
            best = None
            best_objective = float("-inf")
            for sc in remaining:
                objective = lam * sc.score - (1.0 - lam) * best_to_selected[sc.record.chunk_id]
                if best is None or objective > best_objective or (
                    objective == best_objective and sc.record.chunk_id < best.record.chunk_id
                ):
                    best, best_objective = sc, objective
            selected.append(best)
            remaining.remove(best)
            for sc in remaining:
                sim = cosine_similarity(sc.record.embedding, best.record.embedding)
                if sim > best_to_selected[sc.record.chunk_id]:
                    best_to_selected[sc.record.chunk_id] = sim
        return selected[: cfg.top_k]

    def retrieve(self, query: EmbeddingVector, cfg: RetrievalConfig) -> list[ScoredChunk]:
        if cfg.strategy == "similarity":
            return self.top_k_by_similarity(query, cfg.top_k)
        return self.mmr_select(query, cfg)


def _record_line(rec: StoreRecord) -> str:
    payload = {
        "chunk_id": rec.chunk_id,
        "doc_id": rec.doc_id,
        "text": rec.text,
        "embedding": [f"{x:.17g}" for x in rec.embedding.values.tolist()],
    }
    return json.dumps(payload, ensure_ascii=False, sort_keys=True)


def persist_store(store: VectorStore, path: str | Path) -> None:
    """Write the store to ``path`` with a checksummed, versioned header."""
    lines = [_record_line(rec) for rec in store.records]
    body = "\n".join(lines)
    header = {
        "format_version": STORE_FORMAT_VERSION,
        "dim": store.dim,
        "model_id": store.model_id,
        "record_count": len(lines),
        "checksum": hashlib.sha256(body.encode("utf-8")).hexdigest(),
    }
    text = json.dumps(header, ensure_ascii=False, sort_keys=True) + "\n"
    if lines:
        text += body + "\n"
    Path(path).write_text(text, encoding="utf-8")


def load_store(path: str | Path) -> VectorStore:
    """Load a persisted store, rejecting version mismatches and corruption."""
    path = Path(path)
    if not path.exists():
        raise StoreFormatError(f"store file not found: {path}")
    raw = path.read_text(encoding="utf-8")
    header_line, _, body = raw.partition("\n")
    try:
        header = json.loads(header_line)
    except json.JSONDecodeError as exc:
        raise StoreFormatError(f"unreadable store header: {exc}") from exc
    version = header.get("format_version")
    if version != STORE_FORMAT_VERSION:
        raise StoreFormatError(
            f"store format version {version} unsupported (expected {STORE_FORMAT_VERSION})"
        )
    body = body[:-1] if body.endswith("\n") else body
    checksum = hashlib.sha256(body.encode("utf-8")).hexdigest()
    if checksum != header.get("checksum"):
        raise StoreFormatError("store checksum mismatch: file is corrupt or truncated")
    lines = body.split("\n") if body else []
    if len(lines) != header.get("record_count"):
        raise StoreFormatError(
            f"store holds {len(lines)} records, header declares {header.get('record_count')}"
        )
    store = VectorStore(dim=header["dim"], model_id=header["model_id"])
    records = []
    for line in lines:
        item = json.loads(line)
        values = np.array([float(s) for s in item["embedding"]], dtype=np.float64)
        records.append(
            StoreRecord(
                chunk_id=item["chunk_id"],
                doc_id=item["doc_id"],
                text=item["text"],
                embedding=EmbeddingVector(values=values, dim=store.dim, model_id=store.model_id),
            )
        )
    store.add_chunks(records)
    return store
