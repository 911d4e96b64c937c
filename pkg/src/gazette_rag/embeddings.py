"""Embedding backends and cosine similarity.

Two backends produce query/chunk vectors: a generic HTTP protocol for hosted
multilingual models, and a fully deterministic in-process mock used for tests
and offline runs. All reductions (dot products, norms) go through
``math.fsum``, which is correctly rounded, so similarity scores are
bit-identical across platforms regardless of BLAS.
"""

from __future__ import annotations

import hashlib
import math
import time
import unicodedata
from dataclasses import dataclass, field

import httpx
import numpy as np

from .errors import ConfigError, DimensionMismatchError, EmbeddingError

MOCK_HASH_SEED = 0x5EED
_EMBED_RETRIES = 3
_BACKOFF_BASE_S = 0.5
DEFAULT_MAX_CONNECTIONS = 4


@dataclass(eq=False)
class EmbeddingVector:
    """A fixed-length float64 vector tagged with its producing model."""

    values: np.ndarray
    dim: int
    model_id: str

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 1 or len(self.values) != self.dim:
            raise DimensionMismatchError(
                f"vector has {self.values.shape} values, expected dim {self.dim}"
            )
        if norm(self.values) == 0.0:
            raise EmbeddingError("zero-norm embedding vector")
        self.values.flags.writeable = False

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, EmbeddingVector)
            and self.dim == other.dim
            and self.model_id == other.model_id
            and np.array_equal(self.values, other.values)
        )


@dataclass
class EmbedderConfig:
    """How to reach (or fake) the embedding model."""

    backend: str = "mock"  # "http" or "mock"
    endpoint_url: str = ""
    model_id: str = "mock"
    dim: int = 256
    timeout: float = 30.0
    batch_size: int = 16
    api_key: str = field(default="", repr=False)

    def __post_init__(self):
        if self.backend not in ("http", "mock"):
            raise ConfigError(f"unknown embedder backend {self.backend!r}")
        if self.dim <= 0:
            raise ConfigError("embedder dim must be positive")
        if self.batch_size < 1:
            raise ConfigError("batch_size must be >= 1")
        if self.backend == "http" and not self.endpoint_url:
            raise ConfigError("http embedder requires endpoint_url")


def dot(u: np.ndarray, v: np.ndarray) -> float:
    """Correctly rounded dot product (platform-independent)."""
    return math.fsum((u * v).tolist())


def norm(u: np.ndarray) -> float:
    return math.sqrt(math.fsum((u * u).tolist()))


def _stable_hash64(gram: str) -> int:
    digest = hashlib.blake2b(
        gram.encode("utf-8"), digest_size=8, key=MOCK_HASH_SEED.to_bytes(8, "big")
    ).digest()
    return int.from_bytes(digest, "big")


def mock_embed(text: str, dim: int, model_id: str = "mock") -> EmbeddingVector:
    """Deterministic embedding: character trigrams feature-hashed into ``dim`` buckets.

    The text is NFC-normalized first so canonically equivalent spellings (a
    concern for Bangla combining marks) hash identically. Texts shorter than
    three characters contribute themselves as a single gram, which keeps the
    norm strictly positive. Output is L2-normalized.
    """
    if not text:
        raise EmbeddingError("cannot embed empty text")
    if dim < 8:
        raise ConfigError("mock embedder requires dim >= 8")
    normalized = unicodedata.normalize("NFC", text)
    if len(normalized) >= 3:
        grams = [normalized[i : i + 3] for i in range(len(normalized) - 2)]
    else:
        grams = [normalized]
    buckets = np.zeros(dim, dtype=np.float64)
    for gram in grams:
        buckets[_stable_hash64(gram) % dim] += 1.0
    return EmbeddingVector(values=buckets / norm(buckets), dim=dim, model_id=model_id)


def cosine_similarity(u: EmbeddingVector, v: EmbeddingVector) -> float:
    """Cosine of the angle between two vectors, clamped to [-1, 1].

    Raises on dim/model mismatch rather than silently comparing apples to
    oranges; zero-norm inputs are rejected at construction time.
    """
    if u.dim != v.dim or u.model_id != v.model_id:
        raise DimensionMismatchError(
            f"cannot compare ({u.dim}, {u.model_id!r}) with ({v.dim}, {v.model_id!r})"
        )
    nu, nv = norm(u.values), norm(v.values)
    if nu == 0.0 or nv == 0.0:
        raise EmbeddingError("zero-norm vector in cosine similarity")
    return min(1.0, max(-1.0, dot(u.values, v.values) / (nu * nv)))


def _http_embed_batch(
    client: httpx.Client, cfg: EmbedderConfig, batch: list[str]
) -> list[list[float]]:
    payload = {"model": cfg.model_id, "input": batch}
    response = client.post(cfg.endpoint_url, json=payload)
    if response.status_code != 200:
        raise EmbeddingError(
            f"embedding backend returned HTTP {response.status_code}: {response.text[:200]}"
        )
    body = response.json()
    rows = sorted(body["data"], key=lambda item: item["index"])
    if len(rows) != len(batch):
        raise EmbeddingError(f"backend returned {len(rows)} embeddings for {len(batch)} inputs")
    return [row["embedding"] for row in rows]


def embed_texts(
    texts: list[str],
    cfg: EmbedderConfig,
    *,
    transport: httpx.BaseTransport | None = None,
    sleep=time.sleep,
    max_connections: int = DEFAULT_MAX_CONNECTIONS,
) -> list[EmbeddingVector]:
    """Embed ``texts`` in order, batching HTTP requests at ``cfg.batch_size``.

    Transport failures are retried up to 3 times with exponential backoff,
    then surfaced as :class:`EmbeddingError`. ``transport`` and ``sleep`` are
    injection points for tests.
    """
    for i, text in enumerate(texts):
        if not text:
            raise EmbeddingError(f"empty text at position {i}")
    if cfg.backend == "mock":
        return [mock_embed(text, cfg.dim, model_id=cfg.model_id) for text in texts]

    headers = {"Authorization": f"Bearer {cfg.api_key}"} if cfg.api_key else {}
    vectors: list[EmbeddingVector] = []
    with httpx.Client(
        transport=transport,
        timeout=cfg.timeout,
        headers=headers,
        limits=httpx.Limits(max_connections=max_connections),
    ) as client:
        for start in range(0, len(texts), cfg.batch_size):
            batch = texts[start : start + cfg.batch_size]
            for attempt in range(_EMBED_RETRIES + 1):
                try:
                    rows = _http_embed_batch(client, cfg, batch)
                    break
                except httpx.TransportError as exc:
                    if attempt == _EMBED_RETRIES:
                        raise EmbeddingError(
                            f"embedding backend unreachable after {attempt + 1} attempts: {exc}"
                        ) from exc
                    sleep(_BACKOFF_BASE_S * 2**attempt)
            for row in rows:
                if len(row) != cfg.dim:
                    raise DimensionMismatchError(
                        f"backend returned dim {len(row)}, configured dim {cfg.dim}"
                    )
                vectors.append(
                    EmbeddingVector(
                        values=np.array(row, dtype=np.float64),
                        dim=cfg.dim,
                        model_id=cfg.model_id,
                    )
                )
    return vectors
