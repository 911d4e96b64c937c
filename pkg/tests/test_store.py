"""Exact search ordering, MMR-vs-oracle equivalence, and store persistence."""

from __future__ import annotations

import random

import numpy as np
import pytest

from gazette_rag.embeddings import EmbeddingVector, cosine_similarity
from gazette_rag.errors import ConfigError, DimensionMismatchError, StoreError, StoreFormatError
from gazette_rag.store import (
    RetrievalConfig,
    StoreRecord,
    VectorStore,
    load_store,
    persist_store,
)
from oracles import brute_force_mmr, ref_cosine


def vec(values, model_id="mock"):
    arr = np.array(values, dtype=np.float64)
    return EmbeddingVector(values=arr, dim=len(arr), model_id=model_id)


def record(chunk_id, values, doc_id="doc", text=None):
    return StoreRecord(
        chunk_id=chunk_id, doc_id=doc_id, text=text or f"text of {chunk_id}", embedding=vec(values)
    )


def random_store(rng: random.Random, n: int, dim: int) -> tuple[VectorStore, list]:
    store = VectorStore(dim=dim, model_id="mock")
    raw = []
    for i in range(n):
        if raw and rng.random() < 0.2:
            values = list(rng.choice(raw)[1])  # duplicate an earlier vector: forces ties
        else:
            values = [rng.uniform(-1.0, 1.0) for _ in range(dim)]
        raw.append((f"c{i:03d}", values))
    store.add_chunks([record(cid, values) for cid, values in raw])
    return store, raw


class TestAddChunks:
    def test_adds_batch(self):
        store = VectorStore(dim=3, model_id="mock")
        n = store.add_chunks([record(f"c{i}", [1.0, float(i), 0.5]) for i in range(3)])
        assert n == 3 and len(store) == 3

    def test_duplicate_id_rolls_back_whole_batch(self):
        store = VectorStore(dim=3, model_id="mock")
        store.add_chunks([record("a", [1.0, 0.0, 0.0])])
        with pytest.raises(StoreError, match="duplicate"):
            store.add_chunks([record("b", [0.0, 1.0, 0.0]), record("a", [0.0, 0.0, 1.0])])
        assert len(store) == 1

    def test_duplicate_within_batch_rejected(self):
        store = VectorStore(dim=3, model_id="mock")
        with pytest.raises(StoreError, match="duplicate"):
            store.add_chunks([record("a", [1.0, 0.0, 0.0]), record("a", [0.0, 1.0, 0.0])])
        assert len(store) == 0

    def test_dim_mismatch_rejected(self):
        store = VectorStore(dim=256, model_id="mock")
        with pytest.raises(DimensionMismatchError):
            store.add_chunks([record("a", [1.0] * 128)])

    def test_model_mismatch_rejected(self):
        store = VectorStore(dim=3, model_id="other-model")
        with pytest.raises(DimensionMismatchError):
            store.add_chunks([record("a", [1.0, 0.0, 0.0])])


class TestTopK:
    def test_k_zero_is_empty(self):
        store, _ = random_store(random.Random(0), 5, 4)
        assert store.top_k_by_similarity(vec([1.0, 0.0, 0.0, 0.0]), 0) == []

    def test_k_truncates_to_store_size(self):
        store = VectorStore(dim=2, model_id="mock")
        store.add_chunks([record("only", [1.0, 0.0])])
        out = store.top_k_by_similarity(vec([0.5, 0.5]), 5)
        assert [sc.record.chunk_id for sc in out] == ["only"]

    def test_exact_ordering_against_full_sort(self):
        rng = random.Random(42)
        store, raw = random_store(rng, 12, 6)
        query = [rng.uniform(-1, 1) for _ in range(6)]
        got = store.top_k_by_similarity(vec(query), 12)
        expected = sorted(raw, key=lambda it: (-ref_cosine(query, it[1]), it[0]))
        assert [sc.record.chunk_id for sc in got] == [cid for cid, _ in expected]
        for sc in got:
            assert sc.score == ref_cosine(query, dict(raw)[sc.record.chunk_id])

    def test_hand_constructed_ordering(self):
        store = VectorStore(dim=2, model_id="mock")
        store.add_chunks(
            [
                record("east", [1.0, 0.0]),
                record("north", [0.0, 1.0]),
                record("northeast", [1.0, 1.0]),
                record("west", [-1.0, 0.0]),
            ]
        )
        out = store.top_k_by_similarity(vec([1.0, 0.1]), 4)
        assert [sc.record.chunk_id for sc in out] == ["east", "northeast", "north", "west"]

    def test_monotone_containment(self):
        rng = random.Random(17)
        store, _ = random_store(rng, 15, 5)
        query = vec([rng.uniform(-1, 1) for _ in range(5)])
        for k in range(15):
            smaller = store.top_k_by_similarity(query, k)
            larger = store.top_k_by_similarity(query, k + 1)
            assert [s.record.chunk_id for s in smaller] == [
                s.record.chunk_id for s in larger[:k]
            ]

    def test_negative_k_rejected(self):
        store, _ = random_store(random.Random(1), 3, 4)
        with pytest.raises(ValueError):
            store.top_k_by_similarity(vec([1.0, 0.0, 0.0, 0.0]), -1)


class TestMmrSelect:
    def test_lambda_one_equals_topk(self):
        rng = random.Random(5)
        store, _ = random_store(rng, 18, 8)
        query = vec([rng.uniform(-1, 1) for _ in range(8)])
        cfg = RetrievalConfig(top_k=5, fetch_k=12, mmr_lambda=1.0)
        assert store.mmr_select(query, cfg) == store.top_k_by_similarity(query, 12)[:5]

    def test_top_k_one_is_seed(self):
        rng = random.Random(6)
        store, _ = random_store(rng, 10, 4)
        query = vec([rng.uniform(-1, 1) for _ in range(4)])
        for lam in (0.0, 0.5, 1.0):
            cfg = RetrievalConfig(top_k=1, fetch_k=10, mmr_lambda=lam)
            out = store.mmr_select(query, cfg)
            assert out == store.top_k_by_similarity(query, 1)

    def test_near_duplicates_get_diversified(self):
        # Two near-identical "north-ish" vectors: similarity-only retrieval
        # returns both first; MMR at lambda 0.5 must interleave the east one.
        store = VectorStore(dim=2, model_id="mock")
        store.add_chunks(
            [
                record("n1", [0.02, 1.0]),
                record("n2", [0.021, 1.0]),
                record("e1", [1.0, 0.35]),
                record("s1", [0.4, -1.0]),
            ]
        )
        query = vec([0.3, 1.0])
        cfg = RetrievalConfig(top_k=3, fetch_k=4, mmr_lambda=0.5)
        got = [sc.record.chunk_id for sc in store.mmr_select(query, cfg)]
        raw = [(r.chunk_id, list(r.embedding.values)) for r in store.records]
        assert got == brute_force_mmr(raw, [0.3, 1.0], top_k=3, fetch_k=4, lam=0.5)
        assert got[0] in ("n1", "n2") and "e1" in got[:3]

    def test_scores_are_query_similarity_not_objective(self):
        rng = random.Random(8)
        store, raw = random_store(rng, 10, 4)
        query = [rng.uniform(-1, 1) for _ in range(4)]
        cfg = RetrievalConfig(top_k=4, fetch_k=8, mmr_lambda=0.3)
        for sc in store.mmr_select(vec(query), cfg):
            assert sc.score == ref_cosine(query, dict(raw)[sc.record.chunk_id])

    @pytest.mark.parametrize("lam", [0.0, 0.3, 0.5, 0.7, 1.0])
    def test_oracle_equivalence_random_instances(self, lam):
        rng = random.Random(int(lam * 1000) + 77)
        for _ in range(40):
            n = rng.randint(1, 20)
            dim = rng.randint(2, 16)
            store, raw = random_store(rng, n, dim)
            query = [rng.uniform(-1, 1) for _ in range(dim)]
            top_k = rng.randint(1, 5)
            fetch_k = rng.randint(top_k, max(top_k, n + 3))
            cfg = RetrievalConfig(top_k=top_k, fetch_k=fetch_k, mmr_lambda=lam)
            got = [sc.record.chunk_id for sc in store.mmr_select(vec(query), cfg)]
            assert got == brute_force_mmr(raw, query, top_k, fetch_k, lam)

    def test_empty_store(self):
        store = VectorStore(dim=4, model_id="mock")
        cfg = RetrievalConfig(top_k=3)
        assert store.mmr_select(vec([1.0, 0.0, 0.0, 0.0]), cfg) == []

    def test_deterministic_across_runs(self):
        rng = random.Random(21)
        store, _ = random_store(rng, 20, 6)
        query = vec([rng.uniform(-1, 1) for _ in range(6)])
        cfg = RetrievalConfig(top_k=5, fetch_k=20, mmr_lambda=0.5)
        assert store.mmr_select(query, cfg) == store.mmr_select(query, cfg)


class TestRetrievalConfig:
    def test_default_fetch_k_floor(self):
        assert RetrievalConfig(top_k=4).fetch_k == 20
        assert RetrievalConfig(top_k=10).fetch_k == 40

    def test_fetch_k_below_top_k_rejected(self):
        with pytest.raises(ConfigError):
            RetrievalConfig(top_k=5, fetch_k=3)

    def test_lambda_range_enforced(self):
        with pytest.raises(ConfigError):
            RetrievalConfig(mmr_lambda=1.5)

    def test_unknown_strategy_rejected(self):
        with pytest.raises(ConfigError):
            RetrievalConfig(strategy="hybrid")


class TestPersistence:
    def _populated(self, rng=None, n=10, dim=6):
        return random_store(rng or random.Random(33), n, dim)

    def test_round_trip_preserves_search_results(self, tmp_path):
        rng = random.Random(33)
        store, _ = self._populated(rng)
        path = tmp_path / "store.jsonl"
        persist_store(store, path)
        loaded = load_store(path)
        assert len(loaded) == len(store)
        for _ in range(5):
            query = vec([rng.uniform(-1, 1) for _ in range(6)])
            assert loaded.top_k_by_similarity(query, 5) == store.top_k_by_similarity(query, 5)

    def test_round_trip_is_bit_exact(self, tmp_path):
        store, raw = self._populated()
        path = tmp_path / "store.jsonl"
        persist_store(store, path)
        loaded = load_store(path)
        for original, reloaded in zip(store.records, loaded.records):
            assert np.array_equal(original.embedding.values, reloaded.embedding.values)
            assert original.text == reloaded.text

    def test_version_mismatch_rejected(self, tmp_path):
        store, _ = self._populated(n=2)
        path = tmp_path / "store.jsonl"
        persist_store(store, path)
        content = path.read_text(encoding="utf-8")
        path.write_text(content.replace('"format_version": 1', '"format_version": 99'))
        with pytest.raises(StoreFormatError, match="version"):
            load_store(path)

    def test_truncated_file_rejected(self, tmp_path):
        store, _ = self._populated(n=6)
        path = tmp_path / "store.jsonl"
        persist_store(store, path)
        raw = path.read_text(encoding="utf-8")
        path.write_text(raw[: len(raw) - 40], encoding="utf-8")
        with pytest.raises(StoreFormatError, match="checksum|records"):
            load_store(path)

    def test_flipped_byte_rejected(self, tmp_path):
        store, _ = self._populated(n=4)
        path = tmp_path / "store.jsonl"
        persist_store(store, path)
        raw = path.read_text(encoding="utf-8")
        position = raw.index("text of") + 3
        path.write_text(raw[:position] + "X" + raw[position + 1 :], encoding="utf-8")
        with pytest.raises(StoreFormatError, match="checksum"):
            load_store(path)

    def test_missing_file_rejected(self, tmp_path):
        with pytest.raises(StoreFormatError, match="not found"):
            load_store(tmp_path / "nope.jsonl")

    def test_empty_store_round_trips(self, tmp_path):
        store = VectorStore(dim=4, model_id="mock")
        path = tmp_path / "empty.jsonl"
        persist_store(store, path)
        loaded = load_store(path)
        assert len(loaded) == 0 and loaded.dim == 4 and loaded.model_id == "mock"
