from __future__ import annotations

import pytest

from gazette_rag.corpus import Corpus, ingest_document
from gazette_rag.embeddings import EmbedderConfig
from gazette_rag.ingest import ChunkConfig, DocumentMeta


def pytest_runtest_logreport(report):
    # One visible PASS/FAIL line per acceptance criterion.
    if report.when == "call" and "test_acceptance" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        outcome = "PASS" if report.passed else "FAIL"
        print(f"\nACCEPTANCE {name}: {outcome}")

# Small bilingual snippets used to build throwaway corpora. Content loosely
# resembles gazette notices so retrieval behaves like the real thing.
SAMPLE_DOCS = [
    (
        "tourist-police",
        "ট্যুরিস্ট পুলিশ ইউনিট ২০১৩ সালে গঠিত হয়। পর্যটন এলাকায় নিরাপত্তা দেওয়াই এর দায়িত্ব। "
        "The Tourist Police unit protects visitors in designated tourist zones.",
    ),
    (
        "river-police",
        "নৌ পুলিশ নদীপথে আইন প্রয়োগ করে। River Police patrol inland waterways and enforce "
        "shipping regulations on rivers.",
    ),
    (
        "training-directive",
        "Recruit constables must complete six months of basic training. প্রশিক্ষণ শেষে "
        "সনদ প্রদান করা হয়।",
    ),
    (
        "arrest-protocol",
        "Arrest protocols require an entry in the station diary within two hours. "
        "গ্রেপ্তারের পর চব্বিশ ঘণ্টার মধ্যে আদালতে হাজির করতে হবে।",
    ),
]


@pytest.fixture
def embedder_cfg() -> EmbedderConfig:
    return EmbedderConfig(backend="mock", model_id="mock", dim=64)


@pytest.fixture
def sample_corpus(embedder_cfg) -> Corpus:
    corpus = Corpus("gazettes", embedder_cfg)
    cfg = ChunkConfig(chunk_size=200, chunk_overlap=20)
    for doc_id, text in SAMPLE_DOCS:
        meta = DocumentMeta(
            doc_id=doc_id, title=doc_id.replace("-", " "), page_count=2, language_hint="mixed"
        )
        ingest_document(corpus, meta, text, cfg)
    return corpus
