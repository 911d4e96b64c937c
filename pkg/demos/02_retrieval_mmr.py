"""
Similarity search vs. MMR
=========================

Plain top-k similarity happily returns near-duplicate chunks. Maximal
Marginal Relevance trades a little query similarity for diversity:
after seeding with the best match it repeatedly picks the candidate
maximizing  lambda * sim(query, c) - (1 - lambda) * max_selected sim(c, s).

This demo runs fully offline on the deterministic trigram mock embedder.
"""

from gazette_rag import (
    Corpus,
    ChunkConfig,
    DocumentMeta,
    EmbedderConfig,
    RetrievalConfig,
    embed_texts,
    ingest_document,
)

DOCS = [
    ("tp-a", "ট্যুরিস্ট পুলিশ পর্যটকদের নিরাপত্তা দেয়। Tourist Police protect visitors."),
    ("tp-b", "ট্যুরিস্ট পুলিশ পর্যটকদের নিরাপত্তা দেয়। Tourist Police protect visitors!"),
    ("tp-c", "ট্যুরিস্ট পুলিশ ২০১৩ সালে গঠিত হয়। The unit was formed in 2013."),
    ("rp-a", "নৌ পুলিশ নদীপথে আইন প্রয়োগ করে। River Police enforce the law on waterways."),
    ("tr-a", "Recruit training takes six months at the police academy. প্রশিক্ষণ ছয় মাস।"),
]

embedder = EmbedderConfig(backend="mock", model_id="mock", dim=128)
corpus = Corpus("demo", embedder)
for doc_id, text in DOCS:
    meta = DocumentMeta(doc_id=doc_id, title=doc_id, page_count=1, language_hint="mixed")
    ingest_document(corpus, meta, text, ChunkConfig(chunk_size=300, chunk_overlap=0))

query = "ট্যুরিস্ট পুলিশ কী করে?"  # what do the tourist police do?
qvec = embed_texts([query], embedder)[0]

print(f"query: {query}\n")

print("top-3 by pure similarity (both near-duplicates tp-a and tp-b make the cut):")
for sc in corpus.store.top_k_by_similarity(qvec, 3):
    print(f"  {sc.score:+.4f}  {sc.record.chunk_id:<12} {sc.record.text[:60]}")

for lam in (1.0, 0.5, 0.0):
    cfg = RetrievalConfig(top_k=3, fetch_k=5, mmr_lambda=lam)
    picks = corpus.store.mmr_select(qvec, cfg)
    ids = ", ".join(sc.record.chunk_id for sc in picks)
    print(f"\nMMR lambda={lam}: {ids}")
    if lam == 1.0:
        print("  (pure relevance: identical to the similarity ranking)")
    if lam == 0.5:
        print("  (the duplicate is dropped in favor of the river-police chunk)")
    if lam == 0.0:
        print("  (after the seed, pure diversity: spreads across topics)")
