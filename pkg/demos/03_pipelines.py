"""
Vanilla vs. advanced pipeline, side by side
===========================================

The vanilla flow retrieves once and generates. The advanced flow asks a
checker model whether the retrieved chunks can actually answer the query;
on an IRRELEVANT verdict it re-retrieves with the checker's refined query,
up to max_refinements times. With a vague query the first retrieval drags
in off-topic chunks, and the refinement round replaces them.

LLM calls are scripted here so the demo runs offline; swap in HTTP-backed
clients (see the README) to use hosted models.
"""

from gazette_rag import (
    ChunkConfig,
    Corpus,
    DocumentMeta,
    EmbedderConfig,
    LlmClient,
    LlmConfig,
    PipelineConfig,
    Query,
    RagPipeline,
    RetrievalConfig,
    ScriptedBackend,
    ingest_document,
)

DOCS = [
    ("tp-overview", "ট্যুরিস্ট পুলিশ ইউনিট পর্যটকদের নিরাপত্তা দেয়। Tourist Police protect visitors at beaches and resorts."),
    ("tp-formation", "ট্যুরিস্ট পুলিশ ২০১৩ সালে গঠিত হয়। The Tourist Police unit was formed in 2013 by government order."),
    ("tp-duties", "ট্যুরিস্ট পুলিশ পর্যটন এলাকায় টহল দেয় এবং অভিযোগ গ্রহণ করে। Tourist Police patrol tourist zones."),
    ("river-patrol", "নৌ পুলিশ নদীপথে টহল দেয়। River Police patrol the waterways and enforce fishing rules."),
    ("training-note", "Recruit constables complete six months of training at the academy. প্রশিক্ষণ শেষে সনদ দেওয়া হয়।"),
    ("budget-notice", "অর্থ মন্ত্রণালয়ের বাজেট বিজ্ঞপ্তি। The finance ministry budget circular lists allocations for stationery."),
]

QUESTION = "পুলিশ কবে গঠিত?"  # vague: "when was the police formed?"


def build_corpus() -> Corpus:
    corpus = Corpus("gazettes", EmbedderConfig(backend="mock", model_id="mock", dim=64))
    for doc_id, text in DOCS:
        meta = DocumentMeta(doc_id=doc_id, title=doc_id, page_count=1, language_hint="mixed")
        ingest_document(corpus, meta, text, ChunkConfig(chunk_size=400, chunk_overlap=0))
    return corpus


def scripted(role: str, script: list[str]) -> LlmClient:
    cfg = LlmConfig(role=role, backend="scripted", model_id=f"scripted-{role}")
    return LlmClient(cfg, backend=ScriptedBackend(script))


def show(tag: str, result):
    print(f"--- {tag} ---")
    for it in result.trace:
        verdict = it.verdict.verdict if it.verdict else "(no check)"
        chunks = ", ".join(sc.record.doc_id for sc in it.retrieved)
        print(f"  round {it.iteration}: query={it.query_used!r}")
        print(f"           retrieved [{chunks}] -> {verdict}")
    print(f"  answer: {result.answer}\n")


retrieval = RetrievalConfig(top_k=3, fetch_k=6, mmr_lambda=0.5)
base = dict(retrieval=retrieval, generator=LlmConfig(role="generator", backend="scripted"))

# Vanilla: one retrieval, no checking. The off-topic budget notice rides along.
corpus = build_corpus()
vanilla = RagPipeline(
    corpus,
    PipelineConfig(mode="vanilla", **base),
    generator=scripted("generator", ["২০১৩ সালে (সূত্র অস্পষ্ট)।"]),
)
show("vanilla", vanilla.answer_vanilla(Query(text=QUESTION)))

# Advanced: the checker rejects the first retrieval and supplies a sharper
# query; the second retrieval is all tourist-police chunks.
advanced = RagPipeline(
    corpus,
    PipelineConfig(mode="advanced", max_refinements=3, **base),
    generator=scripted("generator", ["ট্যুরিস্ট পুলিশ ২০১৩ সালে গঠিত হয়।"]),
    checker=scripted(
        "checker",
        [
            "VERDICT: IRRELEVANT\nREFINED_QUERY: ট্যুরিস্ট পুলিশ কবে গঠিত হয়?",
            "VERDICT: RELEVANT",
        ],
    ),
)
result = advanced.answer_advanced(Query(text=QUESTION))
show("advanced", result)

print("the generator prompt always embeds the ORIGINAL question:")
print(" ", QUESTION in result.generator_prompt and "yes" or "no")
