"""
The HTTP service end to end
===========================

Boots the service on a local port with scripted model backends, creates a
corpus over HTTP, ingests a document, and runs a query — the same surface
the web UI consumes. Every response carries the full retrieval/refinement
trace.
"""

import threading
import time

import httpx
import uvicorn

from gazette_rag import EmbedderConfig, LlmClient, LlmConfig, PipelineConfig, ScriptedBackend
from gazette_rag.service import ServiceSettings, create_app
from gazette_rag.store import RetrievalConfig

PORT = 8765


def scripted(role, script):
    cfg = LlmConfig(role=role, backend="scripted", model_id=f"scripted-{role}")
    return LlmClient(cfg, backend=ScriptedBackend(script))


settings = ServiceSettings(
    pipeline=PipelineConfig(
        mode="vanilla",
        retrieval=RetrievalConfig(top_k=2, fetch_k=4),
        generator=LlmConfig(role="generator", backend="scripted"),
    ),
    embedder=EmbedderConfig(backend="mock", model_id="mock", dim=64),
    generator_client=scripted("generator", ["ট্যুরিস্ট পুলিশ ২০১৩ সালে গঠিত হয়।"] * 4),
    checker_client=scripted("checker", ["VERDICT: RELEVANT"] * 4),
)

server = uvicorn.Server(
    uvicorn.Config(create_app(settings), host="127.0.0.1", port=PORT, log_level="warning")
)
thread = threading.Thread(target=server.run, daemon=True)
thread.start()
while not server.started:
    time.sleep(0.05)

base = f"http://127.0.0.1:{PORT}"
with httpx.Client(base_url=base, timeout=10) as client:
    print("health:", client.get("/v1/health").json())

    client.post("/v1/corpora", json={"name": "gazettes"})
    ingest = client.post(
        "/v1/corpora/gazettes/documents",
        json={
            "doc_id": "tp-2013",
            "title": "Tourist Police formation order",
            "page_count": 2,
            "language_hint": "mixed",
            "text": "ট্যুরিস্ট পুলিশ ২০১৩ সালে গঠিত হয়। Tourist Police formed in 2013. "
            "নৌ পুলিশ নদীপথে টহল দেয়।",
        },
    )
    print("ingested:", ingest.json())
    print("corpora:", client.get("/v1/corpora").json())

    answer = client.post(
        "/v1/query",
        json={
            "corpus_id": "gazettes",
            "question": "ট্যুরিস্ট পুলিশ কবে গঠিত হয়?",
            "pipeline": "vanilla",
        },
    ).json()
    print("\nanswer:", answer["answer"])
    for chunk in answer["chunks"]:
        print(f"  chunk {chunk['chunk_id']}  score={chunk['score']:+.4f}")
    for entry in answer["trace"]:
        print(f"  trace round {entry['iteration']}: verdict={entry['verdict']}")

server.should_exit = True
thread.join(timeout=5)
print("\nserver stopped")
