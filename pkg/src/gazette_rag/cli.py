"""Command-line front door: ingest, query, eval, stats, serve.

Exit codes follow the scripting contract: 0 success, 1 when any evaluation
item failed (failures are listed on stderr), 2 for configuration problems
(bad paths, bad flags, unreachable corpora).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, replace
from pathlib import Path

from .corpus import Corpus, ingest_document, load_corpus, save_corpus
from .errors import ConfigError, GazetteRagError, IngestError
from .evaluation import (
    compare_pipelines,
    digest_text,
    load_testset,
    render_comparison,
    render_report,
    report_to_dict,
    semantic_similarity_eval,
    write_answers_file,
)
from .ingest import ChunkConfig, corpus_stats, load_manifest, render_stats
from .llm import LlmClient
from .pipeline import (
    PipelineConfig,
    Query,
    RagPipeline,
    load_pipeline_config,
    rag_result_to_dict,
)
from .service import create_app, run_server, settings_from_env, wire_verdict

EXIT_OK = 0
EXIT_ITEM_FAILURES = 1
EXIT_CONFIG = 2

DEFAULT_DATA_DIR = "corpora"


@dataclass
class EvalRuntime:
    """Resolved dependencies for one evaluation run."""

    corpus: Corpus
    generator: LlmClient | None
    checker: LlmClient | None
    embed_transport: object | None = None


def _default_runtime(args, cfg: PipelineConfig) -> EvalRuntime:
    settings = settings_from_env(cfg)
    corpus = load_corpus(args.corpus, args.data_dir, settings.embedder)
    return EvalRuntime(
        corpus=corpus, generator=settings.generator_client, checker=settings.checker_client
    )


def cmd_stats(args) -> int:
    metas = load_manifest(args.manifest)
    print(render_stats(corpus_stats(metas)))
    return EXIT_OK


def cmd_ingest(args) -> int:
    settings = settings_from_env()
    metas = load_manifest(args.manifest)
    texts = [Path(p) for p in args.texts]
    if len(texts) != len(metas):
        raise ConfigError(
            f"manifest lists {len(metas)} documents but {len(texts)} text files were given"
        )
    try:
        corpus = load_corpus(args.corpus, args.data_dir, settings.embedder)
    except IngestError:
        # corpus does not exist yet; corrupt stores still surface loudly
        corpus = Corpus(args.corpus, settings.embedder)
    chunk_cfg = ChunkConfig(chunk_size=args.chunk_size, chunk_overlap=args.chunk_overlap)
    for meta, text_path in zip(metas, texts):
        if not text_path.exists():
            raise ConfigError(f"text file not found: {text_path}")
        meta = replace(meta, source_path=str(text_path))
        report = ingest_document(
            corpus, meta, text_path.read_text(encoding="utf-8"), chunk_cfg
        )
        print(f"{meta.doc_id}: {report.chunk_count} chunks")
    save_corpus(corpus, args.data_dir)
    print(f"corpus {args.corpus!r}: {len(corpus.store)} chunks total -> {args.data_dir}")
    return EXIT_OK


def _build_pipeline(runtime: EvalRuntime, cfg: PipelineConfig) -> RagPipeline:
    return RagPipeline(
        runtime.corpus,
        cfg,
        generator=runtime.generator,
        checker=runtime.checker if cfg.mode == "advanced" else None,
        embed_transport=runtime.embed_transport,
    )


def cmd_query(args, runtime: EvalRuntime | None = None) -> int:
    cfg = load_pipeline_config(args.config) if args.config else PipelineConfig()
    cfg = replace(cfg, mode=args.pipeline, prompt_language=args.prompt_language)
    if args.top_k is not None:
        cfg = replace(cfg, retrieval=replace(cfg.retrieval, top_k=args.top_k, fetch_k=None))
    runtime = runtime or _default_runtime(args, cfg)
    if runtime.generator is None:
        raise ConfigError("no generator backend configured (set GAZETTE_RAG_GENERATOR_URL)")
    if cfg.mode == "advanced" and runtime.checker is None:
        raise ConfigError("advanced pipeline needs a checker (set GAZETTE_RAG_CHECKER_URL)")
    pipeline = _build_pipeline(runtime, cfg)
    result = pipeline.answer(Query(text=args.question, corpus_id=args.corpus))
    print(result.answer)
    print()
    for sc in result.final_chunks:
        print(f"[{sc.score:+.4f}] {sc.record.chunk_id}: {sc.record.text[:80]!r}")
    for it in result.trace:
        verdict = wire_verdict(it.verdict) or "-"
        print(f"iteration {it.iteration}: {verdict:<10} query={it.query_used!r}")
    if result.refinement_exhausted:
        print("refinement budget exhausted; answered from the last retrieval")
    return EXIT_OK


def _parse_temperatures(raw: str | None) -> list[float | None]:
    if not raw:
        return [None]
    try:
        return [float(part) for part in raw.split(",") if part.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad --temperature list {raw!r}: {exc}") from exc


def run_eval_command(args, runtime_factory=None) -> int:
    """Drive the evaluation over a testset; writes answers and report files."""
    items = load_testset(args.testset)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    base_cfg = load_pipeline_config(args.config) if args.config else PipelineConfig()
    base_cfg = replace(base_cfg, prompt_language=args.prompt_language)
    modes = ["vanilla", "advanced"] if args.pipeline == "both" else [args.pipeline]
    temperatures = _parse_temperatures(args.temperature)
    any_failures = False
    reports: dict[tuple[str, float | None], object] = {}
    for temperature in temperatures:
        for mode in modes:
            cfg = replace(base_cfg, mode=mode)
            if temperature is not None:
                cfg = replace(cfg, generator=replace(cfg.generator, temperature=temperature))
            runtime = (
                runtime_factory(cfg) if runtime_factory else _default_runtime(args, cfg)
            )
            if runtime.generator is None:
                raise ConfigError("no generator backend configured")
            if mode == "advanced" and runtime.checker is None:
                raise ConfigError("advanced pipeline needs a checker backend")
            pipeline = _build_pipeline(runtime, cfg)
            answers: dict[str, str] = {}
            entries = []
            failures = []
            for item in items:
                try:
                    result = pipeline.answer(Query(text=item.question, corpus_id=args.corpus))
                except GazetteRagError as exc:
                    failures.append((item.id, str(exc)))
                    continue
                answers[item.id] = result.answer
                trace_json = json.dumps(
                    rag_result_to_dict(result)["trace"], sort_keys=True, ensure_ascii=False
                )
                entries.append(
                    {
                        "id": item.id,
                        "answer": result.answer,
                        "pipeline": mode,
                        "trace_digest": digest_text(trace_json),
                    }
                )
            suffix = f"_{mode}" + (f"_t{temperature}" if temperature is not None else "")
            write_answers_file(out_dir / f"answers{suffix}.jsonl", entries)
            if failures:
                any_failures = True
                for item_id, message in failures:
                    print(f"FAILED {item_id}: {message}", file=sys.stderr)
            scored_items = [item for item in items if item.id in answers]
            if scored_items:
                report = semantic_similarity_eval(
                    answers, scored_items, runtime.corpus.embedder,
                    transport=runtime.embed_transport,
                )
                reports[(mode, temperature)] = report
                echo = {
                    "pipeline": mode,
                    "temperature": cfg.generator.temperature,
                    "prompt_language": cfg.prompt_language,
                    "corpus": args.corpus,
                    "failed_items": [item_id for item_id, _ in failures],
                }
                (out_dir / f"report{suffix}.json").write_text(
                    json.dumps(report_to_dict(report, echo), ensure_ascii=False, indent=2)
                    + "\n",
                    encoding="utf-8",
                )
                (out_dir / f"report{suffix}.txt").write_text(
                    render_report(report) + "\n", encoding="utf-8"
                )
        if args.pipeline == "both":
            vanilla = reports.get(("vanilla", temperature))
            advanced = reports.get(("advanced", temperature))
            if vanilla and advanced:
                table = render_comparison(compare_pipelines(vanilla, advanced))
                tag = f"_t{temperature}" if temperature is not None else ""
                (out_dir / f"comparison{tag}.txt").write_text(table + "\n", encoding="utf-8")
                print(table)
    return EXIT_ITEM_FAILURES if any_failures else EXIT_OK


def cmd_serve(args) -> int:
    cfg = load_pipeline_config(args.config) if args.config else PipelineConfig()
    settings = settings_from_env(cfg)
    if args.data_dir:
        settings.corpora_dir = args.data_dir
    host, _, port = args.addr.rpartition(":")
    if not host or not port.isdigit():
        raise ConfigError(f"--addr must look like host:port, got {args.addr!r}")
    run_server(create_app(settings), host, int(port))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gazette-rag",
        description="Bilingual retrieval-augmented question answering over gazette corpora.",
    )
    parser.add_argument(
        "--data-dir", default=DEFAULT_DATA_DIR, help="directory holding persisted corpora"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser("ingest", help="chunk, embed, and store documents")
    p_ingest.add_argument("--corpus", required=True)
    p_ingest.add_argument("--manifest", required=True, help="line-delimited document records")
    p_ingest.add_argument(
        "texts", nargs="+", help="plain-text files, one per manifest record, same order"
    )
    p_ingest.add_argument("--chunk-size", type=int, default=1000)
    p_ingest.add_argument("--chunk-overlap", type=int, default=150)
    p_ingest.set_defaults(func=cmd_ingest)

    p_query = sub.add_parser("query", help="answer one question against a corpus")
    p_query.add_argument("--corpus", required=True)
    p_query.add_argument("--pipeline", choices=["vanilla", "advanced"], required=True)
    p_query.add_argument("--top-k", type=int, default=None)
    p_query.add_argument("--prompt-language", choices=["bn", "en"], default="en")
    p_query.add_argument("--config", default=None, help="pipeline config file")
    p_query.add_argument("question")
    p_query.set_defaults(func=cmd_query)

    p_eval = sub.add_parser("eval", help="score a testset and write report files")
    p_eval.add_argument("--corpus", required=True)
    p_eval.add_argument("--testset", required=True)
    p_eval.add_argument("--pipeline", choices=["vanilla", "advanced", "both"], default="both")
    p_eval.add_argument("--temperature", default=None, help="comma-separated sweep values")
    p_eval.add_argument("--prompt-language", choices=["bn", "en"], default="en")
    p_eval.add_argument("--config", default=None, help="pipeline config file")
    p_eval.add_argument("--out", required=True, help="output directory for reports")
    p_eval.set_defaults(func=run_eval_command)

    p_stats = sub.add_parser("stats", help="corpus statistics from a manifest")
    p_stats.add_argument("--manifest", required=True)
    p_stats.set_defaults(func=cmd_stats)

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--addr", default="127.0.0.1:8080")
    p_serve.add_argument("--config", default=None, help="pipeline config file")
    p_serve.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except GazetteRagError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
