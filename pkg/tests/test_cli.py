"""CLI exit codes, file pairing, eval sweep outputs."""

from __future__ import annotations

import json

import pytest

from gazette_rag.cli import (
    EXIT_CONFIG,
    EXIT_ITEM_FAILURES,
    EXIT_OK,
    EvalRuntime,
    build_parser,
    cmd_query,
    main,
    run_eval_command,
)
from gazette_rag.corpus import Corpus, ingest_document, load_corpus
from gazette_rag.embeddings import EmbedderConfig
from gazette_rag.ingest import ChunkConfig, DocumentMeta
from gazette_rag.llm import LlmClient, LlmConfig, ScriptedBackend

RELEVANT = "VERDICT: RELEVANT"


def scripted(role, script):
    return LlmClient(
        LlmConfig(role=role, backend="scripted", model_id=f"{role}-test"),
        backend=ScriptedBackend(script),
    )


def write_manifest(tmp_path, docs):
    path = tmp_path / "manifest.jsonl"
    lines = [
        json.dumps(
            {"doc_id": d, "title": d, "page_count": p, "language_hint": "mixed"},
            ensure_ascii=False,
        )
        for d, p in docs
    ]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def write_testset(tmp_path, n=3):
    path = tmp_path / "testset.jsonl"
    records = [
        {
            "id": f"q{i}",
            "question": f"প্রশ্ন {i}?",
            "ground_truth": f"উত্তর {i}",
            "domain": "factual",
        }
        for i in range(n)
    ]
    path.write_text(
        "\n".join(json.dumps(r, ensure_ascii=False) for r in records) + "\n", encoding="utf-8"
    )
    return path


def small_corpus() -> Corpus:
    corpus = Corpus("laws", EmbedderConfig(backend="mock", model_id="mock", dim=64))
    meta = DocumentMeta(doc_id="d1", title="doc", page_count=1, language_hint="mixed")
    ingest_document(corpus, meta, "ট্যুরিস্ট পুলিশ ২০১৩ সালে গঠিত হয়। " * 4, ChunkConfig())
    return corpus


class TestStats:
    def test_stats_renders_mean(self, tmp_path, capsys):
        pages = [36, 1, 2, 3, 4, 5, 6, 7, 2, 3, 4, 5, 3]  # 13 docs, 81 pages
        manifest = write_manifest(tmp_path, [(f"g{i}", p) for i, p in enumerate(pages)])
        assert main(["stats", "--manifest", str(manifest)]) == EXIT_OK
        out = capsys.readouterr().out
        assert "6.23" in out and "13" in out and "81" in out

    def test_missing_manifest_exits_2(self, tmp_path):
        assert main(["stats", "--manifest", str(tmp_path / "nope.jsonl")]) == EXIT_CONFIG


class TestIngest:
    def test_ingest_persists_corpus(self, tmp_path):
        manifest = write_manifest(tmp_path, [("alpha", 2), ("beta", 1)])
        file_a = tmp_path / "alpha.txt"
        file_a.write_text("নথি আলফা বিষয়বস্তু। " * 10, encoding="utf-8")
        file_b = tmp_path / "beta.txt"
        file_b.write_text("beta document body. " * 10, encoding="utf-8")
        data_dir = tmp_path / "data"
        code = main(
            [
                "--data-dir",
                str(data_dir),
                "ingest",
                "--corpus",
                "laws",
                "--manifest",
                str(manifest),
                str(file_a),
                str(file_b),
            ]
        )
        assert code == EXIT_OK
        corpus = load_corpus("laws", data_dir, EmbedderConfig(backend="mock", dim=256))
        assert set(corpus.docs) == {"alpha", "beta"}
        assert len(corpus.store) >= 2

    def test_count_mismatch_exits_2(self, tmp_path):
        manifest = write_manifest(tmp_path, [("alpha", 2), ("beta", 1)])
        only = tmp_path / "alpha.txt"
        only.write_text("content", encoding="utf-8")
        code = main(
            [
                "--data-dir",
                str(tmp_path / "data"),
                "ingest",
                "--corpus",
                "laws",
                "--manifest",
                str(manifest),
                str(only),
            ]
        )
        assert code == EXIT_CONFIG


class TestQuery:
    def test_query_prints_answer_and_trace(self, tmp_path, capsys):
        args = build_parser().parse_args(
            ["query", "--corpus", "laws", "--pipeline", "advanced", "পুলিশ কবে গঠিত?"]
        )
        runtime = EvalRuntime(
            corpus=small_corpus(),
            generator=scripted("generator", ["চূড়ান্ত উত্তর"]),
            checker=scripted("checker", [RELEVANT]),
        )
        assert cmd_query(args, runtime=runtime) == EXIT_OK
        out = capsys.readouterr().out
        assert "চূড়ান্ত উত্তর" in out
        assert "iteration 0" in out

    def test_query_without_generator_exits_2(self, tmp_path):
        args = build_parser().parse_args(
            ["query", "--corpus", "laws", "--pipeline", "vanilla", "q"]
        )
        runtime = EvalRuntime(corpus=small_corpus(), generator=None, checker=None)
        with pytest.raises(Exception):
            cmd_query(args, runtime=runtime)


class TestEval:
    def _args(self, tmp_path, testset, out_dir, extra=()):
        return build_parser().parse_args(
            [
                "eval",
                "--corpus",
                "laws",
                "--testset",
                str(testset),
                "--out",
                str(out_dir),
                *extra,
            ]
        )

    def _factory(self, answers_per_run=8):
        corpus = small_corpus()

        def factory(cfg):
            return EvalRuntime(
                corpus=corpus,
                generator=scripted("generator", [f"উত্তর {i}" for i in range(answers_per_run)]),
                checker=scripted("checker", [RELEVANT] * answers_per_run),
            )

        return factory

    def test_three_items_exit_0_report_n3(self, tmp_path):
        testset = write_testset(tmp_path, n=3)
        out_dir = tmp_path / "out"
        args = self._args(tmp_path, testset, out_dir, ["--pipeline", "vanilla"])
        assert run_eval_command(args, runtime_factory=self._factory()) == EXIT_OK
        report = json.loads((out_dir / "report_vanilla.json").read_text(encoding="utf-8"))
        assert report["n_items"] == 3
        answers = (out_dir / "answers_vanilla.jsonl").read_text(encoding="utf-8").splitlines()
        assert len(answers) == 3
        first = json.loads(answers[0])
        assert set(first) == {"id", "answer", "pipeline", "trace_digest"}

    def test_missing_testset_exits_2(self, tmp_path):
        code = main(
            [
                "eval",
                "--corpus",
                "laws",
                "--testset",
                str(tmp_path / "absent.jsonl"),
                "--out",
                str(tmp_path / "out"),
            ]
        )
        assert code == EXIT_CONFIG

    def test_temperature_sweep_writes_one_report_per_value(self, tmp_path):
        testset = write_testset(tmp_path, n=2)
        out_dir = tmp_path / "out"
        args = self._args(
            tmp_path,
            testset,
            out_dir,
            ["--pipeline", "advanced", "--temperature", "0.1,0.4,0.7,1.0"],
        )
        assert run_eval_command(args, runtime_factory=self._factory()) == EXIT_OK
        reports = sorted(p.name for p in out_dir.glob("report_advanced_t*.json"))
        assert reports == [
            "report_advanced_t0.1.json",
            "report_advanced_t0.4.json",
            "report_advanced_t0.7.json",
            "report_advanced_t1.0.json",
        ]
        for name in reports:
            echo = json.loads((out_dir / name).read_text(encoding="utf-8"))["config"]
            assert str(echo["temperature"]) in name

    def test_both_pipelines_write_comparison(self, tmp_path):
        testset = write_testset(tmp_path, n=2)
        out_dir = tmp_path / "out"
        args = self._args(tmp_path, testset, out_dir, ["--pipeline", "both"])
        assert run_eval_command(args, runtime_factory=self._factory()) == EXIT_OK
        assert (out_dir / "comparison.txt").exists()
        assert (out_dir / "report_vanilla.json").exists()
        assert (out_dir / "report_advanced.json").exists()

    def test_item_failure_exits_1_and_lists_failures(self, tmp_path, capsys):
        testset = write_testset(tmp_path, n=3)
        out_dir = tmp_path / "out"
        args = self._args(tmp_path, testset, out_dir, ["--pipeline", "vanilla"])
        # generator has only 2 replies for 3 items: the third query fails
        code = run_eval_command(args, runtime_factory=self._factory(answers_per_run=2))
        assert code == EXIT_ITEM_FAILURES
        err = capsys.readouterr().err
        assert "FAILED q2" in err
        report = json.loads((out_dir / "report_vanilla.json").read_text(encoding="utf-8"))
        assert report["n_items"] == 2
        assert report["config"]["failed_items"] == ["q2"]

    def test_bad_temperature_list_exits_2(self, tmp_path):
        testset = write_testset(tmp_path, n=1)
        code = main(
            [
                "eval",
                "--corpus",
                "laws",
                "--testset",
                str(testset),
                "--out",
                str(tmp_path / "out"),
                "--temperature",
                "hot,cold",
            ]
        )
        assert code == EXIT_CONFIG


class TestServe:
    def test_bad_addr_exits_2(self, tmp_path):
        assert main(["serve", "--addr", "no-port-here"]) == EXIT_CONFIG
