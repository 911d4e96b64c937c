"""Testset loading, answer scoring, and report rendering.

Answers are scored by cosine similarity between the embedding of the
generated answer and the embedding of the ground truth, aggregated as an
overall mean with population standard deviation plus per-domain means.
Human 1-5 ratings are aggregated separately: per-response mean over
evaluators, then the mean of those means.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path

import httpx

from .embeddings import EmbedderConfig, cosine_similarity, embed_texts
from .errors import EvaluationError, MalformedTestsetError

DOMAINS = (
    "factual",
    "temporal",
    "gazette_search",
    "bangla_dialect",
    "statistical",
    "grammar_spell_error",
    "out_of_context",
    "others",
)


@dataclass(frozen=True)
class QaItem:
    id: str
    question: str
    ground_truth: str
    domain: str

    def __post_init__(self):
        for name in ("id", "question", "ground_truth", "domain"):
            if not getattr(self, name):
                raise EvaluationError(f"QaItem.{name} must be non-empty")
        if self.domain not in DOMAINS:
            raise EvaluationError(f"unknown domain label {self.domain!r}")


@dataclass(frozen=True)
class EvalReport:
    per_item: list[tuple[str, float]]
    mean: float
    std: float  # population standard deviation
    domain_means: dict[str, float]
    n_items: int


@dataclass(frozen=True)
class HumanRatings:
    per_response: dict[str, list[int]]


@dataclass(frozen=True)
class HumanScoreSummary:
    per_response_mean: dict[str, float]
    overall: float


@dataclass(frozen=True)
class ComparisonRow:
    domain: str
    vanilla_mean: float
    advanced_mean: float
    delta: float


@dataclass(frozen=True)
class ComparisonTable:
    overall_vanilla: tuple[float, float]  # (mean, std)
    overall_advanced: tuple[float, float]
    overall_delta: float
    rows: list[ComparisonRow]


_TESTSET_FIELDS = {"id", "question", "ground_truth", "domain"}


def load_testset(path: str | Path) -> list[QaItem]:
    """Read a line-delimited JSON testset; errors carry 1-based line numbers."""
    path = Path(path)
    if not path.exists():
        raise MalformedTestsetError(f"testset not found: {path}")
    items: list[QaItem] = []
    seen: dict[str, int] = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedTestsetError(f"testset line {lineno}: invalid JSON ({exc})") from exc
        if not isinstance(record, dict) or set(record) != _TESTSET_FIELDS:
            raise MalformedTestsetError(
                f"testset line {lineno}: record must have exactly the fields "
                f"{sorted(_TESTSET_FIELDS)}"
            )
        if record["domain"] not in DOMAINS:
            raise MalformedTestsetError(
                f"testset line {lineno}: unknown domain label {record['domain']!r}"
            )
        if record["id"] in seen:
            raise MalformedTestsetError(
                f"testset line {lineno}: duplicate id {record['id']!r} "
                f"(first seen on line {seen[record['id']]})"
            )
        seen[record["id"]] = lineno
        try:
            items.append(QaItem(**record))
        except EvaluationError as exc:
            raise MalformedTestsetError(f"testset line {lineno}: {exc}") from exc
    return items


def mean_and_population_std(scores: list[float]) -> tuple[float, float]:
    if not scores:
        raise EvaluationError("cannot aggregate zero scores")
    mu = math.fsum(scores) / len(scores)
    variance = math.fsum((s - mu) ** 2 for s in scores) / len(scores)
    return mu, math.sqrt(variance)


def semantic_similarity_eval(
    answers: dict[str, str],
    items: list[QaItem],
    embedder: EmbedderConfig,
    *,
    transport: httpx.BaseTransport | None = None,
) -> EvalReport:
    """Score each answer against its ground truth and aggregate."""
    if not items:
        raise EvaluationError("cannot evaluate an empty item list")
    missing = [item.id for item in items if item.id not in answers]
    if missing:
        raise EvaluationError(f"missing answers for items: {missing}")
    texts = [answers[item.id] for item in items] + [item.ground_truth for item in items]
    vectors = embed_texts(texts, embedder, transport=transport)
    answer_vecs, truth_vecs = vectors[: len(items)], vectors[len(items) :]
    per_item = [
        (item.id, cosine_similarity(av, tv))
        for item, av, tv in zip(items, answer_vecs, truth_vecs)
    ]
    mu, sigma = mean_and_population_std([score for _, score in per_item])
    by_domain: dict[str, list[float]] = {}
    for item, (_, score) in zip(items, per_item):
        by_domain.setdefault(item.domain, []).append(score)
    domain_means = {
        domain: math.fsum(scores) / len(scores) for domain, scores in sorted(by_domain.items())
    }
    return EvalReport(
        per_item=per_item, mean=mu, std=sigma, domain_means=domain_means, n_items=len(per_item)
    )


def aggregate_human_scores(ratings: HumanRatings) -> HumanScoreSummary:
    """Average each response over its evaluators, then average the responses."""
    if not ratings.per_response:
        raise EvaluationError("no human ratings to aggregate")
    counts = {len(scores) for scores in ratings.per_response.values()}
    if len(counts) != 1 or counts == {0}:
        raise EvaluationError("every response needs the same nonzero number of evaluator ratings")
    for response_id, scores in ratings.per_response.items():
        for score in scores:
            if not isinstance(score, int) or not 1 <= score <= 5:
                raise EvaluationError(
                    f"rating {score!r} for response {response_id!r} outside the 1-5 scale"
                )
    per_response_mean = {
        response_id: math.fsum(scores) / len(scores)
        for response_id, scores in ratings.per_response.items()
    }
    overall = math.fsum(per_response_mean.values()) / len(per_response_mean)
    return HumanScoreSummary(per_response_mean=per_response_mean, overall=overall)


def format_mu_sigma(mean: float, std: float) -> str:
    """Render a mean/spread pair the way the report tables print them."""
    return f"{mean:.2f} ± {std:.3f}"


def compare_pipelines(vanilla: EvalReport, advanced: EvalReport) -> ComparisonTable:
    """Per-domain and overall deltas (advanced minus vanilla) over the same items."""
    vanilla_ids = {item_id for item_id, _ in vanilla.per_item}
    advanced_ids = {item_id for item_id, _ in advanced.per_item}
    if vanilla_ids != advanced_ids:
        raise EvaluationError(
            f"reports cover different items: {sorted(vanilla_ids ^ advanced_ids)}"
        )
    domains = sorted(set(vanilla.domain_means) | set(advanced.domain_means))
    rows = [
        ComparisonRow(
            domain=d,
            vanilla_mean=vanilla.domain_means[d],
            advanced_mean=advanced.domain_means[d],
            delta=advanced.domain_means[d] - vanilla.domain_means[d],
        )
        for d in domains
    ]
    return ComparisonTable(
        overall_vanilla=(vanilla.mean, vanilla.std),
        overall_advanced=(advanced.mean, advanced.std),
        overall_delta=advanced.mean - vanilla.mean,
        rows=rows,
    )


def render_comparison(table: ComparisonTable) -> str:
    header = f"{'Domain':<20} {'Vanilla':>14} {'Advanced':>14} {'Delta':>8}"
    lines = [header, "-" * len(header)]
    for row in table.rows:
        lines.append(
            f"{row.domain:<20} {row.vanilla_mean:>14.2f} {row.advanced_mean:>14.2f} "
            f"{row.delta:>+8.2f}"
        )
    lines.append(
        f"{'overall':<20} {format_mu_sigma(*table.overall_vanilla):>14} "
        f"{format_mu_sigma(*table.overall_advanced):>14} {table.overall_delta:>+8.2f}"
    )
    return "\n".join(lines)


def render_report(report: EvalReport) -> str:
    lines = [
        f"items      {report.n_items}",
        f"similarity {format_mu_sigma(report.mean, report.std)}",
        "per-domain means:",
    ]
    width = max(len(d) for d in report.domain_means) if report.domain_means else 0
    for domain, value in report.domain_means.items():
        lines.append(f"  {domain:<{width}}  {value:.2f}")
    return "\n".join(lines)


def report_to_dict(report: EvalReport, config_echo: dict | None = None) -> dict:
    return {
        "n_items": report.n_items,
        "mean": report.mean,
        "std": report.std,
        "domain_means": report.domain_means,
        "per_item": [[item_id, score] for item_id, score in report.per_item],
        "config": config_echo or {},
    }


def write_answers_file(path: str | Path, entries: list[dict]) -> None:
    """Write line-delimited answer records: {id, answer, pipeline, trace_digest}."""
    lines = [
        json.dumps(
            {
                "id": e["id"],
                "answer": e["answer"],
                "pipeline": e["pipeline"],
                "trace_digest": e["trace_digest"],
            },
            ensure_ascii=False,
            sort_keys=True,
        )
        for e in entries
    ]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")


def digest_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()
