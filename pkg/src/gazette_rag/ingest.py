"""Document preprocessing, text chunking, and corpus statistics.

The splitter mirrors the recursive-character strategy common in retrieval
pipelines, adapted for bilingual text: separators are tried in priority
order (paragraph, line, Bangla danda, sentence, word, character fallback)
and every chunk is an exact substring of the source, so char spans stay
valid for citation display. All offsets are Unicode scalar indices, never
bytes; byte counting breaks on Bangla.
"""

from __future__ import annotations

import json
import shlex
import subprocess
import tempfile
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError, IngestError, OcrCommandError

DEFAULT_CHUNK_SIZE = 1000
DEFAULT_CHUNK_OVERLAP = 150
DEFAULT_SEPARATORS = ("\n\n", "\n", "।", ". ", " ", "")  # U+0964 is the danda
PAGE_SEPARATOR = "\x0c"
LANGUAGE_HINTS = ("bn", "en", "mixed")


@dataclass(frozen=True)
class DocumentMeta:
    doc_id: str
    title: str
    page_count: int
    language_hint: str
    source_path: str = ""

    def __post_init__(self):
        if not self.doc_id:
            raise ConfigError("doc_id must be non-empty")
        if self.page_count < 1:
            raise ConfigError(f"page_count must be >= 1, got {self.page_count}")
        if self.language_hint not in LANGUAGE_HINTS:
            raise ConfigError(
                f"language_hint must be one of {LANGUAGE_HINTS}, got {self.language_hint!r}"
            )


@dataclass(frozen=True)
class ChunkConfig:
    chunk_size: int = DEFAULT_CHUNK_SIZE
    chunk_overlap: int = DEFAULT_CHUNK_OVERLAP
    separators: tuple[str, ...] = DEFAULT_SEPARATORS

    def __post_init__(self):
        if self.chunk_size < 1:
            raise ConfigError("chunk_size must be positive")
        if not 0 <= self.chunk_overlap < self.chunk_size:
            raise ConfigError("chunk_overlap must satisfy 0 <= overlap < chunk_size")
        object.__setattr__(self, "separators", tuple(self.separators))
        if not self.separators or self.separators[-1] != "":
            raise ConfigError('separators must end with "" (character-level fallback)')


@dataclass(frozen=True)
class ChunkDraft:
    """Splitter output before ids are assigned: text plus source offsets."""

    text: str
    char_span: tuple[int, int]


@dataclass(frozen=True)
class Chunk:
    chunk_id: str
    doc_id: str
    index: int
    text: str
    char_span: tuple[int, int]


@dataclass(frozen=True)
class StatsReport:
    total_docs: int
    total_pages: int
    min_pages: int
    max_pages: int
    mean_pages: float


def _fragment_spans(
    text: str, start: int, end: int, separators: tuple[str, ...], chunk_size: int
) -> list[tuple[int, int]]:
    """Cut [start, end) into contiguous pieces of at most chunk_size chars.

    Splits on the highest-priority separator, keeping each separator attached
    to the piece it terminates so the pieces tile the region exactly;
    oversized pieces recurse on the remaining separators, with "" meaning a
    hard cut every chunk_size characters.
    """
    if end - start <= chunk_size:
        return [(start, end)]
    if not separators or separators[0] == "":
        return [(i, min(i + chunk_size, end)) for i in range(start, end, chunk_size)]
    sep, rest = separators[0], separators[1:]
    pieces: list[tuple[int, int]] = []
    cursor = start
    while cursor < end:
        hit = text.find(sep, cursor, end)
        if hit == -1:
            pieces.append((cursor, end))
            break
        pieces.append((cursor, hit + len(sep)))
        cursor = hit + len(sep)
    out: list[tuple[int, int]] = []
    for s, e in pieces:
        if e - s <= chunk_size:
            out.append((s, e))
        else:
            out.extend(_fragment_spans(text, s, e, rest, chunk_size))
    return out


def split_text(text: str, cfg: ChunkConfig) -> list[ChunkDraft]:
    """Split ``text`` into chunk drafts of at most ``cfg.chunk_size`` characters.

    Adjacent pieces are merged greedily up to the size limit; every chunk
    after the first then extends backwards by up to ``cfg.chunk_overlap``
    characters into its predecessor (bounded so the size limit and the
    predecessor's start are never crossed). Deterministic for any input.
    """
    if not text:
        return []
    pieces = _fragment_spans(text, 0, len(text), cfg.separators, cfg.chunk_size)
    merged: list[list[int]] = []
    for s, e in pieces:
        if merged and merged[-1][1] == s and e - merged[-1][0] <= cfg.chunk_size:
            merged[-1][1] = e
        else:
            merged.append([s, e])
    drafts: list[ChunkDraft] = []
    for i, (s, e) in enumerate(merged):
        if i > 0:
            s = max(s - cfg.chunk_overlap, e - cfg.chunk_size, merged[i - 1][0])
        drafts.append(ChunkDraft(text=text[s:e], char_span=(s, e)))
    return drafts


def assign_chunk_ids(doc_id: str, drafts: list[ChunkDraft]) -> list[Chunk]:
    return [
        Chunk(
            chunk_id=f"{doc_id}#{i:05d}",
            doc_id=doc_id,
            index=i,
            text=d.text,
            char_span=d.char_span,
        )
        for i, d in enumerate(drafts)
    ]


def preprocess_document(source_path: str | Path, ocr_command_template: str) -> str:
    """Run the external OCR command over each page and join outputs with form-feeds.

    ``source_path`` is either a single page file or a directory of page files
    (processed in sorted name order). The template must contain ``{input}``
    and ``{output}`` placeholders; page rendering, image cleanup, and the
    actual recognition all live inside the external command.
    """
    source = Path(source_path)
    if not source.exists():
        raise IngestError(f"source not found: {source}")
    if "{input}" not in ocr_command_template or "{output}" not in ocr_command_template:
        raise ConfigError("OCR command template must contain {input} and {output}")
    pages = sorted(p for p in source.iterdir() if p.is_file()) if source.is_dir() else [source]
    if not pages:
        raise IngestError(f"no page files under {source}")
    texts = []
    for page in pages:
        with tempfile.NamedTemporaryFile(suffix=".txt", delete=False) as handle:
            out_path = Path(handle.name)
        try:
            command = ocr_command_template.replace(
                "{input}", shlex.quote(str(page))
            ).replace("{output}", shlex.quote(str(out_path)))
            proc = subprocess.run(command, shell=True, capture_output=True, text=True)
            if proc.returncode != 0:
                raise OcrCommandError(command, proc.returncode, proc.stderr)
            texts.append(out_path.read_text(encoding="utf-8"))
        finally:
            out_path.unlink(missing_ok=True)
    if all(not t for t in texts):
        raise IngestError(f"OCR produced no text for any page of {source}")
    return PAGE_SEPARATOR.join(texts)


def corpus_stats(metas: list[DocumentMeta]) -> StatsReport:
    if not metas:
        raise IngestError("cannot compute stats over an empty document list")
    pages = [m.page_count for m in metas]
    return StatsReport(
        total_docs=len(metas),
        total_pages=sum(pages),
        min_pages=min(pages),
        max_pages=max(pages),
        mean_pages=sum(pages) / len(metas),
    )


def render_stats(report: StatsReport) -> str:
    rows = [
        ("Total documents", str(report.total_docs)),
        ("Total pages", str(report.total_pages)),
        ("Minimum pages", str(report.min_pages)),
        ("Maximum pages", str(report.max_pages)),
        ("Average pages", f"{report.mean_pages:.2f}"),
    ]
    width = max(len(label) for label, _ in rows)
    return "\n".join(f"{label:<{width}}  {value}" for label, value in rows)


_MANIFEST_FIELDS = {"doc_id", "title", "page_count", "language_hint"}


def load_manifest(path: str | Path) -> list[DocumentMeta]:
    """Read a line-delimited JSON manifest of document records."""
    path = Path(path)
    if not path.exists():
        raise IngestError(f"manifest not found: {path}")
    metas = []
    seen: dict[str, int] = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise IngestError(f"manifest line {lineno}: invalid JSON ({exc})") from exc
        if set(record) != _MANIFEST_FIELDS:
            missing = _MANIFEST_FIELDS - set(record)
            extra = set(record) - _MANIFEST_FIELDS
            raise IngestError(
                f"manifest line {lineno}: missing fields {sorted(missing)}, unknown fields {sorted(extra)}"
            )
        if record["doc_id"] in seen:
            raise IngestError(
                f"manifest line {lineno}: duplicate doc_id {record['doc_id']!r} "
                f"(first seen on line {seen[record['doc_id']]})"
            )
        seen[record["doc_id"]] = lineno
        try:
            metas.append(
                DocumentMeta(
                    doc_id=record["doc_id"],
                    title=record["title"],
                    page_count=int(record["page_count"]),
                    language_hint=record["language_hint"],
                )
            )
        except (ConfigError, TypeError, ValueError) as exc:
            raise IngestError(f"manifest line {lineno}: {exc}") from exc
    return metas
