"""Chat-completion access for generation, relevance checking, and query refinement.

Backends are deliberately dumb: they take prompts and return text. The
relevance checker's output contract is a two-line grammar (VERDICT /
REFINED_QUERY) parsed by a total, fail-open parser — anything unparseable
degrades to "relevant" so the pipeline falls back to vanilla behavior
instead of looping on garbage.
"""

from __future__ import annotations

import re
import threading
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import httpx

from .errors import ConfigError, LlmBackendError, ScriptExhaustedError

GENERATOR_DEFAULT_TEMPERATURE = 0.1
CHECKER_DEFAULT_TEMPERATURE = 0.0
_CHAT_RETRIES = 2
_BACKOFF_BASE_S = 0.5
CHUNK_DELIMITER = "\n---\n"

GENERATOR_SYSTEM_PROMPT = (
    "You answer questions about bilingual legal and regulatory documents."
)
CHECKER_SYSTEM_PROMPT = (
    "You judge whether retrieved document excerpts can answer a user query."
)


@dataclass
class LlmConfig:
    role: str  # "generator" or "checker"
    endpoint_url: str = ""
    model_id: str = ""
    temperature: float | None = None  # None -> role default
    max_tokens: int = 1024
    timeout: float = 60.0
    backend: str = "http"  # "http" or "scripted"
    api_key: str = field(default="", repr=False)

    def __post_init__(self):
        if self.role not in ("generator", "checker"):
            raise ConfigError(f"unknown LLM role {self.role!r}")
        if self.backend not in ("http", "scripted"):
            raise ConfigError(f"unknown LLM backend {self.backend!r}")
        if self.temperature is None:
            self.temperature = (
                GENERATOR_DEFAULT_TEMPERATURE
                if self.role == "generator"
                else CHECKER_DEFAULT_TEMPERATURE
            )
        if self.temperature < 0:
            raise ConfigError("temperature must be >= 0")
        if self.max_tokens < 1:
            raise ConfigError("max_tokens must be positive")
        if self.backend == "http" and not self.endpoint_url:
            raise ConfigError("http LLM backend requires endpoint_url")


@dataclass(frozen=True)
class RelevanceVerdict:
    verdict: str  # "relevant" or "irrelevant"
    refined_query: str | None
    parse_failed: bool
    raw_response: str


@dataclass(frozen=True)
class ScriptedCall:
    system_prompt: str
    user_prompt: str
    params: dict


class ScriptedBackend:
    """Deterministic test double that replays canned completions in order."""

    def __init__(self, script: list[str]):
        self.script = list(script)
        self.call_log: list[ScriptedCall] = []
        self._lock = threading.Lock()

    def complete(self, cfg: LlmConfig, system_prompt: str, user_prompt: str) -> str:
        with self._lock:
            if len(self.call_log) >= len(self.script):
                raise ScriptExhaustedError(
                    f"scripted backend exhausted after {len(self.script)} calls"
                )
            self.call_log.append(
                ScriptedCall(
                    system_prompt=system_prompt,
                    user_prompt=user_prompt,
                    params={
                        "model": cfg.model_id,
                        "temperature": cfg.temperature,
                        "max_tokens": cfg.max_tokens,
                    },
                )
            )
            return self.script[len(self.call_log) - 1]


class HttpChatBackend:
    """Generic chat wire protocol client with bounded timeout retries."""

    def __init__(self, transport: httpx.BaseTransport | None = None, sleep=time.sleep):
        self._transport = transport
        self._sleep = sleep

    def complete(self, cfg: LlmConfig, system_prompt: str, user_prompt: str) -> str:
        payload = {
            "model": cfg.model_id,
            "messages": [
                {"role": "system", "content": system_prompt},
                {"role": "user", "content": user_prompt},
            ],
            "temperature": cfg.temperature,
            "max_tokens": cfg.max_tokens,
        }
        headers = {"Authorization": f"Bearer {cfg.api_key}"} if cfg.api_key else {}
        with httpx.Client(transport=self._transport, timeout=cfg.timeout, headers=headers) as client:
            for attempt in range(_CHAT_RETRIES + 1):
                try:
                    response = client.post(cfg.endpoint_url, json=payload)
                except httpx.TimeoutException as exc:
                    if attempt == _CHAT_RETRIES:
                        raise LlmBackendError(
                            f"chat backend timed out after {attempt + 1} attempts: {exc}"
                        ) from exc
                    self._sleep(_BACKOFF_BASE_S * 2**attempt)
                    continue
                except httpx.TransportError as exc:
                    raise LlmBackendError(f"chat backend unreachable: {exc}") from exc
                if response.status_code != 200:
                    raise LlmBackendError(
                        f"chat backend returned HTTP {response.status_code}: {response.text[:200]}"
                    )
                return response.json()["choices"][0]["message"]["content"]
        raise AssertionError("unreachable")


class LlmClient:
    """One configured model role bound to a backend."""

    def __init__(self, cfg: LlmConfig, backend=None, *, transport=None, sleep=time.sleep):
        self.cfg = cfg
        if backend is not None:
            self.backend = backend
        elif cfg.backend == "http":
            self.backend = HttpChatBackend(transport=transport, sleep=sleep)
        else:
            raise ConfigError("scripted backend must be supplied explicitly")

    def chat_complete(self, system_prompt: str, user_prompt: str) -> str:
        if not system_prompt or not user_prompt:
            raise ConfigError("prompts must be non-empty")
        return self.backend.complete(self.cfg, system_prompt, user_prompt)


def chat_complete(
    cfg: LlmConfig,
    system_prompt: str,
    user_prompt: str,
    *,
    backend=None,
    transport: httpx.BaseTransport | None = None,
) -> str:
    return LlmClient(cfg, backend=backend, transport=transport).chat_complete(
        system_prompt, user_prompt
    )


_VERDICT_RE = re.compile(r"^\s*VERDICT:\s*(RELEVANT|IRRELEVANT)\s*$", re.IGNORECASE)
_REFINED_RE = re.compile(r"^\s*REFINED_QUERY:\s*(.+)$")


def parse_verdict(raw: str) -> RelevanceVerdict:
    """Parse a checker reply. Total function: never raises, fails open to relevant.

    The first line matching ``VERDICT: RELEVANT|IRRELEVANT`` (keyword
    case-insensitive) decides; an IRRELEVANT verdict needs a later
    ``REFINED_QUERY: ...`` line, otherwise the reply counts as unparseable
    and the verdict is forced back to relevant.
    """
    lines = raw.splitlines()
    verdict_index = None
    verdict_word = None
    for i, line in enumerate(lines):
        match = _VERDICT_RE.match(line)
        if match:
            verdict_index, verdict_word = i, match.group(1).lower()
            break
    if verdict_word is None:
        return RelevanceVerdict("relevant", None, parse_failed=True, raw_response=raw)
    if verdict_word == "relevant":
        return RelevanceVerdict("relevant", None, parse_failed=False, raw_response=raw)
    for line in lines[verdict_index + 1 :]:
        match = _REFINED_RE.match(line)
        if match and match.group(1).strip():
            return RelevanceVerdict(
                "irrelevant", match.group(1).strip(), parse_failed=False, raw_response=raw
            )
    return RelevanceVerdict("relevant", None, parse_failed=True, raw_response=raw)


_PLACEHOLDER_RE = re.compile(r"\{(query|chunks|language)\}")


def render_template(template: str, *, query: str, chunks: str, language: str) -> str:
    values = {"query": query, "chunks": chunks, "language": language}
    return _PLACEHOLDER_RE.sub(lambda m: values[m.group(1)], template)


def load_template(role: str, language: str, template_dir: str | Path | None = None) -> str:
    """Load a prompt template; shipped defaults unless ``template_dir`` overrides."""
    if language not in ("bn", "en"):
        raise ConfigError(f"prompt language must be bn or en, got {language!r}")
    name = f"{role}_{language}.txt"
    if template_dir is not None:
        return (Path(template_dir) / name).read_text(encoding="utf-8")
    return resources.files("gazette_rag").joinpath("prompts", name).read_text(encoding="utf-8")


def join_chunks(chunk_texts: list[str]) -> str:
    return CHUNK_DELIMITER.join(chunk_texts)


def check_relevance(
    client: LlmClient,
    query: str,
    chunk_texts: list[str],
    language: str = "en",
    template_dir: str | Path | None = None,
) -> RelevanceVerdict:
    """Ask the checker model whether the retrieved chunks answer the query."""
    if not chunk_texts:
        raise ValueError("check_relevance requires at least one chunk")
    template = load_template("checker", language, template_dir)
    prompt = render_template(
        template, query=query, chunks=join_chunks(chunk_texts), language=language
    )
    return parse_verdict(client.chat_complete(CHECKER_SYSTEM_PROMPT, prompt))
