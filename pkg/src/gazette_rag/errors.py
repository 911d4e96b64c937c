"""Exception hierarchy shared across the package."""

from __future__ import annotations


class GazetteRagError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(GazetteRagError):
    """Invalid configuration value or malformed config file."""


class IngestError(GazetteRagError):
    """Document preprocessing or ingestion failed."""


class OcrCommandError(IngestError):
    """External OCR command exited nonzero; carries its stderr."""

    def __init__(self, command: str, returncode: int, stderr: str):
        super().__init__(f"OCR command failed (exit {returncode}): {command}\n{stderr}")
        self.command = command
        self.returncode = returncode
        self.stderr = stderr


class DuplicateDocumentError(IngestError):
    """doc_id already present in the target corpus."""


class EmbeddingError(GazetteRagError):
    """Embedding backend failure or invalid embedding input."""


class DimensionMismatchError(EmbeddingError):
    """Vectors with different dim or model_id were combined."""


class StoreError(GazetteRagError):
    """Vector store constraint violation (duplicate id, dim mismatch)."""


class StoreFormatError(StoreError):
    """Persisted store file is unreadable: bad version, checksum, or layout."""


class LlmBackendError(GazetteRagError):
    """Chat-completion backend failure (HTTP error, timeout after retries)."""


class ScriptExhaustedError(LlmBackendError):
    """A scripted backend received more calls than its script covers."""


class PipelineError(GazetteRagError):
    """Pipeline run aborted; carries the partial iteration trace."""

    def __init__(self, message: str, trace: list | None = None):
        super().__init__(message)
        self.trace = trace or []


class EmptyCorpusError(PipelineError):
    """Query issued against a corpus with no chunks."""


class UnknownCorpusError(GazetteRagError):
    """Requested corpus_id does not exist."""


class EvaluationError(GazetteRagError):
    """Testset loading or score aggregation failed."""


class MalformedTestsetError(EvaluationError):
    """Malformed testset record; message names the offending line(s)."""
