"""Shared backend types: endpoint settings, request/result carriers, errors."""

from __future__ import annotations

from dataclasses import dataclass

from ..visualcodec import RasterImage


class BackendError(Exception):
    pass


class TransportTimeoutError(BackendError):
    """Request deadline exceeded, retries included."""


class ConnectionFailedError(BackendError):
    """Endpoint unreachable, retries included."""


class HTTPStatusError(BackendError):
    def __init__(self, status: int, message: str = ""):
        super().__init__(f"HTTP {status}" + (f": {message}" if message else ""))
        self.status = status


class MalformedResponseError(BackendError):
    """Response body is not the documented JSON shape."""


class EmptyCaptionError(BackendError):
    pass


class UndecodableImageError(BackendError):
    """Image payload in a response failed base64/PNG decoding."""


class DegenerateEmbeddingError(BackendError):
    """Backend returned an (effectively) zero embedding vector."""


@dataclass(frozen=True)
class BackendEndpoint:
    base_url: str
    api_key: str | None = None
    timeout: float = 120.0
    max_retries: int = 2
    parallelism_limit: int = 4

    def __post_init__(self):
        if self.timeout <= 0:
            raise ValueError(f"timeout must be > 0, got {self.timeout}")
        if self.max_retries < 0:
            raise ValueError(f"max_retries must be >= 0, got {self.max_retries}")
        if self.parallelism_limit < 1:
            raise ValueError(f"parallelism_limit must be >= 1, got {self.parallelism_limit}")


@dataclass(frozen=True)
class GenerationRequest:
    target_width: int
    target_height: int
    prompt_text: str | None = None
    condition_image: RasterImage | None = None
    seed: int | None = None
    repeat_index: int = 1

    def __post_init__(self):
        if self.prompt_text is None and self.condition_image is None:
            raise ValueError("at least one of prompt_text / condition_image required")
        if self.target_width < 1 or self.target_height < 1:
            raise ValueError(
                f"target dims must be >= 1, got {self.target_width}x{self.target_height}"
            )


@dataclass(frozen=True)
class GenerationResult:
    image: RasterImage
    resized: bool = False  # backend returned other dims and the client resized


@dataclass
class BackendSet:
    """The per-role backends a pipeline run talks to."""

    caption: object
    generation: object
    embedding: object | None = None
    codec: object | None = None
