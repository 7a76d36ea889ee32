"""Backend clients (HTTP) and deterministic offline mocks."""

from .base import (
    BackendEndpoint,
    BackendError,
    BackendSet,
    ConnectionFailedError,
    DegenerateEmbeddingError,
    EmptyCaptionError,
    GenerationRequest,
    GenerationResult,
    HTTPStatusError,
    MalformedResponseError,
    TransportTimeoutError,
    UndecodableImageError,
)
from .http import (
    API_KEY_ENV,
    CaptionClient,
    EmbeddingClient,
    ExternalCodecClient,
    GenerationClient,
    HttpTransport,
)
from .mock import (
    MockCaptionBackend,
    MockEmbeddingBackend,
    MockExternalCodec,
    MockGenerationBackend,
    image_content_hash,
    make_mock_backends,
)

__all__ = [
    "API_KEY_ENV",
    "BackendEndpoint",
    "BackendError",
    "BackendSet",
    "CaptionClient",
    "ConnectionFailedError",
    "DegenerateEmbeddingError",
    "EmbeddingClient",
    "EmptyCaptionError",
    "ExternalCodecClient",
    "GenerationClient",
    "GenerationRequest",
    "GenerationResult",
    "HTTPStatusError",
    "HttpTransport",
    "MalformedResponseError",
    "MockCaptionBackend",
    "MockEmbeddingBackend",
    "MockExternalCodec",
    "MockGenerationBackend",
    "TransportTimeoutError",
    "UndecodableImageError",
    "image_content_hash",
    "make_mock_backends",
]
