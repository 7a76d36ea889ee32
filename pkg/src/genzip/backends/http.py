"""JSON-over-HTTP clients for the caption, generation, embedding, and codec services.

Transport contract (all POST, JSON bodies, base64-encoded PNG for images):

    /v1/caption       {image, prompt, max_words}        -> {caption}
    /v1/generate      {prompt?, image?, width, height, seed?} -> {image}
    /v1/embed         {image}                           -> {embedding, dim}
    /v1/codec/encode  {image, target_bpp}               -> {data}
    /v1/codec/decode  {data}                            -> {image}

A "chat" adapter maps captioning onto the common chat-completions-with-image
shape instead.  Transient failures (timeout, connection, 429, 5xx) retry with
exponential backoff starting at 1 s; at most `parallelism_limit` requests per
client are in flight at once.
"""

from __future__ import annotations

import base64
import binascii
import os
import threading
import time
import unicodedata

import numpy as np
import requests

from ..textcodec import Caption
from ..visualcodec import RasterImage, from_png_bytes, to_png_bytes, upsample_to
from ..visualcodec.raster import RasterError
from .base import (
    BackendEndpoint,
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

API_KEY_ENV = "GENZIP_API_KEY"
_BACKOFF_BASE_S = 1.0


def _image_b64(image: RasterImage) -> str:
    return base64.b64encode(to_png_bytes(image)).decode("ascii")


def _image_from_b64(value) -> RasterImage:
    if not isinstance(value, str):
        raise MalformedResponseError(f"image field must be a base64 string, got {type(value).__name__}")
    try:
        raw = base64.b64decode(value, validate=True)
    except (binascii.Error, ValueError) as exc:
        raise UndecodableImageError(f"invalid base64 image payload: {exc}") from exc
    try:
        return from_png_bytes(raw)
    except RasterError as exc:
        raise UndecodableImageError(str(exc)) from exc


class HttpTransport:
    """requests-based POST/JSON transport with retries and an in-flight cap."""

    def __init__(self, endpoint: BackendEndpoint, session=None, sleeper=time.sleep):
        self.endpoint = endpoint
        self._session = session or requests.Session()
        self._sleep = sleeper
        self._slots = threading.Semaphore(endpoint.parallelism_limit)

    def _headers(self) -> dict:
        key = os.environ.get(API_KEY_ENV) or self.endpoint.api_key
        headers = {"Content-Type": "application/json"}
        if key:
            headers["Authorization"] = f"Bearer {key}"
        return headers

    def post_json(self, path: str, body: dict) -> dict:
        url = self.endpoint.base_url.rstrip("/") + path
        attempts = self.endpoint.max_retries + 1
        last_error: Exception | None = None
        with self._slots:
            for attempt in range(attempts):
                if attempt:
                    self._sleep(_BACKOFF_BASE_S * (2 ** (attempt - 1)))
                try:
                    resp = self._session.post(
                        url,
                        json=body,
                        headers=self._headers(),
                        timeout=self.endpoint.timeout,
                    )
                except requests.Timeout as exc:
                    last_error = TransportTimeoutError(f"{url}: {exc}")
                    continue
                except requests.ConnectionError as exc:
                    last_error = ConnectionFailedError(f"{url}: {exc}")
                    continue
                if resp.status_code == 429 or resp.status_code >= 500:
                    last_error = HTTPStatusError(resp.status_code, url)
                    continue
                if not 200 <= resp.status_code < 300:
                    raise HTTPStatusError(resp.status_code, url)
                try:
                    payload = resp.json()
                except ValueError as exc:
                    raise MalformedResponseError(f"{url}: body is not JSON: {exc}") from exc
                if not isinstance(payload, dict):
                    raise MalformedResponseError(f"{url}: expected JSON object")
                return payload
        raise last_error  # retries exhausted


def _sanitize_caption_text(text: str) -> str:
    """Map control characters the Caption invariant forbids to plain whitespace."""
    text = text.replace("\r\n", "\n").replace("\r", "\n").replace("\t", " ")
    return "".join(
        ch for ch in text if ch == "\n" or unicodedata.category(ch) != "Cc"
    )


class CaptionClient:
    def __init__(self, endpoint: BackendEndpoint, adapter: str = "native", session=None, sleeper=time.sleep):
        if adapter not in ("native", "chat"):
            raise ValueError(f"unknown caption adapter {adapter!r}")
        self.adapter = adapter
        self.transport = HttpTransport(endpoint, session=session, sleeper=sleeper)

    def caption(self, image: RasterImage, instruction: str, budget: int) -> Caption:
        if self.adapter == "chat":
            text = self._caption_chat(image, instruction, budget)
        else:
            text = self._caption_native(image, instruction, budget)
        text = _sanitize_caption_text(text).strip()
        if not text:
            raise EmptyCaptionError("backend returned an empty caption")
        return Caption(text)

    def _caption_native(self, image, instruction, budget) -> str:
        payload = self.transport.post_json(
            "/v1/caption",
            {"image": _image_b64(image), "prompt": instruction, "max_words": budget},
        )
        text = payload.get("caption")
        if not isinstance(text, str):
            raise MalformedResponseError("response missing string field 'caption'")
        return text

    def _caption_chat(self, image, instruction, budget) -> str:
        body = {
            "model": "default",
            "max_tokens": 4 * budget + 32,
            "messages": [
                {
                    "role": "user",
                    "content": [
                        {"type": "text", "text": instruction},
                        {
                            "type": "image_url",
                            "image_url": {"url": "data:image/png;base64," + _image_b64(image)},
                        },
                    ],
                }
            ],
        }
        payload = self.transport.post_json("/v1/chat/completions", body)
        try:
            text = payload["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise MalformedResponseError(f"chat response missing choices[0].message.content: {exc}") from exc
        if not isinstance(text, str):
            raise MalformedResponseError("chat message content is not a string")
        return text


class GenerationClient:
    def __init__(self, endpoint: BackendEndpoint, session=None, sleeper=time.sleep):
        self.transport = HttpTransport(endpoint, session=session, sleeper=sleeper)

    def generate(self, req: GenerationRequest) -> GenerationResult:
        body = {"width": req.target_width, "height": req.target_height}
        if req.prompt_text is not None:
            body["prompt"] = req.prompt_text
        if req.condition_image is not None:
            body["image"] = _image_b64(req.condition_image)
        if req.seed is not None:
            body["seed"] = req.seed
        payload = self.transport.post_json("/v1/generate", body)
        if "image" not in payload:
            raise MalformedResponseError("response missing field 'image'")
        image = _image_from_b64(payload["image"])
        if (image.width, image.height) != (req.target_width, req.target_height):
            image = upsample_to(image, req.target_width, req.target_height)
            return GenerationResult(image=image, resized=True)
        return GenerationResult(image=image, resized=False)


class EmbeddingClient:
    def __init__(self, endpoint: BackendEndpoint, session=None, sleeper=time.sleep):
        self.transport = HttpTransport(endpoint, session=session, sleeper=sleeper)

    def embed(self, image: RasterImage) -> np.ndarray:
        payload = self.transport.post_json("/v1/embed", {"image": _image_b64(image)})
        vec = payload.get("embedding")
        dim = payload.get("dim")
        if not isinstance(vec, list) or not all(isinstance(v, (int, float)) for v in vec):
            raise MalformedResponseError("response missing numeric list field 'embedding'")
        if not isinstance(dim, int) or dim != len(vec):
            raise MalformedResponseError(f"'dim' field ({dim!r}) disagrees with embedding length {len(vec)}")
        arr = np.asarray(vec, dtype=np.float64)
        norm = float(np.linalg.norm(arr))
        if norm < 1e-12:
            raise DegenerateEmbeddingError("backend returned a zero embedding vector")
        return arr / norm


class ExternalCodecClient:
    """Opaque external perceptual codec reached over HTTP (registry codec_id 1)."""

    def __init__(self, endpoint: BackendEndpoint, session=None, sleeper=time.sleep):
        self.transport = HttpTransport(endpoint, session=session, sleeper=sleeper)

    def encode(self, image: RasterImage, target_bpp: float = 0.03, **_) -> bytes:
        payload = self.transport.post_json(
            "/v1/codec/encode", {"image": _image_b64(image), "target_bpp": target_bpp}
        )
        data = payload.get("data")
        if not isinstance(data, str):
            raise MalformedResponseError("response missing string field 'data'")
        try:
            return base64.b64decode(data, validate=True)
        except (binascii.Error, ValueError) as exc:
            raise MalformedResponseError(f"'data' is not valid base64: {exc}") from exc

    def decode(self, data: bytes) -> RasterImage:
        payload = self.transport.post_json(
            "/v1/codec/decode", {"data": base64.b64encode(data).decode("ascii")}
        )
        if "image" not in payload:
            raise MalformedResponseError("response missing field 'image'")
        return _image_from_b64(payload["image"])
