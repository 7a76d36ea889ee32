"""Deterministic offline stand-ins for the caption/generation/embedding/codec services.

Every mock is a pure function of its inputs, so end-to-end runs are
byte-reproducible without any network access.
"""

from __future__ import annotations

import hashlib
import random

import numpy as np

from ..textcodec import Caption
from ..visualcodec import RasterImage, from_png_bytes, to_png_bytes, upsample_to
from .base import BackendSet, GenerationRequest, GenerationResult

# filler vocabulary for padding mock captions up to the word budget
_VOCAB = (
    "field river sky stone light shadow tree path window cloud grass roof "
    "wall water hill flower gravel bridge boat lantern bright muted golden "
    "pale deep wide narrow distant scattered dense smooth rough tall low "
    "curved straight open quiet"
).split()


def image_content_hash(image: RasterImage) -> str:
    digest = hashlib.sha256()
    digest.update(f"{image.width}x{image.height}:".encode("ascii"))
    digest.update(image.samples)
    return digest.hexdigest()


class MockCaptionBackend:
    """Caption is "mock caption {hash}" padded with hash-seeded filler words.

    Padding up to the requested budget keeps the compressed caption size in a
    realistic band for rate experiments; the leading hash words keep the
    caption a deterministic fingerprint of the image.
    """

    def caption(self, image: RasterImage, instruction: str, budget: int) -> Caption:
        h = image_content_hash(image)[:8]
        words = ["mock", "caption", h]
        rng = random.Random(h)
        while len(words) < budget:
            words.append(rng.choice(_VOCAB))
        return Caption(" ".join(words[:budget]))


class MockGenerationBackend:
    """Bicubic upsample of the visual condition; constant color for pure text."""

    def generate(self, req: GenerationRequest) -> GenerationResult:
        if req.condition_image is not None:
            image = upsample_to(req.condition_image, req.target_width, req.target_height)
        else:
            digest = hashlib.sha256(req.prompt_text.encode("utf-8")).digest()
            image = RasterImage.constant(
                req.target_width, req.target_height, (digest[0], digest[1], digest[2])
            )
        return GenerationResult(image=image, resized=False)


class MockEmbeddingBackend:
    """Unit-norm 8-bins-per-channel color histogram (24 dimensions)."""

    def embed(self, image: RasterImage) -> np.ndarray:
        arr = image.to_array()
        bins = [
            np.bincount((arr[..., c] >> 5).ravel(), minlength=8) for c in range(3)
        ]
        vec = np.concatenate(bins).astype(np.float64)
        return vec / np.linalg.norm(vec)


class MockExternalCodec:
    """Echo codec: payload is the lossless PNG of the input."""

    def encode(self, image: RasterImage, target_bpp: float = 0.03, **_) -> bytes:
        return to_png_bytes(image)

    def decode(self, data: bytes) -> RasterImage:
        return from_png_bytes(data)


def make_mock_backends() -> BackendSet:
    return BackendSet(
        caption=MockCaptionBackend(),
        generation=MockGenerationBackend(),
        embedding=MockEmbeddingBackend(),
        codec=MockExternalCodec(),
    )
