"""Codec dispatch: codec_id 0 is the built-in block codec, 1 an external service."""

from __future__ import annotations

from typing import Callable

from ..container import CODEC_BUILTIN, CODEC_EXTERNAL
from .blockcodec import CodecSettings, VisualCodecError, decode_builtin, encode_builtin
from .raster import RasterImage


class UnknownCodecError(VisualCodecError):
    pass


class CodecRegistry:
    """Maps codec ids to (encode, decode) callables.

    encode: (RasterImage, **params) -> bytes; decode: (bytes) -> RasterImage.
    External payloads are opaque: rate accounting only sees byte length.
    """

    def __init__(self):
        self._encoders: dict[int, Callable[..., bytes]] = {}
        self._decoders: dict[int, Callable[[bytes], RasterImage]] = {}
        self.register(
            CODEC_BUILTIN,
            lambda image, quality=35, **_: encode_builtin(image, CodecSettings(quality=quality)),
            decode_builtin,
        )

    def register(self, codec_id: int, encode, decode) -> None:
        self._encoders[codec_id] = encode
        self._decoders[codec_id] = decode

    def register_external(self, encode, decode) -> None:
        """Install an external codec (e.g. an HTTP perceptual-codec client) at id 1."""
        self.register(CODEC_EXTERNAL, encode, decode)

    def _check(self, codec_id: int) -> None:
        if codec_id not in self._encoders:
            raise UnknownCodecError(f"codec id {codec_id} not registered")

    def encode(self, codec_id: int, image: RasterImage, **params) -> bytes:
        self._check(codec_id)
        return self._encoders[codec_id](image, **params)

    def decode(self, codec_id: int, data: bytes) -> RasterImage:
        self._check(codec_id)
        return self._decoders[codec_id](data)


def default_registry() -> CodecRegistry:
    return CodecRegistry()
