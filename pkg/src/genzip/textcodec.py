"""Lossless caption coding as raw DEFLATE (RFC 1951, no zlib wrapper).

The raw stream saves the 6 wrapper octets, which is material at ~0.001 bpp.
Compression always runs at maximum effort so re-runs are byte-identical.
"""

from __future__ import annotations

import unicodedata
import zlib
from dataclasses import dataclass, field

_RAW_DEFLATE = -15  # window bits for a wrapper-less RFC 1951 stream


class TextCodecError(Exception):
    pass


class MalformedStreamError(TextCodecError):
    """Input is not a single complete raw DEFLATE stream."""


class TextEncodingError(TextCodecError):
    """Decompressed bytes are not valid UTF-8."""


class InvalidBudgetError(TextCodecError):
    pass


class InvalidCaptionError(TextCodecError):
    pass


def word_count(text: str) -> int:
    """Number of maximal non-whitespace runs; punctuation stays attached."""
    return len(text.split())


@dataclass(frozen=True)
class Caption:
    text: str
    word_count: int = field(init=False)

    def __post_init__(self):
        for ch in self.text:
            if ch != "\n" and unicodedata.category(ch) == "Cc":
                raise InvalidCaptionError(
                    f"control character {ch!r} not allowed in caption text"
                )
        object.__setattr__(self, "word_count", word_count(self.text))


def compress_text(caption: Caption) -> bytes:
    """Raw DEFLATE stream over the caption's UTF-8 bytes, maximum effort."""
    comp = zlib.compressobj(9, zlib.DEFLATED, _RAW_DEFLATE)
    return comp.compress(caption.text.encode("utf-8")) + comp.flush()


def decompress_text(data: bytes) -> Caption:
    """Inverse of compress_text; accepts any conforming raw DEFLATE stream."""
    dec = zlib.decompressobj(_RAW_DEFLATE)
    try:
        raw = dec.decompress(data)
    except zlib.error as exc:
        raise MalformedStreamError(str(exc)) from exc
    if not dec.eof:
        raise MalformedStreamError("truncated DEFLATE stream")
    if dec.unused_data:
        raise MalformedStreamError(
            f"{len(dec.unused_data)} octets after end of DEFLATE stream"
        )
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise TextEncodingError(str(exc)) from exc
    return Caption(text)


def truncate_to_budget(caption: Caption, budget: int) -> Caption:
    """First `budget` words joined by single spaces; unchanged if under budget."""
    if budget < 1:
        raise InvalidBudgetError(f"budget must be >= 1, got {budget}")
    if caption.word_count <= budget:
        return caption
    return Caption(" ".join(caption.text.split()[:budget]))
