"""Bit-exact transmitted container: size metadata + optional caption and visual payloads.

Wire layout (all integers big-endian, lengths unsigned LEB128):

    offset  size  field
    0       4     magic "GZC1" (0x47 0x5A 0x43 0x31)
    4       1     version (= 1)
    5       1     flags   (bit0 TEXT_PRESENT, bit1 VISUAL_PRESENT, bits 2-7 reserved = 0)
    6       2     width  of the original image, u16be
    8       2     height of the original image, u16be
    10      ...   if TEXT_PRESENT:   uleb128 length, then that many text payload octets
            ...   if VISUAL_PRESENT: 1 codec_id octet, uleb128 length, then payload octets

The format is closed: trailing bytes after the declared payloads are an error.
LEB128 lengths must be minimal encodings and fit in 32 bits.
"""

from __future__ import annotations

from dataclasses import dataclass

MAGIC = b"GZC1"
VERSION = 1

FLAG_TEXT = 0x01
FLAG_VISUAL = 0x02
_RESERVED_FLAGS = 0xFC

MAX_LENGTH = 0xFFFFFFFF  # 32-bit cap on payload lengths

CODEC_BUILTIN = 0
CODEC_EXTERNAL = 1
_KNOWN_CODECS = (CODEC_BUILTIN, CODEC_EXTERNAL)


class ContainerError(Exception):
    """Base class for container format errors."""


class ValidationError(ContainerError):
    """A container field violates its invariant."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class BadMagicError(ContainerError):
    pass


class UnsupportedVersionError(ContainerError):
    pass


class ReservedFlagBitsError(ContainerError):
    pass


class TruncatedPayloadError(ContainerError):
    pass


class VarintError(ContainerError):
    """Overlong (non-minimal) or oversized (> 32-bit) LEB128 length."""


class TrailingGarbageError(ContainerError):
    pass


def encode_uleb128(value: int) -> bytes:
    """Minimal unsigned LEB128 encoding of a value in [0, 2**32)."""
    if value < 0 or value > MAX_LENGTH:
        raise VarintError(f"value {value} outside 32-bit range")
    out = bytearray()
    while True:
        b = value & 0x7F
        value >>= 7
        if value:
            out.append(b | 0x80)
        else:
            out.append(b)
            return bytes(out)


def decode_uleb128(data: bytes, pos: int) -> tuple[int, int]:
    """Decode one minimal unsigned LEB128 value; returns (value, next_pos)."""
    result = 0
    shift = 0
    start = pos
    while True:
        if pos >= len(data):
            raise TruncatedPayloadError("LEB128 length runs past end of input")
        b = data[pos]
        pos += 1
        result |= (b & 0x7F) << shift
        if not b & 0x80:
            if pos - start > 1 and b == 0:
                raise VarintError("overlong LEB128 encoding")
            if result > MAX_LENGTH:
                raise VarintError(f"LEB128 value {result} exceeds 32-bit cap")
            return result, pos
        shift += 7
        if shift >= 35:
            raise VarintError("LEB128 length exceeds 5 octets")


@dataclass(frozen=True)
class ContainerHeader:
    width: int
    height: int
    text_present: bool
    visual_present: bool
    version: int = VERSION

    @property
    def flags(self) -> int:
        return (FLAG_TEXT if self.text_present else 0) | (
            FLAG_VISUAL if self.visual_present else 0
        )

    def validate(self) -> None:
        if self.version != VERSION:
            raise ValidationError("version", f"must be {VERSION}, got {self.version}")
        if not (1 <= self.width <= 0xFFFF):
            raise ValidationError("width", f"must be in [1, 65535], got {self.width}")
        if not (1 <= self.height <= 0xFFFF):
            raise ValidationError("height", f"must be in [1, 65535], got {self.height}")
        if not (self.text_present or self.visual_present):
            raise ValidationError("flags", "neither TEXT_PRESENT nor VISUAL_PRESENT set")


@dataclass(frozen=True)
class VisualPayload:
    codec_id: int
    data: bytes

    def validate(self) -> None:
        if self.codec_id not in _KNOWN_CODECS:
            raise ValidationError("codec_id", f"unknown codec id {self.codec_id}")
        if not self.data:
            raise ValidationError("visual_payload.data", "must be non-empty")


@dataclass(frozen=True)
class Container:
    header: ContainerHeader
    text_payload: bytes | None = None
    visual_payload: VisualPayload | None = None

    def validate(self) -> None:
        self.header.validate()
        if self.header.text_present != (self.text_payload is not None):
            raise ValidationError(
                "text_payload", "presence does not match TEXT_PRESENT flag"
            )
        if self.header.visual_present != (self.visual_payload is not None):
            raise ValidationError(
                "visual_payload", "presence does not match VISUAL_PRESENT flag"
            )
        if self.text_payload is not None and len(self.text_payload) > MAX_LENGTH:
            raise ValidationError("text_payload", "length exceeds 32-bit cap")
        if self.visual_payload is not None:
            self.visual_payload.validate()
            if len(self.visual_payload.data) > MAX_LENGTH:
                raise ValidationError("visual_payload.data", "length exceeds 32-bit cap")


def make_container(
    width: int,
    height: int,
    text_payload: bytes | None = None,
    visual_payload: VisualPayload | None = None,
) -> Container:
    """Build and validate a container; flags are derived from payload presence."""
    c = Container(
        header=ContainerHeader(
            width=width,
            height=height,
            text_present=text_payload is not None,
            visual_present=visual_payload is not None,
        ),
        text_payload=text_payload,
        visual_payload=visual_payload,
    )
    c.validate()
    return c


def serialize(container: Container) -> bytes:
    """Serialize a valid container to its canonical byte form.

    Deterministic: equal containers produce identical bytes.
    """
    container.validate()
    h = container.header
    out = bytearray()
    out += MAGIC
    out.append(h.version)
    out.append(h.flags)
    out += h.width.to_bytes(2, "big")
    out += h.height.to_bytes(2, "big")
    if container.text_payload is not None:
        out += encode_uleb128(len(container.text_payload))
        out += container.text_payload
    if container.visual_payload is not None:
        out.append(container.visual_payload.codec_id)
        out += encode_uleb128(len(container.visual_payload.data))
        out += container.visual_payload.data
    return bytes(out)


def deserialize(data: bytes) -> Container:
    """Parse container bytes with strict framing.

    Raises a distinct error per malformed-input class: BadMagicError,
    UnsupportedVersionError, ReservedFlagBitsError, TruncatedPayloadError,
    VarintError, TrailingGarbageError.  Field-invariant violations raise
    ValidationError.
    """
    if len(data) >= 4 and data[:4] != MAGIC:
        raise BadMagicError(f"expected {MAGIC!r}, got {bytes(data[:4])!r}")
    if len(data) < 10:
        raise TruncatedPayloadError(f"header needs 10 octets, got {len(data)}")
    version = data[4]
    if version != VERSION:
        raise UnsupportedVersionError(f"version {version} not supported")
    flags = data[5]
    if flags & _RESERVED_FLAGS:
        raise ReservedFlagBitsError(f"reserved flag bits set: 0x{flags:02x}")
    width = int.from_bytes(data[6:8], "big")
    height = int.from_bytes(data[8:10], "big")
    pos = 10

    text_payload = None
    if flags & FLAG_TEXT:
        length, pos = decode_uleb128(data, pos)
        if pos + length > len(data):
            raise TruncatedPayloadError(
                f"text payload declares {length} octets, {len(data) - pos} remain"
            )
        text_payload = bytes(data[pos : pos + length])
        pos += length

    visual_payload = None
    if flags & FLAG_VISUAL:
        if pos >= len(data):
            raise TruncatedPayloadError("missing codec_id octet")
        codec_id = data[pos]
        pos += 1
        length, pos = decode_uleb128(data, pos)
        if pos + length > len(data):
            raise TruncatedPayloadError(
                f"visual payload declares {length} octets, {len(data) - pos} remain"
            )
        visual_payload = VisualPayload(codec_id=codec_id, data=bytes(data[pos : pos + length]))
        pos += length

    if pos != len(data):
        raise TrailingGarbageError(f"{len(data) - pos} octets beyond declared payloads")

    container = Container(
        header=ContainerHeader(
            width=width,
            height=height,
            text_present=bool(flags & FLAG_TEXT),
            visual_present=bool(flags & FLAG_VISUAL),
        ),
        text_payload=text_payload,
        visual_payload=visual_payload,
    )
    container.validate()
    return container


def container_bits(container: Container) -> int:
    """Total transmitted bits: 8 x serialized length, all overhead counted."""
    return 8 * len(serialize(container))
