"""Built-in low-bitrate block-transform codec (codec_id 0).

Pipeline: BT.601 full-range YCbCr, 4:2:0 chroma, 8x8 orthonormal DCT-II,
reference-table quantization with the usual quality scaling, zigzag scan,
DC deltas + (run, level) AC pairs with an end-of-block marker, and a raw
DEFLATE entropy stage over the symbol stream.

Byte stream: [u8 quality][u16be plane-width][u16be plane-height] then the
DEFLATE-compressed symbols.  All symbols are zigzag-signed LEB128; the EOB
marker is the value 63 in a run position (real runs are 0..62).  Rounding is
half away from zero throughout.  See docs/codec0.md.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass

import numpy as np
from scipy.fft import dctn, idctn

from ..container import (
    TruncatedPayloadError,
    VarintError,
    decode_uleb128,
    encode_uleb128,
)
from .raster import RasterImage
from .resample import round_half_away

BLOCK = 8
EOB = 63  # run positions hold 0..62, so 63 marks end-of-block

# ITU T.81 Annex K reference quantization tables, natural (row-major) order.
LUMA_QUANT = np.array(
    [
        [16, 11, 10, 16, 24, 40, 51, 61],
        [12, 12, 14, 19, 26, 58, 60, 55],
        [14, 13, 16, 24, 40, 57, 69, 56],
        [14, 17, 22, 29, 51, 87, 80, 62],
        [18, 22, 37, 56, 68, 109, 103, 77],
        [24, 35, 55, 64, 81, 104, 113, 92],
        [49, 64, 78, 87, 103, 121, 120, 101],
        [72, 92, 95, 98, 112, 100, 103, 99],
    ],
    dtype=np.int64,
)
CHROMA_QUANT = np.array(
    [
        [17, 18, 24, 47, 99, 99, 99, 99],
        [18, 21, 26, 66, 99, 99, 99, 99],
        [24, 26, 56, 99, 99, 99, 99, 99],
        [47, 66, 99, 99, 99, 99, 99, 99],
        [99, 99, 99, 99, 99, 99, 99, 99],
        [99, 99, 99, 99, 99, 99, 99, 99],
        [99, 99, 99, 99, 99, 99, 99, 99],
        [99, 99, 99, 99, 99, 99, 99, 99],
    ],
    dtype=np.int64,
)


def zigzag_order() -> np.ndarray:
    """Flat indices of an 8x8 block in zigzag scan order."""
    order = sorted(
        ((r, c) for r in range(BLOCK) for c in range(BLOCK)),
        key=lambda rc: (rc[0] + rc[1], rc[0] if (rc[0] + rc[1]) % 2 else rc[1]),
    )
    return np.array([r * BLOCK + c for r, c in order], dtype=np.int64)

ZIGZAG = zigzag_order()


class VisualCodecError(Exception):
    pass


class MalformedStreamError(VisualCodecError):
    """Byte stream is not a well-formed codec-0 stream."""


class SymbolCountError(VisualCodecError):
    """Symbol stream length inconsistent with the dims/quality header."""


class InvalidSettingsError(VisualCodecError):
    pass


@dataclass(frozen=True)
class CodecSettings:
    quality: int = 35
    chroma_subsampling: str = "4:2:0"

    def __post_init__(self):
        if not 1 <= self.quality <= 100:
            raise InvalidSettingsError(f"quality must be in [1, 100], got {self.quality}")
        if self.chroma_subsampling != "4:2:0":
            raise InvalidSettingsError("only 4:2:0 chroma subsampling is supported")


def scaled_quant_table(base: np.ndarray, quality: int) -> np.ndarray:
    """Quality-scaled table: Q' = clamp(floor((Q*s + 50)/100), 1, 255).

    s = 5000/quality below 50 (exact rational, folded into integer math),
    s = 200 - 2*quality at 50 and above.
    """
    if quality < 50:
        scaled = (base * 5000 + 50 * quality) // (100 * quality)
    else:
        scaled = (base * (200 - 2 * quality) + 50) // 100
    return np.clip(scaled, 1, 255)


def rgb_to_ycbcr(arr: np.ndarray) -> np.ndarray:
    """BT.601 full-range RGB -> YCbCr, rounded half away from zero, clamped."""
    r = arr[..., 0].astype(np.float64)
    g = arr[..., 1].astype(np.float64)
    b = arr[..., 2].astype(np.float64)
    y = 0.299 * r + 0.587 * g + 0.114 * b
    cb = 128.0 - 0.168736 * r - 0.331264 * g + 0.5 * b
    cr = 128.0 + 0.5 * r - 0.418688 * g - 0.081312 * b
    out = np.stack([y, cb, cr], axis=-1)
    return np.clip(round_half_away(out), 0, 255).astype(np.uint8)


def ycbcr_to_rgb(y: np.ndarray, cb: np.ndarray, cr: np.ndarray) -> np.ndarray:
    yf = y.astype(np.float64)
    cbf = cb.astype(np.float64) - 128.0
    crf = cr.astype(np.float64) - 128.0
    r = yf + 1.402 * crf
    g = yf - 0.344136 * cbf - 0.714136 * crf
    b = yf + 1.772 * cbf
    out = np.stack([r, g, b], axis=-1)
    return np.clip(round_half_away(out), 0, 255).astype(np.uint8)


def _subsample_420(plane: np.ndarray) -> np.ndarray:
    """2x2 mean subsampling after edge-padding to even dims."""
    h, w = plane.shape
    if h % 2 or w % 2:
        plane = np.pad(plane, ((0, h % 2), (0, w % 2)), mode="edge")
    p = plane.astype(np.uint32)
    quads = p.reshape(p.shape[0] // 2, 2, p.shape[1] // 2, 2)
    return ((quads.sum(axis=(1, 3)) + 2) // 4).astype(np.uint8)


def _pad_plane(plane: np.ndarray) -> np.ndarray:
    h, w = plane.shape
    ph = (-h) % BLOCK
    pw = (-w) % BLOCK
    if ph or pw:
        plane = np.pad(plane, ((0, ph), (0, pw)), mode="edge")
    return plane


def _blocks(plane: np.ndarray) -> np.ndarray:
    """(n, 8, 8) blocks of a padded plane in raster order."""
    h, w = plane.shape
    return (
        plane.reshape(h // BLOCK, BLOCK, w // BLOCK, BLOCK)
        .swapaxes(1, 2)
        .reshape(-1, BLOCK, BLOCK)
    )


def _unblocks(blocks: np.ndarray, h: int, w: int) -> np.ndarray:
    nby, nbx = h // BLOCK, w // BLOCK
    return blocks.reshape(nby, nbx, BLOCK, BLOCK).swapaxes(1, 2).reshape(h, w)


def quantize_plane(plane: np.ndarray, qtable: np.ndarray) -> np.ndarray:
    """(n, 64) quantized coefficients in zigzag order for each 8x8 block."""
    shifted = _blocks(plane).astype(np.float64) - 128.0
    coeffs = dctn(shifted, axes=(-2, -1), norm="ortho")
    q = round_half_away(coeffs / qtable[None, :, :]).astype(np.int64)
    return q.reshape(-1, 64)[:, ZIGZAG]


def dequantize_plane(levels: np.ndarray, qtable: np.ndarray, h: int, w: int) -> np.ndarray:
    """Inverse of quantize_plane back to a (h, w) uint8 plane."""
    n = levels.shape[0]
    flat = np.zeros((n, 64), dtype=np.float64)
    flat[:, ZIGZAG] = levels
    coeffs = flat.reshape(n, BLOCK, BLOCK) * qtable[None, :, :]
    pixels = idctn(coeffs, axes=(-2, -1), norm="ortho") + 128.0
    pixels = np.clip(round_half_away(pixels), 0, 255).astype(np.uint8)
    return _unblocks(pixels, h, w)


def _zigzag_signed(n: int) -> int:
    return 2 * n if n >= 0 else -2 * n - 1


def _unzigzag_signed(u: int) -> int:
    return u // 2 if u % 2 == 0 else -(u + 1) // 2


def _encode_plane_symbols(levels: np.ndarray, out: bytearray) -> None:
    prev_dc = 0
    for block in levels:
        dc = int(block[0])
        out += encode_uleb128(_zigzag_signed(dc - prev_dc))
        prev_dc = dc
        ac = block[1:]
        nz = np.flatnonzero(ac)
        pos = -1
        for i in nz:
            out += encode_uleb128(_zigzag_signed(int(i - pos - 1)))  # zero run
            out += encode_uleb128(_zigzag_signed(int(ac[i])))
            pos = i
        if pos < 62:
            out += encode_uleb128(_zigzag_signed(EOB))


class _SymbolReader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def read(self) -> int:
        try:
            value, self.pos = decode_uleb128(self.data, self.pos)
        except TruncatedPayloadError as exc:
            raise SymbolCountError("symbol stream ended early") from exc
        except VarintError as exc:
            raise MalformedStreamError(str(exc)) from exc
        return _unzigzag_signed(value)

    def exhausted(self) -> bool:
        return self.pos == len(self.data)


def _decode_plane_symbols(reader: _SymbolReader, n_blocks: int) -> np.ndarray:
    levels = np.zeros((n_blocks, 64), dtype=np.int64)
    prev_dc = 0
    for b in range(n_blocks):
        prev_dc += reader.read()
        levels[b, 0] = prev_dc
        pos = 0  # AC coefficients filled so far
        while pos < 63:
            run = reader.read()
            if run == EOB:
                break
            if run < 0 or pos + run + 1 > 63:
                raise MalformedStreamError(f"invalid zero run {run} at AC position {pos}")
            level = reader.read()
            if level == 0:
                raise MalformedStreamError("zero level in (run, level) pair")
            pos += run + 1
            levels[b, pos] = level
    return levels


def _plane_geometry(width: int, height: int) -> list[tuple[int, int, int, int]]:
    """(plane-h, plane-w, padded-h, padded-w) for Y, Cb, Cr."""
    ch, cw = (height + 1) // 2, (width + 1) // 2
    geo = []
    for h, w in ((height, width), (ch, cw), (ch, cw)):
        geo.append((h, w, h + (-h) % BLOCK, w + (-w) % BLOCK))
    return geo


def encode_builtin(image: RasterImage, settings: CodecSettings) -> bytes:
    """Encode an RGB image into a codec-0 byte stream."""
    ycc = rgb_to_ycbcr(image.to_array())
    y = ycc[..., 0]
    cb = _subsample_420(ycc[..., 1])
    cr = _subsample_420(ycc[..., 2])

    lq = scaled_quant_table(LUMA_QUANT, settings.quality)
    cq = scaled_quant_table(CHROMA_QUANT, settings.quality)

    symbols = bytearray()
    for plane, qtable in ((y, lq), (cb, cq), (cr, cq)):
        _encode_plane_symbols(quantize_plane(_pad_plane(plane), qtable), symbols)

    comp = zlib.compressobj(9, zlib.DEFLATED, -15)
    header = bytes([settings.quality]) + image.width.to_bytes(2, "big") + image.height.to_bytes(2, "big")
    return header + comp.compress(bytes(symbols)) + comp.flush()


def decode_builtin(data: bytes) -> RasterImage:
    """Exact inverse of encode_builtin's quantized representation."""
    if len(data) < 5:
        raise MalformedStreamError(f"stream needs a 5-octet header, got {len(data)}")
    quality = data[0]
    width = int.from_bytes(data[1:3], "big")
    height = int.from_bytes(data[3:5], "big")
    if not 1 <= quality <= 100:
        raise MalformedStreamError(f"quality {quality} outside [1, 100]")
    if width < 1 or height < 1:
        raise MalformedStreamError(f"invalid plane dims {width}x{height}")

    dec = zlib.decompressobj(-15)
    try:
        symbols = dec.decompress(data[5:])
    except zlib.error as exc:
        raise MalformedStreamError(str(exc)) from exc
    if not dec.eof or dec.unused_data:
        raise MalformedStreamError("DEFLATE symbol stream truncated or over-long")

    lq = scaled_quant_table(LUMA_QUANT, quality)
    cq = scaled_quant_table(CHROMA_QUANT, quality)
    geo = _plane_geometry(width, height)

    # every block costs at least 2 symbol octets (DC delta + EOB); reject
    # absurd dims claims before allocating coefficient arrays
    total_blocks = sum((ph // BLOCK) * (pw // BLOCK) for _, _, ph, pw in geo)
    if 2 * total_blocks > len(symbols):
        raise SymbolCountError(
            f"{total_blocks} blocks declared but only {len(symbols)} symbol octets"
        )

    reader = _SymbolReader(symbols)
    planes = []
    for (h, w, ph, pw), qtable in zip(geo, (lq, cq, cq)):
        n_blocks = (ph // BLOCK) * (pw // BLOCK)
        levels = _decode_plane_symbols(reader, n_blocks)
        planes.append(dequantize_plane(levels, qtable, ph, pw)[:h, :w])
    if not reader.exhausted():
        raise SymbolCountError(
            f"{len(symbols) - reader.pos} symbol octets beyond the declared planes"
        )

    y = planes[0]
    cb = planes[1].repeat(2, axis=0).repeat(2, axis=1)[:height, :width]
    cr = planes[2].repeat(2, axis=0).repeat(2, axis=1)[:height, :width]
    return RasterImage.from_array(ycbcr_to_rgb(y, cb, cr))
