"""8-bit RGB raster image carrier with numpy and PNG interop."""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
from PIL import Image

CHANNELS = 3


class RasterError(Exception):
    pass


@dataclass(frozen=True)
class RasterImage:
    width: int
    height: int
    samples: bytes  # row-major RGB, 8 bits per channel

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise RasterError(f"dims must be >= 1, got {self.width}x{self.height}")
        expected = self.width * self.height * CHANNELS
        if len(self.samples) != expected:
            raise RasterError(
                f"samples length {len(self.samples)} != {self.width}x{self.height}x3"
            )

    def to_array(self) -> np.ndarray:
        """(height, width, 3) uint8 view of the samples."""
        return np.frombuffer(self.samples, dtype=np.uint8).reshape(
            self.height, self.width, CHANNELS
        )

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "RasterImage":
        if arr.ndim != 3 or arr.shape[2] != CHANNELS:
            raise RasterError(f"expected (h, w, 3) array, got shape {arr.shape}")
        if arr.dtype != np.uint8:
            raise RasterError(f"expected uint8 array, got {arr.dtype}")
        h, w, _ = arr.shape
        return cls(width=w, height=h, samples=np.ascontiguousarray(arr).tobytes())

    @classmethod
    def constant(cls, width: int, height: int, rgb: tuple[int, int, int]) -> "RasterImage":
        arr = np.empty((height, width, CHANNELS), dtype=np.uint8)
        arr[:, :] = rgb
        return cls.from_array(arr)


def to_png_bytes(image: RasterImage) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(image.to_array(), mode="RGB").save(buf, format="PNG")
    return buf.getvalue()


def from_png_bytes(data: bytes) -> RasterImage:
    try:
        with Image.open(io.BytesIO(data)) as im:
            rgb = im.convert("RGB")
            return RasterImage.from_array(np.asarray(rgb, dtype=np.uint8))
    except RasterError:
        raise
    except Exception as exc:
        raise RasterError(f"undecodable PNG payload: {exc}") from exc


def load_png(path) -> RasterImage:
    with open(path, "rb") as f:
        return from_png_bytes(f.read())


def save_png(image: RasterImage, path) -> None:
    Image.fromarray(image.to_array(), mode="RGB").save(path, format="PNG")
