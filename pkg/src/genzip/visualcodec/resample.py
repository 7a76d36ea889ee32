"""Resampling: 8x box downsampling and Catmull-Rom bicubic resizing.

All integer rounding is half away from zero so a reimplementation in any
language lands on identical samples.
"""

from __future__ import annotations

import numpy as np
from scipy.sparse import csr_matrix

from .raster import RasterImage

BLOCK = 8


def round_half_away(x: np.ndarray) -> np.ndarray:
    """Round half away from zero, elementwise."""
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def _pad_to_multiple(arr: np.ndarray, multiple: int) -> np.ndarray:
    """Edge-replicate along the first two axes up to the next multiple."""
    h, w = arr.shape[:2]
    ph = (-h) % multiple
    pw = (-w) % multiple
    if ph == 0 and pw == 0:
        return arr
    pad = [(0, ph), (0, pw)] + [(0, 0)] * (arr.ndim - 2)
    return np.pad(arr, pad, mode="edge")


def downsample8(image: RasterImage) -> RasterImage:
    """Map each 8x8 block (edge-replicated to full blocks) to its rounded mean."""
    arr = _pad_to_multiple(image.to_array(), BLOCK)
    h, w, c = arr.shape
    blocks = arr.reshape(h // BLOCK, BLOCK, w // BLOCK, BLOCK, c).astype(np.uint32)
    sums = blocks.sum(axis=(1, 3))
    # mean rounded half away from zero; samples are non-negative
    means = (sums + BLOCK * BLOCK // 2) // (BLOCK * BLOCK)
    return RasterImage.from_array(means.astype(np.uint8))


def _cubic_weight(t: np.ndarray) -> np.ndarray:
    # Catmull-Rom kernel, a = -0.5
    a = -0.5
    t = np.abs(t)
    w = np.zeros_like(t)
    near = t <= 1.0
    far = (t > 1.0) & (t < 2.0)
    w[near] = (a + 2.0) * t[near] ** 3 - (a + 3.0) * t[near] ** 2 + 1.0
    w[far] = a * (t[far] ** 3 - 5.0 * t[far] ** 2 + 8.0 * t[far] - 4.0)
    return w


def _axis_weights(n_in: int, n_out: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-output-pixel sample indices (n_out, 4) and kernel weights (n_out, 4).

    Output pixel centers map to input coordinates center-aligned; sample
    indices are clamped to the edges (replication).
    """
    scale = n_in / n_out
    src = (np.arange(n_out, dtype=np.float64) + 0.5) * scale - 0.5
    base = np.floor(src).astype(np.int64)
    frac = src - base
    offsets = np.arange(-1, 3)
    idx = base[:, None] + offsets[None, :]
    t = offsets[None, :] - frac[:, None]
    weights = _cubic_weight(t.astype(np.float64))
    idx = np.clip(idx, 0, n_in - 1)
    return idx, weights


def _axis_matrix(n_in: int, n_out: int) -> csr_matrix:
    """Sparse (n_out, n_in) resampling matrix, 4 taps per row.

    Edge-clamped taps land on duplicate columns; CSR products sum them.
    """
    idx, weights = _axis_weights(n_in, n_out)
    indptr = np.arange(0, 4 * n_out + 4, 4)
    return csr_matrix((weights.ravel(), idx.ravel(), indptr), shape=(n_out, n_in))


def upsample_to(image: RasterImage, width: int, height: int) -> RasterImage:
    """Bicubic (Catmull-Rom, a = -0.5) resize to the target dims, clamped to [0, 255].

    Despite the name this handles downscale too; at identical dims it is the
    identity.  One matrix product per axis so BLAS carries the load.
    """
    if width < 1 or height < 1:
        raise ValueError(f"target dims must be >= 1, got {width}x{height}")
    if width == image.width and height == image.height:
        return image
    arr = image.to_array().astype(np.float64)
    h_in, w_in = image.height, image.width
    rows = _axis_matrix(h_in, height) @ arr.reshape(h_in, w_in * 3)
    by_col = rows.reshape(height, w_in, 3).transpose(1, 0, 2).reshape(w_in, height * 3)
    cols = _axis_matrix(w_in, width) @ by_col
    out = cols.reshape(width, height, 3).transpose(1, 0, 2)
    out = round_half_away(np.clip(out, 0.0, 255.0))
    return RasterImage.from_array(out.astype(np.uint8))
