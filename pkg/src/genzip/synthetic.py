"""Deterministic synthetic photographs for the offline mock corpus.

Smooth gradients, a few geometric subjects, and mild grain: enough texture
that the block codec produces realistic payload sizes, fully reproducible
from the seed on any platform.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from scipy.ndimage import gaussian_filter

from .visualcodec import RasterImage, save_png

DEFAULT_CORPUS_SEED = 2024


def synthetic_image(width: int, height: int, seed: int) -> RasterImage:
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:height, 0:width].astype(np.float64)
    xn = xx / max(width - 1, 1)
    yn = yy / max(height - 1, 1)

    img = np.zeros((height, width, 3), dtype=np.float64)
    # sky-to-ground style gradient, randomized per channel
    base = rng.uniform(60, 180, size=3)
    tilt = rng.uniform(-70, 70, size=(3, 2))
    for c in range(3):
        img[..., c] = base[c] + tilt[c, 0] * xn + tilt[c, 1] * yn
        # low-frequency undulation
        fx, fy = rng.uniform(0.5, 2.0, size=2)
        phase = rng.uniform(0, 2 * np.pi, size=2)
        img[..., c] += rng.uniform(5, 14) * np.cos(2 * np.pi * fx * xn + phase[0])
        img[..., c] += rng.uniform(5, 14) * np.cos(2 * np.pi * fy * yn + phase[1])

    # a handful of elliptical and rectangular subjects
    for _ in range(rng.integers(3, 7)):
        color = rng.uniform(30, 225, size=3)
        cx, cy = rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9)
        if rng.random() < 0.5:
            rx, ry = rng.uniform(0.05, 0.22, size=2)
            mask = ((xn - cx) / rx) ** 2 + ((yn - cy) / ry) ** 2 <= 1.0
        else:
            rx, ry = rng.uniform(0.04, 0.18, size=2)
            mask = (np.abs(xn - cx) <= rx) & (np.abs(yn - cy) <= ry)
        alpha = rng.uniform(0.55, 0.9)
        img[mask] = (1 - alpha) * img[mask] + alpha * color

    # soften subject edges like real optics, then add mild sensor grain
    sigma = max(min(width, height) / 512, 0.6)
    img = gaussian_filter(img, sigma=(sigma, sigma, 0))
    img += rng.normal(0.0, 2.0, size=img.shape)
    return RasterImage.from_array(np.clip(img, 0, 255).round().astype(np.uint8))


def write_mock_corpus(
    dst_dir: str | Path,
    count: int = 10,
    width: int = 1024,
    height: int = 1024,
    seed: int = DEFAULT_CORPUS_SEED,
) -> list[Path]:
    """Write `count` synthetic PNGs; same seed always yields identical files."""
    dst = Path(dst_dir)
    dst.mkdir(parents=True, exist_ok=True)
    paths = []
    for i in range(count):
        path = dst / f"mock_{i + 1:02d}.png"
        save_png(synthetic_image(width, height, seed + i), path)
        paths.append(path)
    return paths
