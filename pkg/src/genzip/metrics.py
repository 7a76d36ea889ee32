"""Rate accounting and the offline quality panel: bpp, PSNR, SSIM, embedding cosine.

Neural IQA metrics are never computed natively; they arrive, if at all,
through the external_metrics map of a QualityPanel.
"""

from __future__ import annotations

import math
import statistics
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.ndimage import correlate1d

from .container import Container, container_bits
from .visualcodec import RasterImage

PSNR_CAP_DB = 99.0

_SSIM_WINDOW = 11
_SSIM_SIGMA = 1.5
_SSIM_K1 = 0.01
_SSIM_K2 = 0.03
_SSIM_L = 255.0

DEFAULT_METRIC_FIELDS = ("bpp", "psnr_db", "ssim", "embed_cosine")


class MetricError(Exception):
    pass


class DimensionMismatchError(MetricError):
    pass


class WindowTooSmallError(MetricError):
    """Image smaller than the SSIM window."""


class ZeroVectorError(MetricError):
    pass


@dataclass(frozen=True)
class RateReport:
    bits_total: int
    bits_text: int
    bits_visual: int
    bits_overhead: int
    bpp: float


@dataclass(frozen=True)
class QualityPanel:
    psnr_db: float
    ssim: float
    embed_cosine: float | None = None
    external_metrics: dict = field(default_factory=dict)


def bpp(container: Container) -> RateReport:
    """Decompose container bits into payload and overhead terms.

    Integer bit arithmetic throughout; the only float is the final division
    by the original pixel count.
    """
    total = container_bits(container)
    bits_text = 8 * len(container.text_payload) if container.text_payload is not None else 0
    bits_visual = (
        8 * len(container.visual_payload.data) if container.visual_payload is not None else 0
    )
    overhead = total - bits_text - bits_visual
    pixels = container.header.width * container.header.height
    return RateReport(
        bits_total=total,
        bits_text=bits_text,
        bits_visual=bits_visual,
        bits_overhead=overhead,
        bpp=total / pixels,
    )


def _check_dims(a: RasterImage, b: RasterImage) -> None:
    if (a.width, a.height) != (b.width, b.height):
        raise DimensionMismatchError(
            f"{a.width}x{a.height} vs {b.width}x{b.height}"
        )


def psnr(a: RasterImage, b: RasterImage) -> float:
    """Peak signal-to-noise ratio in dB over all channels, capped at 99.0."""
    _check_dims(a, b)
    diff = a.to_array().astype(np.float64) - b.to_array().astype(np.float64)
    mse = float(np.mean(diff * diff))
    if mse == 0.0:
        return PSNR_CAP_DB
    return min(10.0 * math.log10(255.0**2 / mse), PSNR_CAP_DB)


def _luminance(image: RasterImage) -> np.ndarray:
    arr = image.to_array().astype(np.float64)
    return 0.299 * arr[..., 0] + 0.587 * arr[..., 1] + 0.114 * arr[..., 2]


def _gaussian_window() -> np.ndarray:
    half = _SSIM_WINDOW // 2
    x = np.arange(-half, half + 1, dtype=np.float64)
    g = np.exp(-(x**2) / (2.0 * _SSIM_SIGMA**2))
    return g / g.sum()


def _valid_filter(img: np.ndarray, window: np.ndarray) -> np.ndarray:
    half = _SSIM_WINDOW // 2
    out = correlate1d(img, window, axis=0, mode="constant")
    out = correlate1d(out, window, axis=1, mode="constant")
    return out[half:-half, half:-half]


def ssim(a: RasterImage, b: RasterImage) -> float:
    """Single-scale SSIM on the BT.601 luminance plane.

    11x11 Gaussian window (sigma 1.5), K1=0.01, K2=0.03, L=255, averaged over
    valid window positions only.
    """
    _check_dims(a, b)
    if min(a.width, a.height) < _SSIM_WINDOW:
        raise WindowTooSmallError(
            f"image {a.width}x{a.height} smaller than {_SSIM_WINDOW}x{_SSIM_WINDOW} window"
        )
    x = _luminance(a)
    y = _luminance(b)
    w = _gaussian_window()

    mu_x = _valid_filter(x, w)
    mu_y = _valid_filter(y, w)
    var_x = _valid_filter(x * x, w) - mu_x * mu_x
    var_y = _valid_filter(y * y, w) - mu_y * mu_y
    cov = _valid_filter(x * y, w) - mu_x * mu_y

    c1 = (_SSIM_K1 * _SSIM_L) ** 2
    c2 = (_SSIM_K2 * _SSIM_L) ** 2
    ssim_map = ((2 * mu_x * mu_y + c1) * (2 * cov + c2)) / (
        (mu_x * mu_x + mu_y * mu_y + c1) * (var_x + var_y + c2)
    )
    return float(ssim_map.mean())


def embed_cosine(u: Sequence[float] | np.ndarray, v: Sequence[float] | np.ndarray) -> float:
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise DimensionMismatchError(f"{u.shape} vs {v.shape}")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise ZeroVectorError("cosine undefined for zero vectors")
    return float(np.dot(u, v) / (nu * nv))


@dataclass(frozen=True)
class AggregateStat:
    count: int
    mean: float
    stddev: float


def aggregate(
    records: Iterable[Mapping],
    metric_fields: Sequence[str] = DEFAULT_METRIC_FIELDS,
) -> dict[str, dict]:
    """Two-stage averaging that mirrors the repeat protocol.

    Repeats collapse to a per-(image, mode) mean first; per-mode statistics
    (count of contributing images, mean, sample stddev with n=1 -> 0) are
    then taken across images.  Permutation-invariant over the input.
    """
    records = list(records)
    if not records:
        raise ValueError("aggregate requires at least one record")

    by_cell: dict[tuple[str, str], dict[str, list[float]]] = defaultdict(
        lambda: defaultdict(list)
    )
    n_records: dict[str, int] = defaultdict(int)
    for rec in records:
        key = (str(rec["mode_name"]), str(rec["image_id"]))
        n_records[key[0]] += 1
        for f in metric_fields:
            value = rec.get(f)
            if value is not None:
                by_cell[key][f].append(float(value))

    per_mode: dict[str, dict[str, list[float]]] = defaultdict(lambda: defaultdict(list))
    for (mode, _image), metrics_map in sorted(by_cell.items()):
        for f, values in metrics_map.items():
            per_mode[mode][f].append(statistics.mean(values))

    summary: dict[str, dict] = {}
    for mode in sorted(per_mode):
        stats: dict[str, AggregateStat] = {}
        for f in metric_fields:
            means = per_mode[mode].get(f)
            if not means:
                continue
            stats[f] = AggregateStat(
                count=len(means),
                mean=statistics.mean(means),
                stddev=statistics.stdev(means) if len(means) > 1 else 0.0,
            )
        summary[mode] = {"records": n_records[mode], "metrics": stats}
    return summary
