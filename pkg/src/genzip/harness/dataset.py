"""Dataset preparation: shorter side to 1024, center crop to 1024x1024."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

from ..visualcodec import RasterImage, load_png, save_png, upsample_to
from ..visualcodec.raster import RasterError, from_png_bytes

TARGET_SIDE = 1024
MIN_SOURCE_SIDE = 64

IMAGE_EXTENSIONS = (".png", ".jpg", ".jpeg", ".bmp", ".webp")


class DatasetError(Exception):
    pass


def _round_half_away(x: float) -> int:
    return int(x + 0.5) if x >= 0 else -int(-x + 0.5)


def resize_short_side(image: RasterImage, target: int = TARGET_SIDE) -> RasterImage:
    """Scale so min(width, height) == target, long side rounded half away from zero."""
    if image.width <= image.height:
        new_w = target
        new_h = _round_half_away(image.height * target / image.width)
    else:
        new_h = target
        new_w = _round_half_away(image.width * target / image.height)
    return upsample_to(image, new_w, new_h)


def center_crop(image: RasterImage, width: int, height: int) -> RasterImage:
    """Center crop; when the margin is odd the extra pixel is shed on the right/bottom."""
    if image.width < width or image.height < height:
        raise DatasetError(
            f"cannot crop {image.width}x{image.height} to {width}x{height}"
        )
    left = (image.width - width) // 2
    top = (image.height - height) // 2
    arr = image.to_array()[top : top + height, left : left + width]
    return RasterImage.from_array(arr)


def prepare_image(image: RasterImage, target: int = TARGET_SIDE) -> RasterImage:
    return center_crop(resize_short_side(image, target), target, target)


def prepare_dataset(src_dir: str | Path, dst_dir: str | Path, target: int = TARGET_SIDE) -> dict:
    """Prepare every image under src_dir into dst_dir; returns (and writes) the manifest."""
    src = Path(src_dir)
    dst = Path(dst_dir)
    if not src.is_dir():
        raise DatasetError(f"source directory does not exist: {src}")
    sources = sorted(
        p for p in src.iterdir() if p.suffix.lower() in IMAGE_EXTENSIONS
    )
    if not sources:
        raise DatasetError(f"no images found under {src}")
    dst.mkdir(parents=True, exist_ok=True)

    entries = []
    for path in sources:
        raw = path.read_bytes()
        try:
            image = from_png_bytes(raw)  # PIL sniffs the real format
        except RasterError as exc:
            raise DatasetError(f"undecodable source {path}: {exc}") from exc
        if min(image.width, image.height) < MIN_SOURCE_SIDE:
            raise DatasetError(
                f"{path}: source {image.width}x{image.height} below "
                f"{MIN_SOURCE_SIDE}px minimum side"
            )
        prepared = prepare_image(image, target)
        out_path = dst / f"{path.stem}.png"
        save_png(prepared, out_path)
        entries.append(
            {
                "id": path.stem,
                "source": str(path),
                "source_sha256": hashlib.sha256(raw).hexdigest(),
                "source_width": image.width,
                "source_height": image.height,
                "width": prepared.width,
                "height": prepared.height,
                "file": out_path.name,
            }
        )

    manifest = {"target_side": target, "images": entries}
    (dst / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n", "utf-8")
    return manifest


def load_manifest(dataset_dir: str | Path) -> list[tuple[str, Path]]:
    """(image_id, png path) pairs; falls back to globbing PNGs if no manifest."""
    dataset_dir = Path(dataset_dir)
    manifest_path = dataset_dir / "manifest.json"
    if manifest_path.exists():
        manifest = json.loads(manifest_path.read_text("utf-8"))
        return [(e["id"], dataset_dir / e["file"]) for e in manifest["images"]]
    pngs = sorted(dataset_dir.glob("*.png"))
    if not pngs:
        raise DatasetError(f"no manifest.json or PNGs under {dataset_dir}")
    return [(p.stem, p) for p in pngs]


def load_prepared(dataset_dir: str | Path) -> list[tuple[str, RasterImage]]:
    return [(image_id, load_png(path)) for image_id, path in load_manifest(dataset_dir)]
