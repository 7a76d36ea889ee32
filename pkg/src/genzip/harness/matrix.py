"""Experiment matrix runner: (image x mode x repeat) -> results.jsonl + CSV summaries.

Rows are appended in a deterministic order (dataset order, then the
configured mode order, then repeat index), so identical runs produce
byte-identical results files apart from wall-time values.  Existing rows are
skipped on re-runs, making interrupted runs resumable; containers persist per
(image, mode) so resumed decodes never re-contact the caption backend.
"""

from __future__ import annotations

import csv
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .. import metrics
from ..backends import BackendSet
from ..container import deserialize, serialize
from ..visualcodec import RasterImage, load_png
from .config import RunConfig, build_backends
from .dataset import load_manifest
from .modes import Mode, resolve_mode
from .pipeline import decode_container, encode_image, make_registry

RESULTS_SCHEMA = 1

METRIC_FIELDS = ("bpp", "psnr_db", "ssim", "embed_cosine")


@dataclass
class CellFailure:
    image_id: str
    mode_name: str
    error: str


@dataclass
class MatrixResult:
    rows_written: int
    rows_skipped: int
    failures: list[CellFailure]
    results_path: Path
    summary_path: Path
    curves_path: Path


def _row_key(row: dict) -> tuple[str, str, int]:
    return (row["image_id"], row["mode_name"], row["repeat_index"])


def load_results(path: Path) -> list[dict]:
    rows = []
    if path.exists():
        with open(path, "r", encoding="utf-8") as f:
            for line in f:
                line = line.strip()
                if line:
                    rows.append(json.loads(line))
    return rows


def _eval_cell(
    image: RasterImage,
    image_id: str,
    mode: Mode,
    missing_repeats: list[int],
    repeats: int,
    seed_base: int,
    backends: BackendSet,
    registry,
    container_path: Path,
) -> list[dict]:
    """Encode (or reload) one (image, mode) container and evaluate missing repeats."""
    if container_path.exists():
        container = deserialize(container_path.read_bytes())
        rate = metrics.bpp(container)
    else:
        encoded = encode_image(image, mode, backends, registry=registry)
        container = encoded.container
        rate = encoded.rate
        container_path.write_bytes(serialize(container))

    seeds = [seed_base + i for i in range(repeats)]
    rows = []
    for r in missing_repeats:
        start = time.perf_counter()
        result = decode_container(
            container, backends, repeats=1, seeds=[seeds[r - 1]], registry=registry
        )[0]
        embed_cos = None
        if backends.embedding is not None:
            u = backends.embedding.embed(image)
            v = backends.embedding.embed(result.image)
            embed_cos = metrics.embed_cosine(u, v)
        panel = metrics.QualityPanel(
            psnr_db=metrics.psnr(image, result.image),
            ssim=metrics.ssim(image, result.image),
            embed_cosine=embed_cos,
        )
        rows.append(
            {
                "schema": RESULTS_SCHEMA,
                "image_id": image_id,
                "mode_name": mode.name,
                "repeat_index": r,
                "bpp": rate.bpp,
                "bits_text": rate.bits_text,
                "bits_visual": rate.bits_visual,
                "bits_overhead": rate.bits_overhead,
                "psnr_db": panel.psnr_db,
                "ssim": panel.ssim,
                "embed_cosine": panel.embed_cosine,
                "resized_flag": result.resized,
                "wall_time_s": round(time.perf_counter() - start, 6),
            }
        )
    return rows


def write_summaries(
    rows: list[dict],
    summary_path: Path,
    curves_path: Path,
    embed_label: str = "embed_cosine",
) -> None:
    """Per-mode aggregate CSV plus a plot-friendly curves CSV."""
    summary = metrics.aggregate(rows, metric_fields=METRIC_FIELDS)
    label = {f: (embed_label if f == "embed_cosine" else f) for f in METRIC_FIELDS}

    with open(summary_path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        header = ["mode", "images", "records"]
        for field in METRIC_FIELDS:
            header += [f"{label[field]}_mean", f"{label[field]}_stddev"]
        writer.writerow(header)
        for mode_name, entry in summary.items():
            stats = entry["metrics"]
            images = max((s.count for s in stats.values()), default=0)
            row = [mode_name, images, entry["records"]]
            for field in METRIC_FIELDS:
                if field in stats:
                    row += [repr(stats[field].mean), repr(stats[field].stddev)]
                else:
                    row += ["", ""]
            writer.writerow(row)

    with open(curves_path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["mode", "bpp_mean"] + [f"{label[m]}_mean" for m in METRIC_FIELDS[1:]])
        for mode_name, entry in summary.items():
            stats = entry["metrics"]
            row = [mode_name]
            for field in METRIC_FIELDS:
                row.append(repr(stats[field].mean) if field in stats else "")
            writer.writerow(row)


def run_matrix(config: RunConfig, backends: BackendSet | None = None) -> MatrixResult:
    config.validate_dirs()
    if backends is None:
        backends = build_backends(config)
    registry = make_registry(backends)

    output_dir = Path(config.output_dir)
    containers_dir = output_dir / "containers"
    containers_dir.mkdir(parents=True, exist_ok=True)
    results_path = output_dir / "results.jsonl"
    summary_path = output_dir / "summary.csv"
    curves_path = output_dir / "curves.csv"

    manifest = load_manifest(config.dataset_dir)
    modes = [resolve_mode(name, config.builtin_quality) for name in config.modes]
    images = {image_id: load_png(path) for image_id, path in manifest}

    existing = load_results(results_path)
    done = {_row_key(row) for row in existing}

    # deterministic cell order: dataset order, configured mode order
    cells = []
    for image_id, _png_path in manifest:
        for mode in modes:
            missing = [
                r
                for r in range(1, config.repeats + 1)
                if (image_id, mode.name, r) not in done
            ]
            if missing:
                cells.append((image_id, mode, missing))

    workers = config.workers
    if workers <= 0:
        role = config.backend_roles.get("caption")
        workers = role.parallelism_limit if role else 4

    failures: list[CellFailure] = []
    rows_written = 0
    rows_skipped = len(done)

    def _submit(executor, cell):
        image_id, mode, missing = cell
        return executor.submit(
            _eval_cell,
            images[image_id],
            image_id,
            mode,
            missing,
            config.repeats,
            config.seed_base,
            backends,
            registry,
            containers_dir / f"{image_id}__{mode.name}.gzc",
        )

    with open(results_path, "a", encoding="utf-8") as results_file:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            futures = [(cell, _submit(executor, cell)) for cell in cells]
            for (image_id, mode, _missing), future in futures:
                try:
                    rows = future.result()
                except Exception as exc:  # log-and-skip, partial-failure policy
                    failures.append(
                        CellFailure(
                            image_id=image_id,
                            mode_name=mode.name,
                            error=f"{type(exc).__name__}: {exc}",
                        )
                    )
                    continue
                for row in rows:
                    results_file.write(json.dumps(row) + "\n")
                    rows_written += 1
                results_file.flush()

    if failures:
        with open(output_dir / "failures.log", "a", encoding="utf-8") as f:
            for failure in failures:
                f.write(f"{failure.image_id}\t{failure.mode_name}\t{failure.error}\n")

    all_rows = load_results(results_path)
    if all_rows:
        embed_label = "embed_cosine_mock" if config.mock_backends else "embed_cosine"
        write_summaries(all_rows, summary_path, curves_path, embed_label=embed_label)

    return MatrixResult(
        rows_written=rows_written,
        rows_skipped=rows_skipped,
        failures=failures,
        results_path=results_path,
        summary_path=summary_path,
        curves_path=curves_path,
    )
