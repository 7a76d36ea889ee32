#!/usr/bin/env python3
"""Run the full experiment matrix offline and print the rate/quality table.

Builds the 10-image synthetic corpus, prepares it to the 1024x1024 protocol,
runs all six default modes x 3 repeats with mock backends, and prints the
per-mode aggregates.  Everything is deterministic; re-running resumes and
adds nothing.

    python scripts/run_paper_matrix.py [--work-dir runs/paper_matrix]
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from genzip import metrics
from genzip.harness.config import RunConfig
from genzip.harness.dataset import prepare_dataset
from genzip.harness.matrix import load_results, run_matrix
from genzip.harness.modes import DEFAULT_MATRIX
from genzip.synthetic import write_mock_corpus


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--work-dir", default="runs/paper_matrix")
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--quality", type=int, default=35, help="built-in codec quality")
    parser.add_argument(
        "--modes", default=",".join(DEFAULT_MATRIX),
        help="comma-separated preset names (default: the six-mode grid)",
    )
    args = parser.parse_args()

    work = Path(args.work_dir)
    corpus = work / "corpus"
    prepared = work / "prepared"
    out = work / "results"

    if not (prepared / "manifest.json").exists():
        print("building synthetic corpus ...")
        write_mock_corpus(corpus, count=10, width=1024, height=1024)
        prepare_dataset(corpus, prepared)

    config = RunConfig(
        dataset_dir=prepared,
        output_dir=out,
        modes=tuple(m.strip() for m in args.modes.split(",")),
        repeats=args.repeats,
        builtin_quality=args.quality,
        mock_backends=True,
    )
    start = time.perf_counter()
    result = run_matrix(config)
    elapsed = time.perf_counter() - start
    print(
        f"\n{result.rows_written} new rows ({result.rows_skipped} resumed) "
        f"in {elapsed:.1f}s -> {result.results_path}"
    )
    if result.failures:
        for f in result.failures:
            print(f"FAILED {f.image_id}/{f.mode_name}: {f.error}", file=sys.stderr)
        return 1

    rows = load_results(result.results_path)
    summary = metrics.aggregate(rows)
    print(f"\n{'mode':<22}{'bpp':>12}{'psnr_db':>10}{'ssim':>8}{'embed_cos':>11}")
    for mode in config.modes:
        stats = summary[mode]["metrics"]
        print(
            f"{mode:<22}"
            f"{stats['bpp'].mean:>12.6f}"
            f"{stats['psnr_db'].mean:>10.2f}"
            f"{stats['ssim'].mean:>8.3f}"
            f"{stats['embed_cosine'].mean:>11.4f}"
        )
    print(f"\nCSV summaries: {result.summary_path}, {result.curves_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
