"""Command-line interface: genzip prepare | encode | decode | run | report."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .backends import BackendError, BackendSet, make_mock_backends
from .container import ContainerError, deserialize, serialize
from .harness import matrix
from .harness.config import (
    BACKEND_ROLES,
    ConfigError,
    RunConfig,
    _role_config,
    build_backends,
    load_run_config,
    parse_config_text,
)
from .harness.dataset import DatasetError, prepare_dataset
from .harness.modes import ModeError, resolve_mode
from .harness.pipeline import decode_container, encode_image
from .textcodec import TextCodecError
from .visualcodec import VisualCodecError, load_png, save_png
from .visualcodec.raster import RasterError


def _backends_from_args(args) -> BackendSet:
    if args.mock_backends:
        return make_mock_backends()
    if not args.backend_config:
        raise ConfigError("pass --backend-config or --mock-backends")
    sections = parse_config_text(Path(args.backend_config).read_text("utf-8"), args.backend_config)
    roles = {
        role: _role_config(sections[role], role)
        for role in BACKEND_ROLES
        if role in sections
    }
    cfg = RunConfig(
        dataset_dir=Path("."), output_dir=Path("."), backend_roles=roles, mock_backends=False
    )
    return build_backends(cfg)


def _cmd_prepare(args) -> int:
    manifest = prepare_dataset(args.src, args.dst)
    print(f"prepared {len(manifest['images'])} images into {args.dst}")
    return 0


def _cmd_encode(args) -> int:
    image = load_png(args.image)
    mode = resolve_mode(args.mode, args.quality)
    backends = _backends_from_args(args)
    result = encode_image(image, mode, backends)
    data = serialize(result.container)
    Path(args.out).write_bytes(data)
    r = result.rate
    print(
        f"{args.out}: {len(data)} octets, bpp={r.bpp:.6f} "
        f"(text={r.bits_text}b visual={r.bits_visual}b overhead={r.bits_overhead}b)"
    )
    return 0


def _cmd_decode(args) -> int:
    data = Path(args.container).read_bytes()
    try:
        container = deserialize(data)
    except ContainerError as exc:
        print(f"error: {args.container}: {exc}", file=sys.stderr)
        return 1
    backends = _backends_from_args(args)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        results = decode_container(
            container,
            backends,
            repeats=args.repeats,
            seeds=[args.seed_base + i for i in range(args.repeats)],
        )
    except (VisualCodecError, TextCodecError) as exc:
        print(f"error: {args.container}: {exc}", file=sys.stderr)
        return 1
    stem = Path(args.container).stem
    for i, result in enumerate(results, start=1):
        path = out_dir / f"{stem}_r{i}.png"
        save_png(result.image, path)
        print(path)
    return 0


def _cmd_run(args) -> int:
    config = load_run_config(args.config)
    if args.mock_backends:
        config.mock_backends = True
    result = matrix.run_matrix(config)
    print(
        f"wrote {result.rows_written} rows "
        f"(skipped {result.rows_skipped} existing) to {result.results_path}"
    )
    print(f"summary: {result.summary_path}")
    print(f"curves:  {result.curves_path}")
    if result.failures:
        for failure in result.failures:
            print(
                f"FAILED {failure.image_id}/{failure.mode_name}: {failure.error}",
                file=sys.stderr,
            )
        return 1
    return 0


def _cmd_report(args) -> int:
    rows = matrix.load_results(Path(args.results))
    if not rows:
        print(f"error: no rows in {args.results}", file=sys.stderr)
        return 1
    curves = Path(args.curves) if args.curves else Path(args.out).with_name("curves.csv")
    matrix.write_summaries(rows, Path(args.out), curves, embed_label=args.embed_label)
    print(f"summary: {args.out}")
    print(f"curves:  {curves}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="genzip",
        description="Generative image compression toolkit: encode captions + "
        "low-res visual conditions, decode via a generative backend, and "
        "reproduce the rate/quality experiment matrix.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prepare", help="resize/crop a source folder to the 1024x1024 protocol")
    p.add_argument("--src", required=True)
    p.add_argument("--dst", required=True)
    p.set_defaults(func=_cmd_prepare)

    p = sub.add_parser("encode", help="encode one image into a .gzc container")
    p.add_argument("--image", required=True)
    p.add_argument("--mode", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--quality", type=int, default=None, help="built-in codec quality override")
    p.add_argument("--backend-config", default=None)
    p.add_argument("--mock-backends", action="store_true")
    p.set_defaults(func=_cmd_encode)

    p = sub.add_parser("decode", help="reconstruct images from a .gzc container")
    p.add_argument("--container", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--seed-base", type=int, default=1)
    p.add_argument("--backend-config", default=None)
    p.add_argument("--mock-backends", action="store_true")
    p.set_defaults(func=_cmd_decode)

    p = sub.add_parser("run", help="run the experiment matrix from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--mock-backends", action="store_true", help="force mock backends")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("report", help="recompute summary/curves CSVs from results.jsonl")
    p.add_argument("--results", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--curves", default=None)
    p.add_argument("--embed-label", default="embed_cosine")
    p.set_defaults(func=_cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, DatasetError, ModeError, RasterError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BackendError as exc:
        print(f"backend error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
