#!/usr/bin/env python3
"""Regenerate the checked-in test fixtures under fixtures/.

Deterministic: re-running on the same platform reproduces every file
byte-for-byte.  Run from the repo root: python scripts/make_fixtures.py
"""

from __future__ import annotations

import hashlib
import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from genzip.container import VisualPayload, container_bits, make_container, serialize
from genzip.metrics import psnr
from genzip.synthetic import synthetic_image
from genzip.textcodec import Caption, compress_text
from genzip.visualcodec import CodecSettings, decode_builtin, encode_builtin

FIXTURES = ROOT / "fixtures"

CAPTION_30W = (
    "A red brick house sits on the left, a gravel path curves right toward a "
    "wooden fence, and three tall pines rise behind the roof under a pale "
    "morning sky."
)

CAPTION_120W = (
    "Across the top, a pale gray sky fades into thin bands of cloud above a "
    "distant ridge. Below the ridge, terraced fields step down toward a slow "
    "river that crosses the frame from left to right. On the left bank, a "
    "cluster of low stone houses with slate roofs leans together, their "
    "windows catching warm late light. In the center, an arched footbridge "
    "spans the water, its reflection broken by ripples. On the right, a "
    "gravel road climbs past a wooden fence toward a barn painted deep red. "
    "In the foreground, tall green grass and scattered wildflowers frame "
    "the scene, with an old bicycle resting against a mossy boulder in the "
    "lower right corner, its front wheel turned slightly outward."
)

CAPTION_UNICODE = "Ein stiller See spiegelt 雪山 und einen roten Pavillon, œuvre d'été, тихий вечер."


def write_text_fixtures() -> bytes:
    out = FIXTURES / "text"
    out.mkdir(parents=True, exist_ok=True)
    entries = {
        "caption_030w": (CAPTION_30W, 30),
        "caption_120w": (CAPTION_120W, 120),
        "empty": ("", 0),
        "unicode": (CAPTION_UNICODE, None),
    }
    stream_30w = b""
    for name, (text, expect_words) in entries.items():
        caption = Caption(text)
        if expect_words is not None and caption.word_count != expect_words:
            raise SystemExit(
                f"{name}: expected {expect_words} words, counted {caption.word_count}"
            )
        stream = compress_text(caption)
        (out / f"{name}.txt").write_text(text, "utf-8")
        (out / f"{name}.bin").write_bytes(stream)
        if name == "caption_030w":
            stream_30w = stream
        print(f"text/{name}: {len(text)} chars -> {len(stream)} octets")
    return stream_30w


def write_codec0_fixture() -> bytes:
    out = FIXTURES / "codec0"
    out.mkdir(parents=True, exist_ok=True)
    meta = {"width": 64, "height": 48, "seed": 77, "quality": 35}
    img = synthetic_image(meta["width"], meta["height"], meta["seed"])
    blob = encode_builtin(img, CodecSettings(quality=meta["quality"]))
    decoded = decode_builtin(blob)
    meta["decoded_sha256"] = hashlib.sha256(decoded.samples).hexdigest()
    meta["psnr_db"] = psnr(img, decoded)
    (out / "golden_q35.bin").write_bytes(blob)
    (out / "golden_q35.json").write_text(json.dumps(meta, indent=2) + "\n", "utf-8")
    print(f"codec0/golden_q35: {len(blob)} octets, psnr {meta['psnr_db']:.3f} dB")
    return blob


def write_container_fixture(text_payload: bytes, visual_payload: bytes) -> None:
    out = FIXTURES / "containers"
    out.mkdir(parents=True, exist_ok=True)
    c = make_container(
        512,
        384,
        text_payload=text_payload,
        visual_payload=VisualPayload(codec_id=0, data=visual_payload),
    )
    blob = serialize(c)
    meta = {
        "width": 512,
        "height": 384,
        "text_payload_len": len(text_payload),
        "text_payload_sha256": hashlib.sha256(text_payload).hexdigest(),
        "codec_id": 0,
        "visual_payload_len": len(visual_payload),
        "visual_payload_sha256": hashlib.sha256(visual_payload).hexdigest(),
        "bits_total": container_bits(c),
    }
    (out / "golden_text_visual.gzc").write_bytes(blob)
    (out / "golden_text_visual.json").write_text(json.dumps(meta, indent=2) + "\n", "utf-8")
    print(f"containers/golden_text_visual: {len(blob)} octets")


def write_psnr_pin() -> None:
    out = FIXTURES / "images"
    out.mkdir(parents=True, exist_ok=True)
    pin = {"width": 128, "height": 128, "seed": 2024, "quality": 50}
    img = synthetic_image(pin["width"], pin["height"], pin["seed"])
    decoded = decode_builtin(encode_builtin(img, CodecSettings(quality=pin["quality"])))
    pin["psnr_db"] = psnr(img, decoded)
    (out / "builtin_psnr_pin.json").write_text(json.dumps(pin, indent=2) + "\n", "utf-8")
    print(f"images/builtin_psnr_pin: {pin['psnr_db']:.3f} dB")


def main() -> None:
    stream_30w = write_text_fixtures()
    visual = write_codec0_fixture()
    write_container_fixture(stream_30w, visual)
    write_psnr_pin()


if __name__ == "__main__":
    main()
