"""Single-image encode and decode flows tying the branch modules together."""

from __future__ import annotations

from dataclasses import dataclass

from ..backends import BackendSet, GenerationRequest, GenerationResult
from ..container import (
    CODEC_BUILTIN,
    CODEC_EXTERNAL,
    Container,
    VisualPayload,
    make_container,
)
from ..metrics import RateReport, bpp
from ..prompting import DimensionSet, PromptSpec, ValidationReport, build_prompt, validate_caption
from ..textcodec import compress_text, decompress_text
from ..visualcodec import CodecRegistry, RasterImage, default_registry, downsample8


@dataclass(frozen=True)
class EncodeResult:
    container: Container
    rate: RateReport
    caption_report: ValidationReport | None


def make_registry(backends: BackendSet | None = None) -> CodecRegistry:
    """Default registry, with the external slot wired to the codec backend if present."""
    registry = default_registry()
    if backends is not None and backends.codec is not None:
        registry.register_external(backends.codec.encode, backends.codec.decode)
    return registry


def encode_image(
    image: RasterImage,
    mode,
    backends: BackendSet,
    registry: CodecRegistry | None = None,
) -> EncodeResult:
    """Run the text and/or visual branch for one image and pack the container."""
    if registry is None:
        registry = make_registry(backends)

    text_payload = None
    caption_report = None
    if mode.text_budget > 0:
        spec = PromptSpec(word_budget=mode.text_budget, variant=mode.prompt_variant)
        instruction = build_prompt(spec, DimensionSet())
        caption = backends.caption.caption(image, instruction, mode.text_budget)
        caption_report = validate_caption(caption, spec)
        text_payload = compress_text(caption_report.caption)

    visual_payload = None
    if mode.visual != "none":
        condition = downsample8(image)
        if mode.visual == "builtin":
            data = registry.encode(CODEC_BUILTIN, condition, quality=mode.builtin_quality)
            visual_payload = VisualPayload(codec_id=CODEC_BUILTIN, data=data)
        else:
            data = registry.encode(
                CODEC_EXTERNAL, condition, target_bpp=mode.external_target_bpp
            )
            visual_payload = VisualPayload(codec_id=CODEC_EXTERNAL, data=data)

    container = make_container(
        width=image.width,
        height=image.height,
        text_payload=text_payload,
        visual_payload=visual_payload,
    )
    return EncodeResult(container=container, rate=bpp(container), caption_report=caption_report)


def decode_container(
    container: Container,
    backends: BackendSet,
    repeats: int = 3,
    seeds: list[int] | None = None,
    registry: CodecRegistry | None = None,
) -> list[GenerationResult]:
    """Unpack conditions and issue `repeats` generation requests with distinct seeds."""
    if registry is None:
        registry = make_registry(backends)
    if seeds is None:
        seeds = [i + 1 for i in range(repeats)]
    if len(seeds) != repeats:
        raise ValueError(f"need {repeats} seeds, got {len(seeds)}")

    prompt_text = None
    if container.text_payload is not None:
        prompt_text = decompress_text(container.text_payload).text
    condition = None
    if container.visual_payload is not None:
        condition = registry.decode(
            container.visual_payload.codec_id, container.visual_payload.data
        )

    results = []
    for i in range(repeats):
        req = GenerationRequest(
            target_width=container.header.width,
            target_height=container.header.height,
            prompt_text=prompt_text,
            condition_image=condition,
            seed=seeds[i],
            repeat_index=i + 1,
        )
        results.append(backends.generation.generate(req))
    return results
