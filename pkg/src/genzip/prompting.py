"""Captioning instruction builder and caption diagnostics.

All structured-prompt wording lives in templates/structured.txt so it can be
swapped without code changes; this module only selects fragments and fills
the word budget and image-type placeholders.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from .textcodec import Caption, truncate_to_budget

IMAGE_TYPES = ("photo", "painting", "anime", "diagram", "unspecified")
VARIANTS = ("structured", "unstructured")

UNSTRUCTURED_TEMPLATE = "Describe this image in {N} words or fewer."

# positional words counted by spatial_coverage_score; /6 normalization caps
# the score at six distinct hits
SPATIAL_LEXICON = (
    "left",
    "right",
    "top",
    "bottom",
    "center",
    "foreground",
    "background",
    "above",
    "below",
    "behind",
    "front",
)
_COVERAGE_DENOMINATOR = 6

_FRAGMENT_RE = re.compile(r"^\{([A-Z_][A-Z_0-9]*):(.*)\}$", re.DOTALL)


class PromptError(Exception):
    pass


@dataclass(frozen=True)
class PromptSpec:
    word_budget: int
    variant: str = "structured"
    image_type_hint: str = "unspecified"

    def __post_init__(self):
        if not 1 <= self.word_budget <= 500:
            raise PromptError(f"word_budget must be in [1, 500], got {self.word_budget}")
        if self.variant not in VARIANTS:
            raise PromptError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if self.image_type_hint not in IMAGE_TYPES:
            raise PromptError(
                f"image_type_hint must be one of {IMAGE_TYPES}, got {self.image_type_hint!r}"
            )


@dataclass(frozen=True)
class DimensionSet:
    feature_correspondence: bool = True
    geometric_consistency: bool = True
    photometric_properties: bool = True
    stylistic_alignment: bool = True
    semantic_coherence: bool = True
    structural_integrity: bool = True


@dataclass(frozen=True)
class ValidationReport:
    within_budget: bool
    word_count: int
    action_taken: str  # "accepted" | "truncated"
    caption: Caption


@lru_cache(maxsize=1)
def _structured_template_lines() -> tuple[str, ...]:
    text = resources.files("genzip.templates").joinpath("structured.txt").read_text("utf-8")
    lines = []
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            lines.append(line)
    return tuple(lines)


def build_prompt(spec: PromptSpec, dims: DimensionSet | None = None) -> str:
    """Render the captioning instruction; deterministic for equal inputs."""
    if dims is None:
        dims = DimensionSet()
    if spec.variant == "unstructured":
        return UNSTRUCTURED_TEMPLATE.replace("{N}", str(spec.word_budget))

    parts = []
    for line in _structured_template_lines():
        m = _FRAGMENT_RE.match(line)
        if m:
            name, text = m.group(1), m.group(2)
            if name == "TYPE":
                if spec.image_type_hint == "unspecified":
                    continue
                text = text.replace("{T}", spec.image_type_hint)
            elif name.startswith("DIM_"):
                if not getattr(dims, name[4:].lower(), False):
                    continue
            else:
                raise PromptError(f"unknown template fragment {name!r}")
            parts.append(text)
        else:
            parts.append(line)
    return " ".join(parts).replace("{N}", str(spec.word_budget))


def validate_caption(caption: Caption, spec: PromptSpec) -> ValidationReport:
    """Enforce the word budget: over-budget captions are truncated and flagged."""
    if caption.word_count <= spec.word_budget:
        return ValidationReport(
            within_budget=True,
            word_count=caption.word_count,
            action_taken="accepted",
            caption=caption,
        )
    return ValidationReport(
        within_budget=False,
        word_count=caption.word_count,
        action_taken="truncated",
        caption=truncate_to_budget(caption, spec.word_budget),
    )


def spatial_coverage_score(caption: Caption) -> float:
    """Fraction (capped at 1.0) of spatial lexicon words present in the caption.

    Diagnostic only; nothing in the pipeline depends on it.
    """
    text = caption.text.lower()
    matches = sum(
        1 for w in SPATIAL_LEXICON if re.search(rf"\b{w}\b", text) is not None
    )
    return min(matches / _COVERAGE_DENOMINATOR, 1.0)
