"""Experiment modes: the text-budget / visual-condition matrix.

The default matrix is the six-point grid actually swept in the rate/quality
experiments (text-only 15/30/120 plus multimodal 0/15/60 words); the
unstructured-prompt preset exists for the ablation and is selectable by name.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

VALID_BUDGETS = (0, 15, 30, 60, 120)
VISUAL_KINDS = ("none", "builtin", "external")


class ModeError(Exception):
    pass


@dataclass(frozen=True)
class Mode:
    name: str
    text_budget: int
    visual: str = "none"
    builtin_quality: int = 35
    external_target_bpp: float = 0.03
    prompt_variant: str = "structured"

    def __post_init__(self):
        if self.text_budget not in VALID_BUDGETS:
            raise ModeError(f"text_budget must be one of {VALID_BUDGETS}, got {self.text_budget}")
        if self.visual not in VISUAL_KINDS:
            raise ModeError(f"visual must be one of {VISUAL_KINDS}, got {self.visual!r}")
        if self.text_budget == 0 and self.visual == "none":
            raise ModeError("mode must transmit at least one of text / visual condition")
        if self.prompt_variant not in ("structured", "unstructured"):
            raise ModeError(f"unknown prompt_variant {self.prompt_variant!r}")


PRESETS: dict[str, Mode] = {
    m.name: m
    for m in (
        Mode(name="text15", text_budget=15),
        Mode(name="text30", text_budget=30),
        Mode(name="text120", text_budget=120),
        Mode(name="text30_unstructured", text_budget=30, prompt_variant="unstructured"),
        Mode(name="mm0", text_budget=0, visual="builtin"),
        Mode(name="mm15", text_budget=15, visual="builtin"),
        Mode(name="mm60", text_budget=60, visual="builtin"),
    )
}

DEFAULT_MATRIX = ("text15", "text30", "text120", "mm0", "mm15", "mm60")


def resolve_mode(name: str, builtin_quality: int | None = None) -> Mode:
    """Look up a preset, optionally overriding the built-in codec quality."""
    try:
        mode = PRESETS[name]
    except KeyError:
        raise ModeError(
            f"unknown mode {name!r}; available: {', '.join(sorted(PRESETS))}"
        ) from None
    if builtin_quality is not None and mode.visual == "builtin":
        mode = replace(mode, builtin_quality=builtin_quality)
    return mode
