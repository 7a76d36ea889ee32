"""Run configuration and the flat key-value config file format.

Grammar (one statement per line):

    # comment                blank lines and `#` lines are ignored
    key = "value"            double-quoted string, \\" and \\\\ escapes
    key = value              bare token: integer, float, true/false
    [section]                backend role sections: caption, generation,
                             embedding, codec

Top-level keys: dataset_dir, output_dir, modes (comma-separated preset
names), repeats, builtin_quality, seed_base, mock_backends, workers.
Backend-section keys: base_url, api_key, timeout, max_retries,
parallelism_limit, adapter (caption only).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from ..backends import (
    BackendEndpoint,
    BackendSet,
    CaptionClient,
    EmbeddingClient,
    ExternalCodecClient,
    GenerationClient,
    make_mock_backends,
)
from .modes import DEFAULT_MATRIX

BACKEND_ROLES = ("caption", "generation", "embedding", "codec")

_SECTION_RE = re.compile(r"^\[([a-z_]+)\]$")
_ASSIGN_RE = re.compile(r'^([A-Za-z_][A-Za-z_0-9]*)\s*=\s*(.+)$')
_QUOTED_RE = re.compile(r'^"((?:[^"\\]|\\.)*)"$')


class ConfigError(Exception):
    pass


def _parse_value(raw: str, path, lineno: int) -> str:
    raw = raw.strip()
    m = _QUOTED_RE.match(raw)
    if m:
        return m.group(1).replace('\\"', '"').replace("\\\\", "\\")
    if re.fullmatch(r"[^\s\"#]+", raw):
        return raw
    raise ConfigError(f"{path}:{lineno}: malformed value {raw!r}")


def parse_config_text(text: str, path="<config>") -> dict[str, dict[str, str]]:
    """Parse config text into {section: {key: value}}; top level is ''."""
    sections: dict[str, dict[str, str]] = {"": {}}
    current = ""
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        m = _SECTION_RE.match(stripped)
        if m:
            current = m.group(1)
            if current not in BACKEND_ROLES:
                raise ConfigError(f"{path}:{lineno}: unknown section [{current}]")
            sections.setdefault(current, {})
            continue
        m = _ASSIGN_RE.match(stripped)
        if not m:
            raise ConfigError(f"{path}:{lineno}: expected `key = value`, got {stripped!r}")
        sections[current][m.group(1)] = _parse_value(m.group(2), path, lineno)
    return sections


def _as_bool(value: str, key: str) -> bool:
    if value.lower() in ("true", "1", "yes"):
        return True
    if value.lower() in ("false", "0", "no"):
        return False
    raise ConfigError(f"{key}: expected true/false, got {value!r}")


@dataclass
class BackendRoleConfig:
    base_url: str = ""
    api_key: str = ""
    timeout: float = 120.0
    max_retries: int = 2
    parallelism_limit: int = 4
    adapter: str = "native"

    def endpoint(self) -> BackendEndpoint:
        return BackendEndpoint(
            base_url=self.base_url,
            api_key=self.api_key or None,
            timeout=self.timeout,
            max_retries=self.max_retries,
            parallelism_limit=self.parallelism_limit,
        )


@dataclass
class RunConfig:
    dataset_dir: Path
    output_dir: Path
    modes: tuple[str, ...] = DEFAULT_MATRIX
    repeats: int = 3
    builtin_quality: int = 35
    seed_base: int = 1
    mock_backends: bool = False
    workers: int = 0  # 0 -> caption backend's parallelism_limit
    backend_roles: dict[str, BackendRoleConfig] = field(default_factory=dict)

    def __post_init__(self):
        if self.repeats < 1:
            raise ConfigError(f"repeats must be >= 1, got {self.repeats}")

    def validate_dirs(self) -> None:
        if not Path(self.dataset_dir).is_dir():
            raise ConfigError(f"dataset_dir does not exist: {self.dataset_dir}")


def _role_config(values: dict[str, str], role: str) -> BackendRoleConfig:
    cfg = BackendRoleConfig()
    for key, raw in values.items():
        if key == "base_url":
            cfg.base_url = raw
        elif key == "api_key":
            cfg.api_key = raw
        elif key == "timeout":
            cfg.timeout = float(raw)
        elif key == "max_retries":
            cfg.max_retries = int(raw)
        elif key == "parallelism_limit":
            cfg.parallelism_limit = int(raw)
        elif key == "adapter":
            cfg.adapter = raw
        else:
            raise ConfigError(f"[{role}] unknown key {key!r}")
    return cfg


def load_run_config(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text("utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    sections = parse_config_text(text, path)
    top = sections.get("", {})

    known = {
        "dataset_dir",
        "output_dir",
        "modes",
        "repeats",
        "builtin_quality",
        "seed_base",
        "mock_backends",
        "workers",
    }
    for key in top:
        if key not in known:
            raise ConfigError(f"unknown top-level key {key!r}")
    for required in ("dataset_dir", "output_dir"):
        if required not in top:
            raise ConfigError(f"config missing required key {required!r}")

    modes = DEFAULT_MATRIX
    if "modes" in top:
        modes = tuple(m.strip() for m in top["modes"].split(",") if m.strip())
        if not modes:
            raise ConfigError("modes list is empty")

    roles = {
        role: _role_config(sections[role], role)
        for role in BACKEND_ROLES
        if role in sections
    }
    return RunConfig(
        dataset_dir=Path(top["dataset_dir"]),
        output_dir=Path(top["output_dir"]),
        modes=modes,
        repeats=int(top.get("repeats", "3")),
        builtin_quality=int(top.get("builtin_quality", "35")),
        seed_base=int(top.get("seed_base", "1")),
        mock_backends=_as_bool(top.get("mock_backends", "false"), "mock_backends"),
        workers=int(top.get("workers", "0")),
        backend_roles=roles,
    )


def build_backends(config: RunConfig) -> BackendSet:
    """Instantiate mocks or HTTP clients per the config."""
    if config.mock_backends:
        return make_mock_backends()
    roles = config.backend_roles
    if "caption" not in roles or "generation" not in roles:
        raise ConfigError(
            "non-mock runs need [caption] and [generation] backend sections "
            "(or pass --mock-backends)"
        )
    caption_cfg = roles["caption"]
    backends = BackendSet(
        caption=CaptionClient(caption_cfg.endpoint(), adapter=caption_cfg.adapter),
        generation=GenerationClient(roles["generation"].endpoint()),
    )
    if "embedding" in roles:
        backends.embedding = EmbeddingClient(roles["embedding"].endpoint())
    if "codec" in roles:
        backends.codec = ExternalCodecClient(roles["codec"].endpoint())
    return backends
