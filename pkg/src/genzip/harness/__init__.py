"""Orchestration: dataset prep, encode/decode flows, experiment matrix, CLI glue."""

from .config import BackendRoleConfig, ConfigError, RunConfig, build_backends, load_run_config
from .dataset import DatasetError, load_manifest, load_prepared, prepare_dataset, prepare_image
from .matrix import MatrixResult, load_results, run_matrix, write_summaries
from .modes import DEFAULT_MATRIX, PRESETS, Mode, ModeError, resolve_mode
from .pipeline import EncodeResult, decode_container, encode_image, make_registry

__all__ = [
    "BackendRoleConfig",
    "ConfigError",
    "DEFAULT_MATRIX",
    "DatasetError",
    "EncodeResult",
    "MatrixResult",
    "Mode",
    "ModeError",
    "PRESETS",
    "RunConfig",
    "build_backends",
    "decode_container",
    "encode_image",
    "load_manifest",
    "load_prepared",
    "load_results",
    "make_registry",
    "prepare_dataset",
    "prepare_image",
    "resolve_mode",
    "run_matrix",
    "write_summaries",
]
