"""Visual condition pipeline: raster carrier, resampling, and low-bitrate coding."""

from .blockcodec import (
    CodecSettings,
    InvalidSettingsError,
    MalformedStreamError,
    SymbolCountError,
    VisualCodecError,
    decode_builtin,
    encode_builtin,
)
from .raster import RasterImage, RasterError, from_png_bytes, load_png, save_png, to_png_bytes
from .registry import CodecRegistry, UnknownCodecError, default_registry
from .resample import downsample8, upsample_to

__all__ = [
    "CodecRegistry",
    "CodecSettings",
    "InvalidSettingsError",
    "MalformedStreamError",
    "RasterError",
    "RasterImage",
    "SymbolCountError",
    "UnknownCodecError",
    "VisualCodecError",
    "decode_builtin",
    "default_registry",
    "downsample8",
    "encode_builtin",
    "from_png_bytes",
    "load_png",
    "save_png",
    "to_png_bytes",
    "upsample_to",
]
