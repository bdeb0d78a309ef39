"""Ambient-backscatter link simulator and energy-detector decoder.

A tag modulates an ambient RF source (TV, 4G, or 5G downlink) by toggling
its antenna load between two reflection states with an FM0-coded switch
waveform; a receiver recovers the pixel-image message from power-envelope
changes alone, with no carrier or clock reference from the tag.
"""

from .ambient import SourceProfile, generate
from .capture import (
    CaptureError,
    TruncatedCaptureError,
    quantize_cu8,
    read_capture,
    read_sidecar,
    sidecar_path,
    write_capture,
    write_sidecar,
)
from .channel import ChannelParams, SwitchWaveform, apply, state_power_gap
from .config import (
    LinkConfig,
    TagSchedule,
    config_to_dict,
    fiveg_config_dict,
    load_config,
    parse_config,
)
from .detector import (
    DecodeReport,
    DetectorConfig,
    FrameDecode,
    decode,
    fiveg_config,
    tv_config,
    validate,
)
from .frame_codec import (
    DEFAULT_SYNC,
    FRAME_BITS,
    LEVELS_PER_FRAME,
    PAYLOAD_BITS,
    SYNC_BITS,
    FrameBits,
    Fm0Levels,
    PixelImage,
    SwitchState,
    bits_to_image,
    build_frame,
    fm0_decode,
    fm0_encode,
    fm0_encode_repeated,
    frame_for_image,
    image_to_bits,
    image_to_text,
    parse_frame,
    parse_image_text,
    sync_copy_lags,
)
from .harness import (
    LinkSpec,
    SweepResult,
    SweepSpec,
    TrialOutcome,
    bench_throughput,
    link_at,
    run_sweep,
    run_trial,
)
from .iq import IqBuffer

__all__ = [
    "DEFAULT_SYNC",
    "FRAME_BITS",
    "LEVELS_PER_FRAME",
    "PAYLOAD_BITS",
    "SYNC_BITS",
    "CaptureError",
    "ChannelParams",
    "DecodeReport",
    "DetectorConfig",
    "FrameBits",
    "FrameDecode",
    "Fm0Levels",
    "IqBuffer",
    "LinkConfig",
    "LinkSpec",
    "PixelImage",
    "SourceProfile",
    "SweepResult",
    "SweepSpec",
    "SwitchState",
    "SwitchWaveform",
    "TagSchedule",
    "TrialOutcome",
    "TruncatedCaptureError",
    "apply",
    "bench_throughput",
    "bits_to_image",
    "build_frame",
    "config_to_dict",
    "decode",
    "fiveg_config",
    "fiveg_config_dict",
    "fm0_decode",
    "fm0_encode",
    "fm0_encode_repeated",
    "frame_for_image",
    "generate",
    "image_to_bits",
    "image_to_text",
    "link_at",
    "load_config",
    "parse_config",
    "parse_frame",
    "parse_image_text",
    "quantize_cu8",
    "read_capture",
    "read_sidecar",
    "run_sweep",
    "run_trial",
    "sidecar_path",
    "state_power_gap",
    "sync_copy_lags",
    "tv_config",
    "validate",
    "write_capture",
    "write_sidecar",
]

__version__ = "0.1.0"
