"""Bit-exact IQ capture file I/O (cf32le, cu8) plus JSON sidecar metadata.

cf32le is interleaved little-endian float32 I/Q, the native layout of
complex64, so write followed by read is the identity. cu8 is interleaved
unsigned bytes with the zero level at 127.5 (offset binary, the layout DVB-T
dongles emit): byte v decodes to (v - 127.5) / 127.5, and encoding quantizes
with round-half-up then clamps to [0, 255].
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Literal

import numpy as np

from .iq import IqBuffer

CaptureFormat = Literal["cf32le", "cu8"]
CAPTURE_FORMATS = ("cf32le", "cu8")

_STRIDE_BYTES = {"cf32le": 8, "cu8": 2}

_CU8_SCALE = np.float32(127.5)


class CaptureError(Exception):
    pass


class TruncatedCaptureError(CaptureError):
    """File length is not a whole number of samples.

    byte_offset marks the end of the last complete sample, which is where
    the readable prefix stops.
    """

    def __init__(self, path, length: int, stride: int):
        self.path = str(path)
        self.byte_offset = (length // stride) * stride
        self.trailing_bytes = length - self.byte_offset
        super().__init__(
            f"{self.path}: truncated capture, {length} bytes is not a multiple of "
            f"{stride}; {self.trailing_bytes} stray byte(s) after offset {self.byte_offset}"
        )


def _check_format(fmt: str) -> str:
    if fmt not in _STRIDE_BYTES:
        raise CaptureError(f"unknown capture format {fmt!r}; expected one of {CAPTURE_FORMATS}")
    return fmt


def read_capture(
    path,
    fmt: CaptureFormat,
    sample_rate_hz: float,
    center_freq_hz: float = 0.0,
) -> IqBuffer:
    _check_format(fmt)
    data = Path(path).read_bytes()
    stride = _STRIDE_BYTES[fmt]
    if len(data) % stride != 0:
        raise TruncatedCaptureError(path, len(data), stride)
    if fmt == "cf32le":
        samples = np.frombuffer(data, dtype="<c8")
    else:
        raw = np.frombuffer(data, dtype=np.uint8).astype(np.float32)
        raw = (raw - _CU8_SCALE) / _CU8_SCALE
        samples = (raw[0::2] + 1j * raw[1::2]).astype(np.complex64)
    return IqBuffer(samples, sample_rate_hz, center_freq_hz)


def quantize_cu8(values: np.ndarray) -> tuple[np.ndarray, int]:
    """Map [-1, 1] floats to bytes; returns (bytes, clipped component count).

    round-half-up via floor(x + 0.5), so 0.0 -> 127.5 -> byte 128. Inputs
    outside [-1, 1] clamp to 0/255 and are tallied, not rejected.
    """
    vals = np.asarray(values, dtype=np.float64)
    clipped = int(np.count_nonzero(np.abs(vals) > 1.0))
    q = np.floor(vals * 127.5 + 127.5 + 0.5)
    return np.clip(q, 0, 255).astype(np.uint8), clipped


def write_capture(buf: IqBuffer, path, fmt: CaptureFormat) -> int:
    """Write samples to disk; returns the cu8 clip count (always 0 for cf32le)."""
    _check_format(fmt)
    if fmt == "cf32le":
        payload = buf.samples.astype("<c8").tobytes()
        clipped = 0
    else:
        flat = np.empty(2 * buf.samples.size, dtype=np.float32)
        flat[0::2] = buf.samples.real
        flat[1::2] = buf.samples.imag
        q, clipped = quantize_cu8(flat)
        payload = q.tobytes()
    Path(path).write_bytes(payload)
    return clipped


def sidecar_path(capture_path) -> Path:
    return Path(str(capture_path) + ".json")


def write_sidecar(capture_path, meta: dict) -> Path:
    """Store capture metadata next to the file as <capture>.json."""
    out = sidecar_path(capture_path)
    out.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return out


def read_sidecar(capture_path) -> dict:
    return json.loads(sidecar_path(capture_path).read_text())
