"""Raw IQ sample buffer shared by the simulator, decoder, and file I/O."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class IqBuffer:
    """Complex baseband samples at a fixed rate.

    Samples are held as complex64: SDR captures are at most 32-bit per
    component, so this keeps file round-trips bit-exact and halves memory.
    center_freq_hz and capture_time are carry-along metadata only.
    """

    samples: np.ndarray = field(repr=False)
    sample_rate_hz: float
    center_freq_hz: float = 0.0
    capture_time: str | None = None

    def __post_init__(self):
        arr = np.asarray(self.samples)
        if arr.ndim != 1:
            raise ValueError("samples must be one-dimensional")
        if arr.dtype != np.complex64:
            arr = arr.astype(np.complex64)
        self.samples = arr
        if not self.sample_rate_hz > 0:
            raise ValueError(f"sample_rate_hz must be positive, got {self.sample_rate_hz}")

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration_s(self) -> float:
        return self.samples.size / self.sample_rate_hz
