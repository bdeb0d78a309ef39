"""Ambient illumination synthesis: continuous TV/4G and bursty 5G-TDD.

Downlink OFDM baseband is asymptotically Gaussian, and the decoder is
non-coherent (it only sees power), so the sources are modeled as band-limited
complex circular Gaussian processes. The 5G variant gates that process with a
periodic on/off mask: one downlink burst at the start of each TDD period,
with optional per-period duration jitter standing in for traffic burstiness.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft

from .iq import IqBuffer

SOURCE_KINDS = ("TV", "FourG", "FiveG_TDD")

# fraction of Nyquist occupied by the source; exact RF bandwidth is
# irrelevant after the power detector, this just avoids an alias-flat spectrum
BAND_FRACTION = 0.8


@dataclass(frozen=True)
class SourceProfile:
    """Statistical stand-in for a live ambient transmitter.

    mean_power is the average power of the underlying process before any
    TDD gating, i.e. the on-burst power for FiveG_TDD. tdd_period,
    duty_cycle, and burst_jitter only apply to kind="FiveG_TDD".
    """

    kind: str = "TV"
    mean_power: float = 1.0
    tdd_period: float = 1e-3
    duty_cycle: float = 0.7
    burst_jitter: float = 0.0
    rng_seed: int = 0

    def __post_init__(self):
        if self.kind not in SOURCE_KINDS:
            raise ValueError(f"kind must be one of {SOURCE_KINDS}, got {self.kind!r}")
        if not self.mean_power > 0:
            raise ValueError(f"mean_power must be positive, got {self.mean_power}")
        if not self.tdd_period > 0:
            raise ValueError(f"tdd_period must be positive, got {self.tdd_period}")
        if not 0 < self.duty_cycle <= 1:
            raise ValueError(f"duty_cycle must be in (0, 1], got {self.duty_cycle}")
        if not 0 <= self.burst_jitter < 1:
            raise ValueError(f"burst_jitter must be in [0, 1), got {self.burst_jitter}")

    @property
    def bursty(self) -> bool:
        return self.kind == "FiveG_TDD"


def tdd_burst_mask(
    n: int,
    sample_rate_hz: float,
    tdd_period: float,
    duty_cycle: float,
    burst_jitter: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Periodic on/off gate; period k is on for its first round(duty*P*fs)
    samples (jittered per period), off samples are exactly zero."""
    period_samples = tdd_period * sample_rate_hz
    n_periods = int(np.ceil(n / period_samples))
    starts = np.round(np.arange(n_periods + 1) * period_samples).astype(np.int64)
    u = rng.uniform(-1.0, 1.0, n_periods)
    on = np.round(duty_cycle * (1.0 + burst_jitter * u) * period_samples).astype(np.int64)
    mask = np.zeros(n, dtype=np.float32)
    for k in range(n_periods):
        stop = min(starts[k] + on[k], starts[k + 1], n)
        mask[starts[k] : stop] = 1.0
    return mask


def generate(profile: SourceProfile, duration: float, sample_rate_hz: float) -> IqBuffer:
    """Synthesize `duration` seconds of ambient signal at sample_rate_hz.

    Deterministic given profile.rng_seed. The Gaussian process is shaped by
    zeroing spectral bins above BAND_FRACTION of Nyquist, then scaled so its
    sample mean power equals mean_power exactly (before gating).
    """
    if not duration > 0:
        raise ValueError(f"duration must be positive, got {duration}")
    if not sample_rate_hz > 0:
        raise ValueError(f"sample_rate_hz must be positive, got {sample_rate_hz}")
    n = int(round(duration * sample_rate_hz))
    if n < 1:
        raise ValueError("duration shorter than one sample")
    if profile.bursty and sample_rate_hz * profile.tdd_period < 10:
        raise ValueError(
            "sample_rate_hz * tdd_period must be >= 10 to resolve the burst structure"
        )

    rng = np.random.default_rng(profile.rng_seed)
    spec = rng.standard_normal(2 * n, dtype=np.float32).view(np.complex64)
    # zero every bin with |freq| > BAND_FRACTION/2; bins k and n-k share the
    # frequency magnitude k/n, so the stopband is one contiguous slice
    lo = int(BAND_FRACTION / 2 * n) + 1
    while lo > 0 and (lo - 1) / n > BAND_FRACTION / 2:
        lo -= 1
    while lo <= n - lo and lo / n <= BAND_FRACTION / 2:
        lo += 1
    spec[lo : n - lo + 1] = 0
    x = scipy.fft.ifft(spec)

    v = x.view(np.float32)
    p = float(np.dot(v, v)) / n
    x *= np.float32(np.sqrt(profile.mean_power / p))

    if profile.bursty:
        x *= tdd_burst_mask(
            n, sample_rate_hz, profile.tdd_period, profile.duty_cycle, profile.burst_jitter, rng
        )
    return IqBuffer(x, sample_rate_hz)
