"""Two-state backscatter channel.

The reader sees the ambient source through a direct path plus a tag-modulated
cascade whose reflection coefficient depends on the RF switch state:

    y[n] = (h_direct + g_cascade * refl(state(n)) * e^{j 2 pi doppler n / fs}) * x[n] + w[n]

Flat narrowband model, zero excess delay: at meter-scale ranges the path
delay is far below one sample, and the energy detector cannot see sub-sample
delay anyway. The tag rests in the connected state outside its transmission
window.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .frame_codec import Fm0Levels
from .iq import IqBuffer


@dataclass(frozen=True)
class ChannelParams:
    h_direct: complex = 1.0
    g_cascade: complex = 0.2
    refl_connected: complex = 0.0
    refl_disconnected: complex = 0.5
    noise_power: float = 0.0
    doppler_hz: float = 0.0

    def __post_init__(self):
        if self.noise_power < 0:
            raise ValueError(f"noise_power must be >= 0, got {self.noise_power}")
        if abs(self.refl_connected) > 1 + 1e-12 or abs(self.refl_disconnected) > 1 + 1e-12:
            raise ValueError("reflection coefficient magnitudes must be <= 1")


@dataclass(frozen=True)
class SwitchWaveform:
    """Tag switch schedule: FM0 levels held symbol_period seconds each."""

    levels: Fm0Levels
    symbol_period: float
    start_offset: float = 0.0

    def __post_init__(self):
        if not self.symbol_period > 0:
            raise ValueError(f"symbol_period must be positive, got {self.symbol_period}")
        if self.start_offset < 0:
            raise ValueError(f"start_offset must be >= 0, got {self.start_offset}")

    @property
    def duration_s(self) -> float:
        return len(self.levels) * self.symbol_period


def switch_level_per_sample(tag: SwitchWaveform, n_samples: int, sample_rate_hz: float) -> np.ndarray:
    """Expand the schedule to one level per sample; resting level is 0
    (connected) before start_offset and after the last symbol."""
    n_levels = len(tag.levels)
    edges = np.round(
        (tag.start_offset + np.arange(n_levels + 1) * tag.symbol_period) * sample_rate_hz
    ).astype(np.int64)
    if edges[-1] > n_samples:
        raise ValueError(
            f"tag waveform ends at sample {edges[-1]} but the buffer has {n_samples}"
        )
    out = np.zeros(n_samples, dtype=np.int8)
    out[edges[0] : edges[-1]] = np.repeat(tag.levels.levels, np.diff(edges))
    return out


def contrast(ch: ChannelParams) -> float:
    """Power ratio of the two switch states at the reader.

    |h + g*refl_dis|^2 / |h + g*refl_con|^2; a zero denominator reports
    math.inf (pure-backscatter limit) rather than raising, callers flag it.
    """
    num = abs(ch.h_direct + ch.g_cascade * ch.refl_disconnected) ** 2
    den = abs(ch.h_direct + ch.g_cascade * ch.refl_connected) ** 2
    if den == 0:
        return float("inf")
    return num / den


def state_power_gap(ch: ChannelParams, source_power: float = 1.0) -> float:
    """Absolute two-state received power difference for a unit-power source."""
    p_dis = abs(ch.h_direct + ch.g_cascade * ch.refl_disconnected) ** 2
    p_con = abs(ch.h_direct + ch.g_cascade * ch.refl_connected) ** 2
    return abs(p_dis - p_con) * source_power


def apply(source: IqBuffer, tag: SwitchWaveform | None, ch: ChannelParams, rng_seed: int = 0) -> IqBuffer:
    """Run the source through the channel; pure function of its arguments.

    tag=None means an always-resting (connected) tag. Noise is complex white
    Gaussian drawn from rng_seed; zero noise_power skips the draw, keeping
    the no-noise path exactly deterministic and linear in the source.
    """
    x = source.samples
    n = x.size
    gain_con = np.complex64(complex(ch.h_direct) + complex(ch.g_cascade) * complex(ch.refl_connected))
    gain_dis = np.complex64(complex(ch.h_direct) + complex(ch.g_cascade) * complex(ch.refl_disconnected))

    if ch.doppler_hz != 0.0:
        # moving tag: the backscatter branch picks up a phase ramp while the
        # direct path stays put, so the per-state gains become time-varying;
        # a resting (tag=None) reflector still rides the ramp
        if tag is not None:
            levels = switch_level_per_sample(tag, n, source.sample_rate_hz)
        else:
            levels = np.zeros(n, dtype=np.int8)
        refl = np.where(
            levels == 0,
            np.complex64(complex(ch.refl_connected)),
            np.complex64(complex(ch.refl_disconnected)),
        )
        phase = np.exp(
            (2j * np.pi * ch.doppler_hz / source.sample_rate_hz) * np.arange(n)
        ).astype(np.complex64)
        y = (np.complex64(complex(ch.h_direct)) + np.complex64(complex(ch.g_cascade)) * refl * phase) * x
    elif tag is not None:
        levels = switch_level_per_sample(tag, n, source.sample_rate_hz)
        y = x * gain_con
        m = levels.view(bool)
        y[m] = x[m] * gain_dis
    else:
        y = x * gain_con

    if ch.noise_power > 0:
        rng = np.random.default_rng(rng_seed)
        sigma = np.float32(np.sqrt(ch.noise_power / 2))
        y += sigma * rng.standard_normal(2 * n, dtype=np.float32).view(np.complex64)
    return IqBuffer(y, source.sample_rate_hz, source.center_freq_hz, source.capture_time)
