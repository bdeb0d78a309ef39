"""Non-coherent energy-detector receive chain.

Stage order: |x|^2 power detection at the input rate F1, fourth-order
low-pass at f3 (anti-alias + noise reduction), decimation to the processing
rate F2 = 1/t2, first-order high-pass at f4 (strips the slowly varying
ambient power baseline), adaptive binarization against a moving-average
threshold over ta, symbol re-sampling at the tag period ts over a grid of
sub-symbol timing offsets, FM0 demodulation, and sync-word search.

The receiver knows nothing about the ambient source but its power; all
timing is recovered from the binarized stream itself. Both recursive filters
are initialized to their steady state for the first input value, so a decode
has no warm-up transient at the buffer head.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from typing import Iterator

import numpy as np
from scipy.signal import butter, sosfilt, sosfilt_zi

from .frame_codec import (
    DEFAULT_SYNC,
    SYNC_BITS,
    PixelImage,
    bits_to_image,
    fm0_boundary_violations,
    fm0_decode,
)
from .iq import IqBuffer

# A sync-word hit alone false-alarms on noise: an 8-bit pattern shows up by
# chance about once per 256 windows, and a capture holds thousands. Noise
# cannot fake FM0 cleanliness though: it misses roughly half the mandatory
# boundary transitions, so a detection additionally requires the frame's
# violation fraction to stay at or below this gate.
SYNC_SCORE_MIN = 7 / 8
VIOLATION_FRACTION_MAX = 0.2

FRONTEND_CHUNK = 1 << 20


@dataclass(frozen=True)
class DetectorConfig:
    """Receive-chain timing and filter parameters.

    t1: input sample period (F1 = 1/t1); t2: post-decimation period
    (F2 = 1/t2); f3/f4: low/high-pass cutoffs; ta: threshold window;
    ts: tag symbol (switch) period, so the bit rate is Fb = 1/(2 ts).
    """

    t1: float = 1e-6
    t2: float = 0.5e-3
    f3: float = 500.0
    f4: float = 50.0
    ta: float = 50e-3
    ts: float = 2.7e-3
    sync: tuple = DEFAULT_SYNC
    frame_bits: int = 96
    rows: int = 8
    cols: int = 11

    def __post_init__(self):
        for name in ("t1", "t2", "f3", "f4", "ta", "ts"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        sync = tuple(int(b) for b in self.sync)
        if len(sync) != SYNC_BITS or any(b not in (0, 1) for b in sync):
            raise ValueError(f"sync must be {SYNC_BITS} bits of 0/1")
        object.__setattr__(self, "sync", sync)
        if self.rows * self.cols + len(sync) != self.frame_bits:
            raise ValueError(
                f"rows*cols + sync bits must equal frame_bits "
                f"({self.rows}*{self.cols} + {len(sync)} != {self.frame_bits})"
            )

    @property
    def f1(self) -> float:
        return 1.0 / self.t1

    @property
    def f2(self) -> float:
        return 1.0 / self.t2

    @property
    def symbol_rate(self) -> float:
        """Fs, the switch rate."""
        return 1.0 / self.ts

    @property
    def bit_rate(self) -> float:
        """Fb = 1/(2 ts); one bit spans two switch levels."""
        return 1.0 / (2.0 * self.ts)

    @property
    def payload_bits(self) -> int:
        return self.rows * self.cols


def tv_config(**overrides) -> DetectorConfig:
    """Continuous-source settings: ts 2.7 ms, f3 500 Hz, f4 50 Hz."""
    return replace(DetectorConfig(), **overrides) if overrides else DetectorConfig()


def fiveg_config(**overrides) -> DetectorConfig:
    """Bursty-TDD settings: ts 10.8 ms (> the 1 ms TDD period), f3 100 Hz,
    f4 1 Hz; sampling, decimation, and threshold window as for TV."""
    cfg = DetectorConfig(ts=10.8e-3, f3=100.0, f4=1.0)
    return replace(cfg, **overrides) if overrides else cfg


def validate(cfg: DetectorConfig, profile=None) -> list[str]:
    """Check the parameter constraints; returns violations as data.

    Constraints: f3 > Fs, f4 < Fb, F1 > Fs, F2 > Fs, ta >= 4 ts, and for a
    bursty TDD profile ts > tdd_period (otherwise the detector cannot tell
    the tag's switching from the source's burst cycle).
    """
    fs = cfg.symbol_rate
    violations = []
    if not cfg.f3 > fs:
        violations.append(f"f3 > Fs violated: f3={cfg.f3:g} Hz, Fs={fs:g} Hz")
    if not cfg.f4 < cfg.bit_rate:
        violations.append(f"f4 < Fb violated: f4={cfg.f4:g} Hz, Fb={cfg.bit_rate:g} Hz")
    if not cfg.f1 > fs:
        violations.append(f"F1 > Fs violated: F1={cfg.f1:g} Hz, Fs={fs:g} Hz")
    if not cfg.f2 > fs:
        violations.append(f"F2 > Fs violated: F2={cfg.f2:g} Hz, Fs={fs:g} Hz")
    if not cfg.ta >= 4 * cfg.ts:
        violations.append(f"ta >= 4*ts violated: ta={cfg.ta:g} s, ts={cfg.ts:g} s")
    if profile is not None and getattr(profile, "bursty", False):
        if not cfg.ts > profile.tdd_period:
            violations.append(
                f"ts > tdd_period violated: ts={cfg.ts:g} s, "
                f"tdd_period={profile.tdd_period:g} s"
            )
    return violations


# --- pipeline stages ---


def power_detect(iq: IqBuffer) -> np.ndarray:
    """Per-sample power |x|^2, float32, length preserved."""
    x = iq.samples
    if x.size == 0:
        raise ValueError("cannot power-detect an empty buffer")
    return x.real**2 + x.imag**2


def _round_index(x) -> np.ndarray:
    # deterministic round-half-up; np.round's half-to-even would make the
    # decimation grid depend on parity
    return np.floor(np.asarray(x) + 0.5).astype(np.int64)


def _count_indices_below(ratio: float, hi: int) -> int:
    """Number of k >= 0 with round-half-up(k * ratio) < hi."""
    k = max(int((hi - 0.5) / ratio) + 1, 0)
    while k > 0 and int(np.floor((k - 1) * ratio + 0.5)) >= hi:
        k -= 1
    while int(np.floor(k * ratio + 0.5)) < hi:
        k += 1
    return k


def _lowpass_sos(f3: float, fs: float) -> np.ndarray:
    return butter(4, f3, btype="low", fs=fs, output="sos")


def _highpass_sos(f4: float, fs: float) -> np.ndarray:
    return butter(1, f4, btype="high", fs=fs, output="sos")


def _lpf_decimate_chunks(
    chunks: Iterator[tuple[int, np.ndarray]],
    f1: float,
    f3: float,
    t2: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Filter consecutive power chunks and pick every t2-spaced sample.

    chunks yields (start_index, float64 power values). Returns the filtered
    stream at F2 plus the raw (unfiltered) power at the same taps. Constant
    filter state across chunk joins, so the result is chunk-size invariant.
    """
    if not f3 < f1 / 2:
        raise ValueError(f"f3 must be below Nyquist: f3={f3:g} Hz, F1={f1:g} Hz")
    ratio = t2 * f1
    if ratio < 1:
        raise ValueError(f"t2 must not be shorter than the input period 1/F1")
    sos = _lowpass_sos(f3, f1)
    zi = None
    taps, raw_taps = [], []
    next_k = 0
    for start, p in chunks:
        if p.size == 0:
            continue
        if zi is None:
            zi = sosfilt_zi(sos) * p[0]
        y, zi = sosfilt(sos, p, zi=zi)
        hi = start + p.size
        k_hi = _count_indices_below(ratio, hi)
        if k_hi > next_k:
            idx = _round_index(np.arange(next_k, k_hi) * ratio) - start
            taps.append(y[idx])
            raw_taps.append(p[idx])
            next_k = k_hi
    if not taps:
        return np.empty(0), np.empty(0)
    return np.concatenate(taps), np.concatenate(raw_taps)


def lpf_downsample(power, f3: float, t1: float, t2: float, chunk: int = FRONTEND_CHUNK) -> np.ndarray:
    """Fourth-order low-pass at f3 (unity DC gain, steady-state start), then
    nearest-sample selection every t2 seconds."""
    p = np.asarray(power, dtype=np.float64)

    def gen():
        for a in range(0, p.size, chunk):
            yield a, p[a : a + chunk]

    out, _ = _lpf_decimate_chunks(gen(), 1.0 / t1, f3, t2)
    return out


def hpf(stream, f4: float, t2: float) -> np.ndarray:
    """First-order high-pass at f4; removes the ambient power baseline."""
    x = np.asarray(stream, dtype=np.float64)
    fs = 1.0 / t2
    if not f4 < fs / 2:
        raise ValueError(f"f4 must be below Nyquist: f4={f4:g} Hz, F2={fs:g} Hz")
    if x.size == 0:
        return x
    sos = _highpass_sos(f4, fs)
    zi = sosfilt_zi(sos) * x[0]
    y, _ = sosfilt(sos, x, zi=zi)
    return y


def threshold_binarize(stream, ta: float, t2: float, centered: bool = True) -> np.ndarray:
    """1 where the sample strictly exceeds the moving average over ta.

    Centered window for offline decode (no Ta/2 group-delay bias); near the
    edges the window shrinks symmetrically. centered=False switches to a
    trailing window for streaming use.
    """
    x = np.asarray(stream, dtype=np.float64)
    n = x.size
    w = int(np.floor(ta / t2 + 0.5))
    if w < 4:
        raise ValueError(f"ta must span at least 4 samples at F2, got {w}")
    if n == 0:
        return np.empty(0, dtype=np.int8)
    csum = np.concatenate([[0.0], np.cumsum(x)])
    idx = np.arange(n)
    if centered:
        k = np.minimum(w // 2, np.minimum(idx, n - 1 - idx))
        avg = (csum[idx + k + 1] - csum[idx - k]) / (2 * k + 1)
    else:
        k = np.minimum(w - 1, idx)
        avg = (csum[idx + 1] - csum[idx - k]) / (k + 1)
    return (x > avg).astype(np.int8)


def recover_symbols(binary, ts: float, t2: float, min_levels: int = 192) -> list[np.ndarray]:
    """Sample the binary stream at the symbol period for every timing offset.

    The offset grid has step t2 and spans [0, 2 ts): FM0 frame alignment has
    a half-bit ambiguity, so two symbol periods of offsets are needed. Each
    symbol index is rounded independently (round(o + k*ts/t2)), which keeps
    fractional ts/t2 ratios drift-free over arbitrarily long frames. Returns
    [] when no candidate reaches min_levels (buffer shorter than one frame).
    """
    b = np.asarray(binary, dtype=np.int8)
    n = b.size
    stride = ts / t2
    if stride <= 1:
        raise ValueError(f"ts must exceed t2: ts={ts:g} s, t2={t2:g} s")
    n_offsets = int(np.ceil(2.0 * stride - 1e-9))
    candidates = []
    for o in range(n_offsets):
        count = _count_indices_below(stride, n - o) if n > o else 0
        if count <= 0:
            candidates.append(np.empty(0, dtype=np.int8))
            continue
        idx = o + _round_index(np.arange(count) * stride)
        candidates.append(b[idx])
    if not candidates or max(c.size for c in candidates) < min_levels:
        return []
    return candidates


@dataclass(frozen=True)
class FrameDecode:
    """One accepted frame: the image carried by the 88 bits after a sync."""

    image: PixelImage
    score: float  # sync correlation, fraction of matching bits in [0, 1]
    offset_s: float  # buffer time of the detected sync's first bit
    violation_fraction: float  # FM0 boundary violations across the frame


@dataclass
class DecodeReport:
    images: list[FrameDecode] = field(default_factory=list)
    symbol_stream: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int8))
    fm0_violations: int = 0
    sync_found: bool = False
    best_score: float = 0.0
    best_offset_s: float = 0.0
    note: str = ""
    stage_traces: dict | None = None


def sync_search(candidates: list[np.ndarray], cfg: DetectorConfig) -> DecodeReport:
    """Pick the (timing offset, bit lag) with the best gated sync match and
    emit every complete frame on that alignment.

    For each candidate level sequence: FM0-demodulate, score the sync word
    at every bit lag that leaves room for a full frame, and gate each lag
    on the frame's FM0 violation fraction (sync score alone false-alarms;
    noise cannot fake FM0 cleanliness). Windows passing both checks are
    grouped into frame-grid hypotheses by (timing offset, lag mod
    frame_bits), and the winning grid maximizes the mean of
    (score - violation fraction) over its windows, ties going to the grid
    whose last window sits latest in the stream. The mean demotes grids
    whose windows straddle the transmission's edges, and the latest-window
    rule resolves the rotation ambiguity of payloads that contain a copy of
    the sync word: an in-payload copy always precedes the frame's real
    sync, so when the capture holds the tail of the transmission the
    real grid reaches further. Frames of the winning grid are then emitted
    individually wherever they pass both checks.
    """
    sync = np.asarray(cfg.sync, dtype=np.int8)
    fb = cfg.frame_bits
    stride = cfg.ts / cfg.t2

    best = None  # (key tuple, oi, phase, bits, matches, viol_frac, eligible)
    best_raw = 0.0
    best_raw_bits = None
    for oi, levels in enumerate(candidates):
        if levels.size < 2 * fb:
            continue
        bits, _ = fm0_decode(levels[: 2 * (levels.size // 2)])
        viol = fm0_boundary_violations(levels)
        n_lags = bits.size - fb + 1
        if n_lags <= 0:
            continue
        windows = np.lib.stride_tricks.sliding_window_view(bits, SYNC_BITS)[:n_lags]
        matches = (windows == sync).mean(axis=1)
        vsum = np.concatenate([[0], np.cumsum(viol.astype(np.int64))])
        vcount = vsum[np.arange(n_lags) + fb - 1] - vsum[np.arange(n_lags)]
        viol_frac = vcount / (fb - 1)
        if matches.max() > best_raw or best_raw_bits is None:
            best_raw = float(matches.max())
            best_raw_bits = bits
        eligible = (matches >= SYNC_SCORE_MIN) & (viol_frac <= VIOLATION_FRACTION_MAX)
        if not eligible.any():
            continue
        quality = matches - viol_frac
        for phase in np.unique(np.flatnonzero(eligible) % fb):
            grid = np.arange(phase, n_lags, fb)
            gated = grid[eligible[grid]]
            key = (float(quality[gated].mean()), int(gated[-1]))
            if best is None or key > best[0]:
                best = (key, oi, int(phase), bits, matches, viol_frac, eligible)

    if best is None:
        report = DecodeReport(best_score=best_raw)
        if best_raw_bits is None:
            report.note = "buffer shorter than one frame"
        else:
            report.note = "no sync found"
            report.symbol_stream = best_raw_bits
        return report

    _, oi, phase, bits, matches, viol_frac, eligible = best
    images = []
    for s in range(phase, matches.size, fb):
        if eligible[s]:
            payload = bits[s + SYNC_BITS : s + fb]
            images.append(
                FrameDecode(
                    image=bits_to_image(payload, cfg.rows, cfg.cols),
                    score=float(matches[s]),
                    offset_s=oi * cfg.t2 + 2 * s * cfg.ts,
                    violation_fraction=float(viol_frac[s]),
                )
            )
    levels = candidates[oi]
    total_viol = int(fm0_boundary_violations(levels).sum())
    return DecodeReport(
        images=images,
        symbol_stream=bits,
        fm0_violations=total_viol,
        sync_found=True,
        best_score=max(f.score for f in images),
        best_offset_s=oi * cfg.t2,
    )


def decode(
    iq: IqBuffer,
    cfg: DetectorConfig,
    centered_threshold: bool = True,
    keep_traces: bool = False,
    chunk: int = FRONTEND_CHUNK,
) -> DecodeReport:
    """Run the full chain on a capture.

    The F1-rate front half (power, low-pass, decimation) streams through the
    buffer in bounded-size chunks; everything after runs at F2, a few
    thousand samples per second. Raises if the buffer's sample rate
    disagrees with cfg.t1.
    """
    if len(iq) == 0:
        raise ValueError("cannot decode an empty buffer")
    if abs(iq.sample_rate_hz * cfg.t1 - 1.0) > 1e-9:
        raise ValueError(
            f"buffer rate {iq.sample_rate_hz:g} Hz does not match config t1={cfg.t1:g} s"
        )

    x = iq.samples

    def power_chunks():
        for a in range(0, x.size, chunk):
            seg = x[a : a + chunk]
            yield a, (seg.real**2 + seg.imag**2).astype(np.float64)

    post_lpf, power_taps = _lpf_decimate_chunks(power_chunks(), cfg.f1, cfg.f3, cfg.t2)
    post_hpf = hpf(post_lpf, cfg.f4, cfg.t2)
    binary = threshold_binarize(post_hpf, cfg.ta, cfg.t2, centered=centered_threshold)
    candidates = recover_symbols(binary, cfg.ts, cfg.t2, min_levels=2 * cfg.frame_bits)
    report = sync_search(candidates, cfg)
    if keep_traces:
        report.stage_traces = {
            "power": power_taps,
            "post_lpf": post_lpf,
            "post_hpf": post_hpf,
            "binary": binary.astype(np.float64),
        }
    return report


def decode_throughput(duration_s: float = 10.0, cfg: DetectorConfig | None = None, rng_seed: int = 0) -> dict:
    """Measure end-to-end decode speed on a synthetic buffer.

    Returns input samples processed per wall-clock second; the chain is
    real-time capable when that exceeds 1/t1.
    """
    cfg = cfg or tv_config()
    rng = np.random.default_rng(rng_seed)
    n = int(round(duration_s * cfg.f1))
    samples = (
        rng.standard_normal(n, dtype=np.float32) + 1j * rng.standard_normal(n, dtype=np.float32)
    ).astype(np.complex64)
    buf = IqBuffer(samples, cfg.f1)
    t0 = time.perf_counter()
    decode(buf, cfg)
    elapsed = time.perf_counter() - t0
    return {
        "input_samples": n,
        "elapsed_s": elapsed,
        "samples_per_s": n / elapsed,
        "realtime_factor": (n / elapsed) * cfg.t1,
    }
