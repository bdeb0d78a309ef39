import numpy as np
import pytest

from ambiscatter.ambient import SourceProfile, generate
from ambiscatter.channel import (
    ChannelParams,
    SwitchWaveform,
    apply,
    contrast,
    state_power_gap,
    switch_level_per_sample,
)
from ambiscatter.frame_codec import Fm0Levels
from ambiscatter.iq import IqBuffer


def _ones(n, fs=1e6):
    return IqBuffer(np.ones(n, dtype=np.complex64), fs)


def _alternating_tag(n_levels, ts, start=0.0):
    return SwitchWaveform(Fm0Levels(np.arange(n_levels) % 2), ts, start)


def test_no_tag_degenerate_case():
    src = _ones(1000)
    ch = ChannelParams(h_direct=2 + 1j, g_cascade=0.0, noise_power=0.0)
    out = apply(src, None, ch)
    assert np.array_equal(out.samples, np.complex64(2 + 1j) * src.samples)


def test_per_state_output_power():
    ts = 1e-3
    tag = _alternating_tag(20, ts)
    ch = ChannelParams(h_direct=1.0, g_cascade=0.2, refl_connected=0.0, refl_disconnected=0.5)
    out = apply(_ones(20_000), tag, ch)
    p = np.abs(out.samples.astype(np.complex128)) ** 2
    lv = switch_level_per_sample(tag, 20_000, 1e6)
    assert np.mean(p[lv == 0]) == pytest.approx(abs(1.0) ** 2, rel=1e-6)
    assert np.mean(p[lv == 1]) == pytest.approx(abs(1.1) ** 2, rel=1e-6)


def test_contrast_examples():
    assert contrast(ChannelParams(g_cascade=0.0)) == pytest.approx(1.0)
    assert contrast(
        ChannelParams(h_direct=0.0, refl_connected=0.0, refl_disconnected=1.0)
    ) == float("inf")
    c = contrast(
        ChannelParams(h_direct=1.0, g_cascade=0.1, refl_connected=0.0, refl_disconnected=1.0)
    )
    assert c == pytest.approx(1.21, abs=1e-12)
    assert state_power_gap(ChannelParams(h_direct=1.0, g_cascade=0.2, refl_disconnected=0.5)) == (
        pytest.approx(0.21, abs=1e-12)
    )


def test_resting_state_is_connected():
    n = 10_000
    tag = _alternating_tag(4, 1e-3, start=3e-3)  # active only in [3 ms, 7 ms)
    ch = ChannelParams(h_direct=1.0, g_cascade=0.5, refl_connected=0.0, refl_disconnected=1.0)
    src = _ones(n)
    out = apply(src, tag, ch)
    assert np.array_equal(out.samples[:3000], src.samples[:3000])
    assert np.array_equal(out.samples[7000:], src.samples[7000:])
    assert not np.array_equal(out.samples[3000:7000], src.samples[3000:7000])


def test_waveform_must_fit():
    tag = _alternating_tag(10, 1e-3, start=1e-3)  # needs 11 ms
    with pytest.raises(ValueError):
        apply(_ones(10_000), tag, ChannelParams())


def test_level_edges_handle_fractional_periods():
    # symbol period of 2.7 ms at 1 MHz: 2700 samples per level, no drift
    tag = _alternating_tag(100, 2.7e-3)
    lv = switch_level_per_sample(tag, 270_000, 1e6)
    changes = np.flatnonzero(np.diff(lv.astype(int)))
    assert len(changes) == 99
    assert np.all(np.diff(changes) == 2700)


def test_linearity_without_noise():
    rng = np.random.default_rng(11)
    x = (rng.normal(size=5000) + 1j * rng.normal(size=5000)).astype(np.complex64)
    tag = _alternating_tag(5, 1e-3)
    ch = ChannelParams(h_direct=0.8 - 0.1j, g_cascade=0.3, refl_disconnected=0.7j)
    y1 = apply(IqBuffer(x, 1e6), tag, ch).samples
    y2 = apply(IqBuffer(np.complex64(2.0) * x, 1e6), tag, ch).samples
    assert np.allclose(y2, 2.0 * y1, rtol=1e-5)


def test_noise_determinism_and_power():
    src = IqBuffer(np.zeros(200_000, dtype=np.complex64), 1e6)
    ch = ChannelParams(noise_power=0.3)
    a = apply(src, None, ch, rng_seed=5)
    b = apply(src, None, ch, rng_seed=5)
    assert a.samples.tobytes() == b.samples.tobytes()
    c = apply(src, None, ch, rng_seed=6)
    assert a.samples.tobytes() != c.samples.tobytes()
    p = np.mean(np.abs(a.samples.astype(np.complex128)) ** 2)
    assert p == pytest.approx(0.3, rel=0.02)


def test_configured_snr_recovered():
    fs = 1e6
    ch0 = ChannelParams(h_direct=1.0, g_cascade=0.5, refl_connected=0.0, refl_disconnected=1.0)
    gap = state_power_gap(ch0)  # 1.25 for these values
    snr_db = 7.0
    noise = gap / 10 ** (snr_db / 10)
    ch = ChannelParams(
        h_direct=1.0,
        g_cascade=0.5,
        refl_connected=0.0,
        refl_disconnected=1.0,
        noise_power=noise,
    )
    src = generate(SourceProfile(kind="TV", rng_seed=12), 0.25, fs)
    tag = _alternating_tag(50, 5e-3)
    out = apply(src, tag, ch, rng_seed=13)
    lv = switch_level_per_sample(tag, len(out), fs)
    p = np.abs(out.samples.astype(np.complex128)) ** 2
    gap_hat = abs(np.mean(p[lv == 1]) - np.mean(p[lv == 0]))  # noise cancels in the difference
    snr_hat_db = 10 * np.log10(gap_hat / noise)
    assert abs(snr_hat_db - snr_db) < 0.5


def test_energy_accounting():
    fs = 1e6
    src = generate(SourceProfile(kind="TV", rng_seed=14), 0.1, fs)
    tag = _alternating_tag(20, 5e-3)
    ch = ChannelParams(
        h_direct=1.0, g_cascade=0.4, refl_connected=0.1, refl_disconnected=0.9, noise_power=0.2
    )
    out = apply(src, tag, ch, rng_seed=15)
    lv = switch_level_per_sample(tag, len(out), fs)
    occ1 = np.mean(lv == 1)
    p_con = abs(ch.h_direct + ch.g_cascade * ch.refl_connected) ** 2
    p_dis = abs(ch.h_direct + ch.g_cascade * ch.refl_disconnected) ** 2
    expect = (1 - occ1) * p_con + occ1 * p_dis + ch.noise_power
    got = np.mean(np.abs(out.samples.astype(np.complex128)) ** 2)
    assert got == pytest.approx(expect, rel=0.02)


def test_swapping_reflections_swaps_state_powers():
    ch = ChannelParams(h_direct=1.0, g_cascade=0.3, refl_connected=0.2j, refl_disconnected=0.8)
    sw = ChannelParams(h_direct=1.0, g_cascade=0.3, refl_connected=0.8, refl_disconnected=0.2j)
    assert contrast(ch) == pytest.approx(1.0 / contrast(sw), rel=1e-12)


def test_doppler_rotates_backscatter_path_only():
    fs = 1e6
    n = 1000
    ch = ChannelParams(h_direct=1.0, g_cascade=0.5, refl_connected=0.4, doppler_hz=1000.0)
    out = apply(_ones(n, fs), None, ch)
    k = np.arange(n)
    expect = 1.0 + 0.5 * 0.4 * np.exp(2j * np.pi * 1000.0 * k / fs)
    assert np.allclose(out.samples, expect.astype(np.complex64), atol=1e-5)


def test_params_validation():
    with pytest.raises(ValueError):
        ChannelParams(noise_power=-1.0)
    with pytest.raises(ValueError):
        ChannelParams(refl_disconnected=1.5)
    with pytest.raises(ValueError):
        SwitchWaveform(Fm0Levels([0, 1]), symbol_period=0.0)
    with pytest.raises(ValueError):
        SwitchWaveform(Fm0Levels([0, 1]), symbol_period=1e-3, start_offset=-1.0)
