"""Experiment configuration files.

One JSON document describes a whole link: {source, channel, detector, tag}.
Timing fields carry their unit in the name (ts_ms, t1_us, ...) so a config
is readable without the code, and complex channel gains are written as
[re, im] pairs. Unknown keys are rejected rather than ignored; silently
dropping a misspelled "nosie_power" would fake a clean experiment.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .ambient import SourceProfile
from .channel import ChannelParams
from .detector import DetectorConfig
from .frame_codec import bits_to_hex, hex_to_bits


@dataclass(frozen=True)
class TagSchedule:
    """Transmission-side knobs that are not detector parameters."""

    repeats: int = 2
    start_offset_s: float = 0.1
    postlude_s: float = 0.1
    initial_level: int = 0

    def __post_init__(self):
        if self.repeats < 1:
            raise ValueError(f"repeats must be >= 1, got {self.repeats}")
        if self.start_offset_s < 0 or self.postlude_s < 0:
            raise ValueError("start_offset_s and postlude_s must be >= 0")
        if self.initial_level not in (0, 1):
            raise ValueError(f"initial_level must be 0 or 1, got {self.initial_level}")


@dataclass(frozen=True)
class LinkConfig:
    source: SourceProfile
    channel: ChannelParams
    detector: DetectorConfig
    tag: TagSchedule


def _complex_in(value, where: str) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    raise ValueError(f"{where} must be a number or [re, im] pair, got {value!r}")


def _complex_out(value: complex):
    c = complex(value)
    return c.real if c.imag == 0 else [c.real, c.imag]


def _take(section: dict, known: dict, where: str) -> dict:
    unknown = set(section) - set(known)
    if unknown:
        raise ValueError(f"unknown {where} keys: {sorted(unknown)}")
    out = dict(known)
    out.update(section)
    return out


def parse_config(doc: dict) -> LinkConfig:
    """Build the four config objects from a parsed JSON document.

    Every section and field is optional; omitted values take the module
    defaults (the TV/4G column for the detector).
    """
    if not isinstance(doc, dict):
        raise ValueError(f"config must be a JSON object, got {type(doc).__name__}")
    unknown = set(doc) - {"source", "channel", "detector", "tag"}
    if unknown:
        raise ValueError(f"unknown config sections: {sorted(unknown)}")

    s = _take(
        doc.get("source", {}),
        {
            "kind": "TV",
            "mean_power": 1.0,
            "tdd_period_ms": 1.0,
            "duty_cycle": 0.7,
            "burst_jitter": 0.0,
        },
        "source",
    )
    source = SourceProfile(
        kind=s["kind"],
        mean_power=float(s["mean_power"]),
        tdd_period=float(s["tdd_period_ms"]) * 1e-3,
        duty_cycle=float(s["duty_cycle"]),
        burst_jitter=float(s["burst_jitter"]),
    )

    c = _take(
        doc.get("channel", {}),
        {
            "h_direct": 1.0,
            "g_cascade": 0.5,
            "refl_connected": 0.0,
            "refl_disconnected": 0.5,
            "noise_power": 0.0,
            "doppler_hz": 0.0,
        },
        "channel",
    )
    channel = ChannelParams(
        h_direct=_complex_in(c["h_direct"], "channel.h_direct"),
        g_cascade=_complex_in(c["g_cascade"], "channel.g_cascade"),
        refl_connected=_complex_in(c["refl_connected"], "channel.refl_connected"),
        refl_disconnected=_complex_in(c["refl_disconnected"], "channel.refl_disconnected"),
        noise_power=float(c["noise_power"]),
        doppler_hz=float(c["doppler_hz"]),
    )

    base = DetectorConfig()
    d = _take(
        doc.get("detector", {}),
        {
            "t1_us": base.t1 * 1e6,
            "t2_ms": base.t2 * 1e3,
            "f3_hz": base.f3,
            "f4_hz": base.f4,
            "ta_ms": base.ta * 1e3,
            "ts_ms": base.ts * 1e3,
            "sync_hex": bits_to_hex(base.sync),
            "frame_bits": base.frame_bits,
            "rows": base.rows,
            "cols": base.cols,
        },
        "detector",
    )
    detector = DetectorConfig(
        t1=float(d["t1_us"]) * 1e-6,
        t2=float(d["t2_ms"]) * 1e-3,
        f3=float(d["f3_hz"]),
        f4=float(d["f4_hz"]),
        ta=float(d["ta_ms"]) * 1e-3,
        ts=float(d["ts_ms"]) * 1e-3,
        sync=tuple(int(b) for b in hex_to_bits(d["sync_hex"])),
        frame_bits=int(d["frame_bits"]),
        rows=int(d["rows"]),
        cols=int(d["cols"]),
    )

    t = _take(
        doc.get("tag", {}),
        {"repeats": 2, "start_offset_ms": 100.0, "postlude_ms": 100.0, "initial_level": 0},
        "tag",
    )
    tag = TagSchedule(
        repeats=int(t["repeats"]),
        start_offset_s=float(t["start_offset_ms"]) * 1e-3,
        postlude_s=float(t["postlude_ms"]) * 1e-3,
        initial_level=int(t["initial_level"]),
    )
    return LinkConfig(source=source, channel=channel, detector=detector, tag=tag)


def config_to_dict(cfg: LinkConfig) -> dict:
    """Inverse of parse_config; parse(config_to_dict(x)) == x."""
    return {
        "source": {
            "kind": cfg.source.kind,
            "mean_power": cfg.source.mean_power,
            "tdd_period_ms": cfg.source.tdd_period * 1e3,
            "duty_cycle": cfg.source.duty_cycle,
            "burst_jitter": cfg.source.burst_jitter,
        },
        "channel": {
            "h_direct": _complex_out(cfg.channel.h_direct),
            "g_cascade": _complex_out(cfg.channel.g_cascade),
            "refl_connected": _complex_out(cfg.channel.refl_connected),
            "refl_disconnected": _complex_out(cfg.channel.refl_disconnected),
            "noise_power": cfg.channel.noise_power,
            "doppler_hz": cfg.channel.doppler_hz,
        },
        "detector": {
            "t1_us": cfg.detector.t1 * 1e6,
            "t2_ms": cfg.detector.t2 * 1e3,
            "f3_hz": cfg.detector.f3,
            "f4_hz": cfg.detector.f4,
            "ta_ms": cfg.detector.ta * 1e3,
            "ts_ms": cfg.detector.ts * 1e3,
            "sync_hex": bits_to_hex(cfg.detector.sync),
            "frame_bits": cfg.detector.frame_bits,
            "rows": cfg.detector.rows,
            "cols": cfg.detector.cols,
        },
        "tag": {
            "repeats": cfg.tag.repeats,
            "start_offset_ms": cfg.tag.start_offset_s * 1e3,
            "postlude_ms": cfg.tag.postlude_s * 1e3,
            "initial_level": cfg.tag.initial_level,
        },
    }


def load_config(path) -> LinkConfig:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: not valid JSON: {exc}") from exc
    return parse_config(doc)


def fiveg_config_dict() -> dict:
    """The bursty-source preset as a config document."""
    doc = config_to_dict(parse_config({}))
    doc["source"]["kind"] = "FiveG_TDD"
    doc["detector"].update({"ts_ms": 10.8, "f3_hz": 100.0, "f4_hz": 1.0})
    return doc
