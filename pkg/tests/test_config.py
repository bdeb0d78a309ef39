import json

import pytest

from ambiscatter.config import (
    LinkConfig,
    TagSchedule,
    config_to_dict,
    fiveg_config_dict,
    load_config,
    parse_config,
)
from ambiscatter.detector import validate
from ambiscatter.frame_codec import DEFAULT_SYNC


def test_empty_document_gives_tv_defaults():
    cfg = parse_config({})
    assert cfg.detector.ts == pytest.approx(2.7e-3)
    assert cfg.detector.f3 == 500.0
    assert cfg.detector.sync == DEFAULT_SYNC
    assert cfg.source.kind == "TV"
    assert cfg.tag.repeats == 2
    assert validate(cfg.detector, cfg.source) == []


def test_unit_suffixed_fields_convert():
    cfg = parse_config(
        {
            "detector": {"ts_ms": 10.8, "t1_us": 2.0, "ta_ms": 80.0},
            "source": {"kind": "FiveG_TDD", "tdd_period_ms": 2.5},
            "tag": {"start_offset_ms": 50.0},
        }
    )
    assert cfg.detector.ts == pytest.approx(10.8e-3)
    assert cfg.detector.t1 == pytest.approx(2e-6)
    assert cfg.detector.ta == pytest.approx(80e-3)
    assert cfg.source.tdd_period == pytest.approx(2.5e-3)
    assert cfg.tag.start_offset_s == pytest.approx(0.05)


def test_round_trip_through_dict():
    cfg = parse_config(
        {
            "channel": {"refl_disconnected": [0.3, 0.4], "g_cascade": 0.5},
            "detector": {"sync_hex": "a7"},
            "tag": {"repeats": 4, "initial_level": 1},
        }
    )
    again = parse_config(config_to_dict(cfg))
    assert again == cfg
    assert cfg.channel.refl_disconnected == 0.3 + 0.4j
    assert cfg.detector.sync == (1, 0, 1, 0, 0, 1, 1, 1)


def test_complex_fields_accept_scalar_or_pair():
    cfg = parse_config({"channel": {"h_direct": 2.0, "refl_connected": [0.0, 0.1]}})
    assert cfg.channel.h_direct == 2.0 + 0j
    assert cfg.channel.refl_connected == 0.1j
    with pytest.raises(ValueError, match="re, im"):
        parse_config({"channel": {"h_direct": [1.0, 2.0, 3.0]}})


def test_unknown_keys_rejected():
    with pytest.raises(ValueError, match="unknown config sections"):
        parse_config({"detecter": {}})
    with pytest.raises(ValueError, match="unknown channel keys"):
        parse_config({"channel": {"nosie_power": 0.1}})
    with pytest.raises(ValueError, match="unknown detector keys"):
        parse_config({"detector": {"ts": 2.7e-3}})  # must be ts_ms


def test_tag_schedule_validation():
    with pytest.raises(ValueError):
        TagSchedule(repeats=0)
    with pytest.raises(ValueError):
        TagSchedule(initial_level=2)
    with pytest.raises(ValueError):
        TagSchedule(postlude_s=-1.0)


def test_fiveg_preset_document():
    cfg = parse_config(fiveg_config_dict())
    assert cfg.source.kind == "FiveG_TDD"
    assert cfg.detector.ts == pytest.approx(10.8e-3)
    assert cfg.detector.f4 == 1.0
    assert validate(cfg.detector, cfg.source) == []


def test_load_config_reports_bad_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with pytest.raises(ValueError, match="not valid JSON"):
        load_config(path)
    good = tmp_path / "good.json"
    good.write_text(json.dumps({"detector": {"f3_hz": 450.0}}))
    assert load_config(good).detector.f3 == 450.0


def test_config_is_a_plain_value_object():
    a = parse_config({})
    b = parse_config({})
    assert a == b
    assert isinstance(a, LinkConfig)
