import json
import subprocess
import sys

import numpy as np
import pytest

from ambiscatter.capture import read_sidecar, write_capture
from ambiscatter.cli import main
from ambiscatter.frame_codec import (
    PixelImage,
    frame_for_image,
    image_to_text,
    sync_copy_lags,
)
from ambiscatter.iq import IqBuffer


@pytest.fixture(scope="module")
def image_file(tmp_path_factory):
    rng = np.random.default_rng(21)
    while True:
        img = PixelImage.random(rng)
        if not sync_copy_lags(frame_for_image(img)):
            break
    path = tmp_path_factory.mktemp("img") / "logo.txt"
    path.write_text(image_to_text(img))
    return path, img


def test_encode_reports_frame_arithmetic(image_file, tmp_path, capsys):
    path, _ = image_file
    levels_out = tmp_path / "levels.txt"
    rc = main(["encode", "--image", str(path), "--out", str(levels_out)])
    assert rc == 0
    out = capsys.readouterr().out
    assert "frame bits:  96, fm0 levels: 192" in out
    assert set(levels_out.read_text().strip()) <= {"0", "1"}
    assert len(levels_out.read_text().strip()) == 192


def test_simulate_decode_loopback(image_file, tmp_path, capsys):
    path, img = image_file
    cap = tmp_path / "loop.cf32"
    report = tmp_path / "report.json"
    assert main(["simulate", str(cap), "--image", str(path), "--seed", "5"]) == 0
    capsys.readouterr()

    rc = main(["decode", str(cap), "--report", str(report)])
    out = capsys.readouterr().out
    assert rc == 0
    assert image_to_text(img).strip() in out  # the '#'/'.' art is printed
    doc = json.loads(report.read_text())
    assert doc["sync_found"] is True
    truth = read_sidecar(cap)["truth"]
    assert doc["frames"][0]["image_hex"] == truth["image_hex"]
    assert doc["frames"][0]["score"] == 1.0


def test_sidecar_contents(image_file, tmp_path):
    path, _ = image_file
    cap = tmp_path / "meta.cf32"
    main(["simulate", str(cap), "--image", str(path), "--seed", "9"])
    side = read_sidecar(cap)
    assert side["sample_rate_hz"] == 1e6
    assert side["format"] == "cf32le"
    assert side["seed"] == 9
    assert side["config"]["detector"]["ts_ms"] == pytest.approx(2.7)
    assert side["truth"]["repeats"] == 2
    assert side["truth"]["start_offset_s"] == pytest.approx(0.1)


def test_simulate_is_deterministic(image_file, tmp_path):
    path, _ = image_file
    a = tmp_path / "a.cf32"
    b = tmp_path / "b.cf32"
    main(["simulate", str(a), "--image", str(path), "--seed", "12"])
    main(["simulate", str(b), "--image", str(path), "--seed", "12"])
    assert a.read_bytes() == b.read_bytes()


def test_cu8_capture_decodes(image_file, tmp_path, capsys):
    # weak absolute gain keeps the 8-bit quantizer in range; decode must
    # not care about the overall scale
    path, img = image_file
    cap = tmp_path / "loop.cu8"
    cfgf = tmp_path / "weak.json"
    cfgf.write_text(json.dumps({"channel": {"h_direct": 0.2, "g_cascade": 0.1, "refl_disconnected": 1.0}}))
    assert main(["simulate", str(cap), "--image", str(path), "--seed", "4", "--config", str(cfgf)]) == 0
    rc = main(["decode", str(cap), "--config", str(cfgf)])
    out = capsys.readouterr().out
    assert rc == 0
    assert image_to_text(img).strip() in out


def test_decode_without_sync_exits_1(tmp_path, capsys):
    rng = np.random.default_rng(0)
    noise = (rng.standard_normal(400_000, dtype=np.float32) * 0.1).astype(np.float32)
    buf = IqBuffer((noise + 1j * noise[::-1]).astype(np.complex64), 1e6)
    cap = tmp_path / "noise.cf32"
    write_capture(buf, cap, "cf32le")
    rc = main(["decode", str(cap)])
    assert rc == 1
    doc = json.loads(capsys.readouterr().out)
    assert doc["sync_found"] is False


def test_usage_errors_exit_2(tmp_path, capsys):
    assert main([]) == 2
    assert main(["decode", str(tmp_path / "missing.cf32")]) == 2
    assert main(["sweep", "--axis", "volume", "--grid", "1"]) == 2
    capsys.readouterr()


def test_format_inference_needs_known_extension(tmp_path, capsys):
    blob = tmp_path / "capture.bin"
    blob.write_bytes(b"\x00" * 64)
    assert main(["decode", str(blob)]) == 2
    assert "--format" in capsys.readouterr().err


def test_validate_exit_codes(tmp_path, capsys):
    assert main(["validate"]) == 0
    bad = tmp_path / "bad.json"
    bad.write_text(
        json.dumps({"source": {"kind": "FiveG_TDD"}, "detector": {"ts_ms": 0.5, "f3_hz": 100.0, "f4_hz": 1.0}})
    )
    rc = main(["validate", "--config", str(bad)])
    out = capsys.readouterr().out
    assert rc == 1
    assert "ts > tdd_period" in out


def test_sweep_writes_csv_and_json(tmp_path, capsys):
    csvf = tmp_path / "sweep.csv"
    jsonf = tmp_path / "sweep.json"
    rc = main(
        [
            "sweep",
            "--axis",
            "snr_db",
            "--grid",
            "8,16",
            "--trials",
            "2",
            "--csv",
            str(csvf),
            "--json",
            str(jsonf),
        ]
    )
    assert rc == 0
    lines = csvf.read_text().strip().splitlines()
    assert lines[0] == "snr_db,ber,per,fdr,mean_score,trials"
    assert len(lines) == 3
    doc = json.loads(jsonf.read_text())
    assert [p["axis_value"] for p in doc["points"]] == [8.0, 16.0]


def test_console_entry_point_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "ambiscatter.cli", "validate"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "satisfied" in proc.stdout
