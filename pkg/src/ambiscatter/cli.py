"""Command-line front end.

Subcommands cover the whole workflow: encode an image to FM0 levels,
simulate a capture (with a ground-truth sidecar), decode a capture back to
images, sweep link parameters, validate a config against the design rules,
and benchmark decode throughput.

Exit codes: 0 success, 1 constraint violation or no sync found, 2 usage or
file errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

import numpy as np

from .ambient import generate
from .capture import (
    CAPTURE_FORMATS,
    CaptureError,
    read_capture,
    sidecar_path,
    write_capture,
    write_sidecar,
)
from .channel import SwitchWaveform, apply
from .config import LinkConfig, config_to_dict, load_config, parse_config
from .detector import decode, validate
from .frame_codec import (
    PixelImage,
    bits_to_hex,
    fm0_encode_repeated,
    frame_for_image,
    image_to_bits,
    image_to_text,
    parse_image_text,
)
from .harness import SweepSpec, LinkSpec, bench_throughput, run_sweep


def _load_image(path) -> PixelImage:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_image_text(fh.read())


def _guess_format(path: str) -> str | None:
    low = str(path).lower()
    if low.endswith((".cf32", ".cf32le", ".fc32")):
        return "cf32le"
    if low.endswith(".cu8"):
        return "cu8"
    return None


def _resolve_format(args) -> str:
    fmt = args.format or _guess_format(args.capture)
    if fmt is None:
        raise CaptureError(
            f"cannot infer capture format from {args.capture!r}; pass --format"
        )
    return fmt


def _config_from_args(args) -> LinkConfig:
    if args.config:
        return load_config(args.config)
    return parse_config({})


def cmd_encode(args) -> int:
    img = _load_image(args.image)
    cfg = _config_from_args(args)
    frame = frame_for_image(img, sync=cfg.detector.sync)
    levels = fm0_encode_repeated(frame, args.repeats, cfg.tag.initial_level)
    print(f"payload hex: {bits_to_hex(image_to_bits(img))}")
    print(f"frame hex:   {bits_to_hex(frame.bits)}")
    print(f"frame bits:  {frame.bits.size}, fm0 levels: {len(levels) }")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write("".join(str(v) for v in levels.levels) + "\n")
        print(f"levels written to {args.out}")
    return 0


def cmd_simulate(args) -> int:
    cfg = _config_from_args(args)
    problems = validate(cfg.detector, cfg.source)
    if problems and not args.force:
        for p in problems:
            print(f"constraint violated: {p}", file=sys.stderr)
        print("pass --force to simulate anyway", file=sys.stderr)
        return 1

    if args.image:
        img = _load_image(args.image)
    else:
        img = PixelImage.random(np.random.default_rng(args.seed), cfg.detector.rows, cfg.detector.cols)

    frame = frame_for_image(img, sync=cfg.detector.sync)
    levels = fm0_encode_repeated(frame, cfg.tag.repeats, cfg.tag.initial_level)
    tag = SwitchWaveform(
        levels=levels, symbol_period=cfg.detector.ts, start_offset=cfg.tag.start_offset_s
    )
    duration = cfg.tag.start_offset_s + tag.duration_s + cfg.tag.postlude_s
    # one user seed fans out to the two independent random streams
    source = generate(
        replace(cfg.source, rng_seed=args.seed), duration, cfg.detector.f1
    )
    rx = apply(source, tag, cfg.channel, rng_seed=args.seed + 1)

    fmt = args.format or _guess_format(args.capture) or "cf32le"
    clipped = write_capture(rx, args.capture, fmt)
    sidecar = {
        "sample_rate_hz": rx.sample_rate_hz,
        "center_freq_hz": rx.center_freq_hz,
        "format": fmt,
        "seed": args.seed,
        "config": config_to_dict(cfg),
        "truth": {
            "image_hex": bits_to_hex(image_to_bits(img)),
            "image_text": image_to_text(img),
            "frame_hex": bits_to_hex(frame.bits),
            "start_offset_s": cfg.tag.start_offset_s,
            "symbol_period_s": cfg.detector.ts,
            "repeats": cfg.tag.repeats,
            "initial_level": cfg.tag.initial_level,
        },
    }
    write_sidecar(args.capture, sidecar)
    print(f"wrote {len(rx)} samples to {args.capture} ({fmt}), sidecar {sidecar_path(args.capture)}")
    if clipped:
        print(f"warning: {clipped} clipped components", file=sys.stderr)
    return 0


def cmd_decode(args) -> int:
    cfg = _config_from_args(args)
    fmt = _resolve_format(args)
    buf = read_capture(args.capture, fmt, cfg.detector.f1)
    report = decode(buf, cfg.detector, centered_threshold=not args.causal)

    for i, fr in enumerate(report.images):
        print(f"frame {i}: sync score {fr.score:.3f}, at {fr.offset_s:.4f} s")
        print(image_to_text(fr.image), end="")
    doc = {
        "sync_found": report.sync_found,
        "frames": [
            {
                "image_hex": bits_to_hex(image_to_bits(fr.image)),
                "score": fr.score,
                "offset_s": fr.offset_s,
                "violation_fraction": fr.violation_fraction,
            }
            for fr in report.images
        ],
        "best_score": report.best_score,
        "best_offset_s": report.best_offset_s,
        "fm0_violations": report.fm0_violations,
        "note": report.note,
    }
    text = json.dumps(doc, indent=2, sort_keys=True)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0 if report.sync_found else 1


def cmd_sweep(args) -> int:
    cfg = _config_from_args(args)
    link = LinkSpec(
        source=cfg.source,
        channel=cfg.channel,
        detector=cfg.detector,
        repeats=cfg.tag.repeats,
        start_offset_s=cfg.tag.start_offset_s,
        postlude_s=cfg.tag.postlude_s,
    )
    grid = tuple(float(v) for v in args.grid.split(","))
    spec = SweepSpec(
        axis=args.axis, grid=grid, link=link, trials_per_point=args.trials, rng_seed=args.seed
    )
    result = run_sweep(spec, validate_config=not args.no_validate)
    csv_text = result.to_csv()
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(csv_text)
    else:
        print(csv_text, end="")
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(result.to_json() + "\n")
    return 0


def cmd_validate(args) -> int:
    cfg = _config_from_args(args)
    problems = validate(cfg.detector, cfg.source)
    if problems:
        for p in problems:
            print(f"constraint violated: {p}")
        return 1
    print("all design constraints satisfied")
    return 0


def cmd_bench(args) -> int:
    out = bench_throughput(args.duration, repeat=args.repeat)
    print(json.dumps(out, indent=2, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ambiscatter",
        description="ambient-backscatter link simulator and decoder",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config(p):
        p.add_argument("--config", help="link config JSON (defaults: TV column)")

    p = sub.add_parser("encode", help="image file -> frame bits and FM0 levels")
    p.add_argument("--image", required=True, help="'#'/'.' text image file")
    p.add_argument("--repeats", type=int, default=1)
    p.add_argument("--out", help="write FM0 levels as a 0/1 text line")
    add_config(p)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("simulate", help="config -> IQ capture + truth sidecar")
    p.add_argument("capture", help="output capture path")
    p.add_argument("--format", choices=CAPTURE_FORMATS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--image", help="'#'/'.' text image file (default: random from seed)")
    p.add_argument("--force", action="store_true", help="simulate despite constraint violations")
    add_config(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("decode", help="capture file -> images + JSON report")
    p.add_argument("capture", help="input capture path")
    p.add_argument("--format", choices=CAPTURE_FORMATS)
    p.add_argument("--causal", action="store_true", help="trailing threshold window")
    p.add_argument("--report", help="write the JSON report here instead of stdout")
    add_config(p)
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("sweep", help="Monte-Carlo sweep -> CSV/JSON")
    p.add_argument("--axis", required=True, choices=("snr_db", "contrast_db", "doppler_hz", "ts"))
    p.add_argument("--grid", required=True, help="comma-separated axis values")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", help="CSV output path (default: stdout)")
    p.add_argument("--json", help="also write a JSON summary here")
    p.add_argument("--no-validate", action="store_true", help="allow rule-breaking configs")
    add_config(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("validate", help="check config against the design rules")
    add_config(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("bench", help="decode throughput benchmark")
    p.add_argument("--duration", type=float, default=10.0, help="seconds of signal")
    p.add_argument("--repeat", type=int, default=1)
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 on --help; pass both through
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (CaptureError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
