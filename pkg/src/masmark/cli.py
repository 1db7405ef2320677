"""Command-line front end: embed, extract, attack, evaluate, params.

Exit codes: 0 success, 2 bad input or parameters, 3 extraction found no
sync (report still printed), 4 file I/O or WAV format trouble.
"""

from __future__ import annotations

import argparse
import csv
import sys

import numpy as np

from . import codec, metrics
from .attacks import parse_attack_spec
from .audio_io import WavFormatError, load_wav, save_wav
from .codec import DEFAULT_SYNC_HEX, EmbedParams
from .mas import sliding_means

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NO_SYNC = 3
EXIT_IO = 4

DEFAULT_SEED = 42

# Robustness grid: the standard attack battery, identity row first.
DEFAULT_GRID = (
    "none",
    "awgn:55",
    "awgn:45",
    "awgn:35",
    "requantize",
    "resample:22050",
    "resample:11025",
    "lowpass:10000",
    "lowpass:8000",
    "lowpass:6000",
    "lowpass:4000",
    "lowpass:2000",
    "crop:1.0",
)


# ----------------------------------------------------------- file formats

def parse_params_text(text: str) -> tuple[EmbedParams, int]:
    """Parse `key = value` parameter lines; returns (params, seed).

    Known keys: b, n, S, S_sync, L, sync_code_hex, seed.  Blank lines and
    #-comments are ignored; unknown keys are errors.
    """
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"params line {lineno}: expected key = value, got {raw!r}")
        values[key.strip()] = value.strip()

    known = {"b", "n", "S", "S_sync", "L", "sync_code_hex", "seed"}
    unknown = set(values) - known
    if unknown:
        raise ValueError(f"unknown parameter keys: {', '.join(sorted(unknown))}")

    try:
        params = EmbedParams(
            b=int(values.get("b", 60)),
            n=int(values.get("n", 10)),
            S=float(values.get("S", 0.18)),
            L=int(values.get("L", 128)),
            sync_bits=codec.sync_bits_from_hex(values.get("sync_code_hex", DEFAULT_SYNC_HEX)),
            S_sync=float(values["S_sync"]) if "S_sync" in values else None,
        )
        seed = int(values.get("seed", DEFAULT_SEED))
    except ValueError:
        raise
    return params, seed


def default_params_text() -> str:
    return (
        "# masmark embedding parameters\n"
        "b = 60            # MAS window (samples)\n"
        "n = 10            # frame length in MAS blocks\n"
        "S = 0.18          # QIM step for message bits\n"
        "S_sync = 0.18     # QIM step for sync blocks\n"
        "L = 128           # payload length (bits)\n"
        f"sync_code_hex = {DEFAULT_SYNC_HEX}\n"
        f"seed = {DEFAULT_SEED}\n"
    )


def parse_payload_text(text: str, length: int) -> np.ndarray:
    """Payload from ASCII bits ('0'/'1', 0 meaning -1) or a hex string.

    Both are most-significant-bit first.  A pure 0/1 string of exactly
    `length` characters reads as bits; otherwise the text must be hex
    encoding exactly `length` bits.
    """
    compact = "".join(text.split())
    if not compact:
        raise ValueError("payload file is empty")
    if set(compact) <= {"0", "1"} and len(compact) == length:
        return np.array([1 if c == "1" else -1 for c in compact], dtype=np.int64)
    try:
        value = int(compact, 16)
    except ValueError:
        raise ValueError(
            "payload must be ASCII bits or hex"
            + (f" ({len(compact)} bits given, {length} expected)"
               if set(compact) <= {"0", "1"} else "")
        ) from None
    bits = 4 * len(compact)
    if bits != length:
        raise ValueError(f"hex payload encodes {bits} bits, expected {length}")
    return np.array(
        [1 if (value >> (bits - 1 - i)) & 1 else -1 for i in range(bits)],
        dtype=np.int64,
    )


def payload_bits01(payload: np.ndarray) -> str:
    return "".join("1" if w > 0 else "0" for w in payload)


def payload_hex(payload: np.ndarray) -> str:
    bits = payload_bits01(payload)
    return format(int(bits, 2), f"0{(len(bits) + 3) // 4}x")


def _read_text(path: str) -> str:
    with open(path, "r", encoding="ascii") as f:
        return f.read()


def _load_params_arg(path: str | None) -> tuple[EmbedParams, int]:
    if path is None:
        return EmbedParams(), DEFAULT_SEED
    return parse_params_text(_read_text(path))


# ------------------------------------------------------------- commands

def cmd_embed(args) -> int:
    params, _ = _load_params_arg(args.params)
    payload = parse_payload_text(_read_text(args.payload), params.L)
    clip = load_wav(args.input)
    marked = codec.embed(clip, payload, params)
    save_wav(args.output, marked)
    reps = len(clip.samples) // params.repetition_span
    print(f"embedded {reps} repetitions of {params.L} bits")
    print(f"snr_db = {metrics.snr_db(clip, marked):.2f}")
    print(f"capacity_bps = {params.capacity_bps(clip.sample_rate):.1f}")
    return EXIT_OK


def cmd_extract(args) -> int:
    params, _ = _load_params_arg(args.params)
    clip = load_wav(args.input)
    report = codec.extract(clip, params)
    print(f"detected_count = {report.detected_count}")
    print(f"sync_positions = {report.sync_positions}")
    if report.payload is None:
        print("payload = none (no sync detected)")
        return EXIT_NO_SYNC
    print(f"payload_hex = {payload_hex(report.payload)}")
    print(f"payload_bits = {payload_bits01(report.payload)}")
    if args.reference:
        reference = parse_payload_text(_read_text(args.reference), params.L)
        result = metrics.ber(reference, report.payload)
        print(f"ber = {result.ber:.6f} ({result.errors}/{result.total})")
    return EXIT_OK


def cmd_attack(args) -> int:
    spec = parse_attack_spec(args.spec)
    clip = load_wav(args.input)
    attacked = spec.apply(clip, args.seed)
    save_wav(args.output, attacked)
    print(f"applied {spec}")
    if len(attacked.samples) == len(clip.samples):
        print(f"snr_db = {metrics.snr_db(clip, attacked):.2f}")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    params, file_seed = _load_params_arg(args.params)
    seed = args.seed if args.seed is not None else file_seed
    payload = parse_payload_text(_read_text(args.payload), params.L)
    clip = load_wav(args.input)
    marked = codec.embed(clip, payload, params)

    if args.grid:
        lines = (ln.split("#", 1)[0].strip() for ln in _read_text(args.grid).splitlines())
        grid = [ln for ln in lines if ln]
        if not grid:
            raise ValueError("grid file lists no attacks")
    else:
        grid = list(DEFAULT_GRID)
    specs = [parse_attack_spec(line) for line in grid]

    rows = []
    for i, spec in enumerate(specs):
        attacked = spec.apply(marked, seed + i)
        report = codec.extract(attacked, params)
        if report.payload is not None:
            result = metrics.ber(payload, report.payload)
            rows.append((spec, report.detected_count, result.errors, result.total,
                         f"{result.ber:.6f}"))
        else:
            rows.append((spec, 0, "", "", ""))

    name_width = max(len(str(r[0])) for r in rows)
    print(f"{'attack':<{name_width}}  detected  errors  total  ber")
    for spec, detected, errors, total, ber_text in rows:
        print(f"{str(spec):<{name_width}}  {detected:>8}  {errors!s:>6}  {total!s:>5}  {ber_text}")

    if args.csv:
        with open(args.csv, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(["attack", "parameter", "detected_count", "errors", "total", "ber"])
            for spec, detected, errors, total, ber_text in rows:
                parameter = "" if spec.kind in ("none", "requantize") else f"{spec.parameter:g}"
                writer.writerow([spec.kind, parameter, detected, errors, total, ber_text])
        print(f"wrote {args.csv}")
    return EXIT_OK


def cmd_params(args) -> int:
    if args.auto:
        clip = load_wav(args.auto)
        crossings = metrics.zero_crossings(sliding_means(clip.samples, 10))
        b = codec.select_block_length(clip)
        print(f"zero_crossings_M10 = {crossings}")
        print(f"samples_per_crossing = {len(clip.samples) / crossings:.1f}")
        print(f"suggested_b = {b}")
    else:
        print(default_params_text(), end="")
    return EXIT_OK


# ------------------------------------------------------------ entry point

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="masmark",
        description="Blind audio watermarking over moving-average DCT coefficients",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    embed = sub.add_parser("embed", help="embed a payload into a WAV")
    embed.add_argument("input")
    embed.add_argument("output")
    embed.add_argument("--payload", required=True, help="payload file (bits or hex)")
    embed.add_argument("--params", help="parameter file")
    embed.set_defaults(func=cmd_embed)

    extract = sub.add_parser("extract", help="recover a payload from a WAV")
    extract.add_argument("input")
    extract.add_argument("--params", help="parameter file")
    extract.add_argument("--reference", help="payload file to score BER against")
    extract.set_defaults(func=cmd_extract)

    attack = sub.add_parser("attack", help="apply one channel attack")
    attack.add_argument("input")
    attack.add_argument("output")
    attack.add_argument("--spec", required=True,
                        help='e.g. "awgn:45", "lowpass:8000", "requantize", "crop:1.0"')
    attack.add_argument("--seed", type=int, default=DEFAULT_SEED)
    attack.set_defaults(func=cmd_attack)

    evaluate = sub.add_parser("evaluate", help="embed, attack grid, extract, report")
    evaluate.add_argument("input")
    evaluate.add_argument("--payload", required=True)
    evaluate.add_argument("--params", help="parameter file")
    evaluate.add_argument("--grid", help="file of attack specs, one per line")
    evaluate.add_argument("--csv", help="also write rows as CSV")
    evaluate.add_argument("--seed", type=int, help="attack seed (default from params file or 42)")
    evaluate.set_defaults(func=cmd_evaluate)

    params = sub.add_parser("params", help="print a parameter template, or suggest b")
    params.add_argument("--auto", metavar="WAV",
                        help="derive b from this clip's zero-crossing density")
    params.set_defaults(func=cmd_params)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, WavFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
