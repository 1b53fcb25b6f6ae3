"""Command-line interface: ``grandlab <subcommand> ...``.

Exit codes: 0 success, 1 configuration error, 2 runtime failure.  Every
long option can also be given in a ``--config`` file as ``name=value``
lines (``#`` starts a comment); flags on the command line win.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from typing import Any, Callable

import numpy as np

from . import __version__
from .codes import REGISTRY, CodeError, atomic_write, get_code, save_code
from .gf2 import GF2Error
from .patterngen import (
    Parity,
    TuningOffsets,
    distinct_partitions,
    fixed_count_partitions,
    level1_compositions,
    parity_partitions,
    segment_caps,
)
from .sim import (
    DECODERS,
    ConfigError,
    TrialConfig,
    ebno_to_sigma,
    parse_segments,
    plot_report,
    resolve_segmentation,
    run_trials,
)


class CliError(Exception):
    """Bad command line or config file (exit code 1)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(message)


# --- value parsers -------------------------------------------------------------

def parse_ebno(text: str) -> tuple[float, ...]:
    """``start:stop:step`` (inclusive) or a comma list."""
    text = str(text).strip()
    try:
        if ":" in text:
            start, stop, step = (float(x) for x in text.split(":"))
            if step <= 0 or stop < start:
                raise CliError(f"bad SNR range {text!r}")
            count = int(round((stop - start) / step)) + 1
            vals = [round(start + i * step, 10) for i in range(count)]
            if vals[-1] > stop + 1e-9:
                vals.pop()
            return tuple(vals)
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise CliError(f"bad SNR list {text!r}") from exc


def fmt_ebno(vals) -> str:
    return ",".join(f"{v:g}" for v in vals)


def parse_decoders(text: str) -> tuple[str, ...]:
    text = str(text).strip()
    if text == "both":
        return DECODERS
    out = tuple(x.strip() for x in text.split(",") if x.strip())
    for d in out:
        if d not in DECODERS:
            raise CliError(f"unknown decoder {d!r}")
    return out


def parse_ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in str(text).split(",") if x.strip())
    except ValueError as exc:
        raise CliError(f"expected comma-separated integers, got {text!r}") from exc


def parse_parities(text: str) -> tuple[Parity, ...]:
    try:
        return tuple(Parity(x.strip().lower()) for x in str(text).split(",") if x.strip())
    except ValueError as exc:
        raise CliError(f"parities must be even/odd/any, got {text!r}") from exc


def _positive_int(text) -> int:
    v = int(text)
    if v < 1:
        raise ValueError(f"expected a positive integer, got {v}")
    return v


@dataclass(frozen=True)
class Opt:
    name: str
    parse: Callable[[str], Any]
    default: Any
    help: str
    fmt: Callable[[Any], str] = str


SIMULATE_OPTS = [
    Opt("code", str, "ebch128_106", "registry name or matrix file"),
    Opt("decoder", parse_decoders, ("orbgrand", "seg-orbgrand"),
        "orbgrand, seg-orbgrand, a comma list, or both", ",".join),
    Opt("segments", str, "auto", "auto, none, or explicit sets like 1,3,6/2,4,7/5,8"),
    Opt("max-p", _positive_int, 3, "largest segment count tried by auto"),
    Opt("ebno", parse_ebno, (5.0,), "Eb/N0 in dB: start:stop:step or comma list", fmt_ebno),
    Opt("max-queries", _positive_int, 100000, "abandonment threshold b"),
    Opt("trials", _positive_int, 1000, "trials per point"),
    Opt("seed", int, 0, "64-bit seed"),
    Opt("eps", float, None, "tuning reliability threshold (enables tuning with --rho)"),
    Opt("rho", float, None, "tuning normalisation factor"),
    Opt("min-errors", int, 0, "extend a point until this many block errors"),
    Opt("max-trials", _positive_int, None, "cap when extending"),
    Opt("threads", _positive_int, None, "worker processes (default GRANDLAB_THREADS or CPU count)"),
    Opt("out", str, None, "CSV path (default stdout)"),
    Opt("svg", str, None, "optional SVG plot path"),
]

DECODE_OPTS = [
    Opt("code", str, "ebch128_106", "registry name or matrix file"),
    Opt("decoder", str, "seg-orbgrand", "orbgrand or seg-orbgrand"),
    Opt("segments", str, "auto", "auto, none, or explicit sets"),
    Opt("max-p", _positive_int, 3, "largest segment count tried by auto"),
    Opt("input", str, "-", "file with one received value per line (- for stdin)"),
    Opt("max-queries", _positive_int, 100000, "abandonment threshold b"),
    Opt("eps", float, None, "tuning threshold"),
    Opt("rho", float, None, "tuning normalisation factor"),
    Opt("ebno", float, None, "Eb/N0 in dB, needed to derive sigma for tuning"),
]

SEGMENT_OPTS = [
    Opt("code", str, "ebch128_106", "registry name or matrix file"),
    Opt("segments", str, "auto", "auto, none, or explicit sets"),
    Opt("max-p", _positive_int, 3, "largest segment count"),
]

PARTITION_OPTS = [
    Opt("kind", str, "distinct", "distinct, fixed, parity or level1"),
    Opt("w", int, None, "weight to partition"),
    Opt("t", _positive_int, None, "number of parts (fixed)"),
    Opt("p-max", _positive_int, None, "largest part (default w)"),
    Opt("parity", str, "any", "even, odd or any (parity)"),
    Opt("parities", parse_parities, None, "per-segment parities (level1)",
        lambda v: ",".join(p.value for p in v)),
    Opt("lengths", parse_ints, None, "segment lengths (level1)", lambda v: ",".join(map(str, v))),
    Opt("tau", parse_ints, None, "per-segment offsets (level1)", lambda v: ",".join(map(str, v))),
]

CODES_OPTS = [
    Opt("export", str, None, "write this code's parity-check matrix to --out"),
    Opt("out", str, None, "output path for --export"),
]

COMMANDS = {
    "simulate": (SIMULATE_OPTS, "run a Monte Carlo simulation and emit CSV"),
    "decode": (DECODE_OPTS, "decode one received vector, print a JSON line"),
    "segment": (SEGMENT_OPTS, "show the segmentation of a code"),
    "partitions": (PARTITION_OPTS, "list partitions or sub-weight vectors"),
    "codes": (CODES_OPTS, "list built-in codes"),
}


def build_parser() -> _Parser:
    parser = _Parser(prog="grandlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (opts, help_) in COMMANDS.items():
        p = sub.add_parser(name, help=help_, description=help_)
        p.add_argument("--config", help="key=value file; flags override it")
        p.add_argument("--dump-config", action="store_true",
                       help="print the effective configuration and exit")
        for o in opts:
            # raw strings here; parsing happens after the merge with --config
            p.add_argument(f"--{o.name}", dest=o.name, default=None, help=o.help)
    return parser


def read_config(path: str, opts) -> dict[str, str]:
    known = {o.name for o in opts}
    out = {}
    try:
        lines = open(path).read().splitlines()
    except OSError as exc:
        raise CliError(f"cannot read config {path}: {exc}") from exc
    for num, line in enumerate(lines, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CliError(f"{path}:{num}: expected key=value")
        key, value = (x.strip() for x in line.split("=", 1))
        key = key.replace("_", "-")
        if key not in known:
            raise CliError(f"{path}:{num}: unknown key {key!r}")
        out[key] = value
    return out


def effective_config(args, opts) -> dict[str, Any]:
    raw = read_config(args.config, opts) if args.config else {}
    for o in opts:
        v = getattr(args, o.name)
        if v is not None:
            raw[o.name] = v
    cfg = {}
    for o in opts:
        if o.name in raw and raw[o.name] != "":
            try:
                cfg[o.name] = o.parse(raw[o.name])
            except (ValueError, CliError) as exc:
                raise CliError(f"--{o.name}: {exc}") from exc
        else:
            cfg[o.name] = o.default
    return cfg


def dump_config(cfg: dict, opts) -> str:
    lines = []
    for o in opts:
        v = cfg[o.name]
        lines.append(f"{o.name}=" + ("" if v is None else o.fmt(v)))
    return "\n".join(lines) + "\n"


def _tuning(cfg) -> tuple[float, float] | None:
    eps, rho = cfg["eps"], cfg["rho"]
    if (eps is None) != (rho is None):
        raise CliError("tuning needs both --eps and --rho")
    return None if eps is None else (eps, rho)


def _emit(text: str, path: str | None) -> None:
    if path:
        atomic_write(path, text)
    else:
        sys.stdout.write(text)


# --- subcommands ---------------------------------------------------------------

def cmd_simulate(cfg) -> int:
    tc = TrialConfig(
        code=cfg["code"], decoders=cfg["decoder"], segments=cfg["segments"],
        max_p=cfg["max-p"], ebno=cfg["ebno"], b=cfg["max-queries"], trials=cfg["trials"],
        seed=cfg["seed"], tuning=_tuning(cfg), min_errors=cfg["min-errors"],
        max_trials=cfg["max-trials"], threads=cfg["threads"],
    )
    try:
        tc.validate()
        get_code(tc.code)
    except (ConfigError, CodeError) as exc:
        raise CliError(str(exc)) from exc

    def progress(row):
        print(f"{row.decoder} {row.ebno_db:g} dB: trials={row.trials} bler={row.bler:.3e} "
              f"avg_queries={row.avg_queries:.1f} ({row.wall_time:.1f}s)", file=sys.stderr)

    report = run_trials(tc, progress)
    _emit(report.to_csv(), cfg["out"])
    if cfg["svg"]:
        plot_report(report, cfg["svg"])
    return 0


def _read_vector(path: str) -> np.ndarray:
    text = sys.stdin.read() if path == "-" else open(path).read()
    try:
        vals = [float(x) for x in text.split()]
    except ValueError as exc:
        raise CliError(f"input must hold real numbers: {exc}") from exc
    return np.array(vals)


def cmd_decode(cfg) -> int:
    from .decode import Tuning, orbgrand, segmented_orbgrand

    try:
        code = get_code(cfg["code"])
    except CodeError as exc:
        raise CliError(str(exc)) from exc
    r = _read_vector(cfg["input"])
    if r.shape != (code.n,):
        raise CliError(f"expected {code.n} values, got {r.size}")
    b = cfg["max-queries"]
    if cfg["decoder"] == "orbgrand":
        res = orbgrand(code, r, b)
    elif cfg["decoder"] == "seg-orbgrand":
        seg = resolve_segmentation(code, parse_segments(cfg["segments"]), cfg["max-p"])
        tun = _tuning(cfg)
        tuning = None
        if tun:
            if cfg["ebno"] is None:
                raise CliError("tuning needs --ebno to derive sigma")
            tuning = Tuning(tun[0], tun[1], ebno_to_sigma(cfg["ebno"], code.rate))
        res = segmented_orbgrand(code, seg, r, b, tuning)
    else:
        raise CliError(f"unknown decoder {cfg['decoder']!r}")
    print(json.dumps(res.to_record()))
    return 0


def cmd_segment(cfg) -> int:
    try:
        code = get_code(cfg["code"])
        seg = resolve_segmentation(code, parse_segments(cfg["segments"]), cfg["max-p"])
    except (CodeError, ConfigError) as exc:
        raise CliError(str(exc)) from exc
    print(f"code {code.name} n={code.n} k={code.k}")
    print(seg.describe())
    return 0


def cmd_partitions(cfg) -> int:
    kind, w = cfg["kind"], cfg["w"]
    if w is None or w < 0:
        raise CliError("--w must be a non-negative integer")
    p_max = cfg["p-max"] if cfg["p-max"] is not None else max(w, 1)
    if kind == "distinct":
        stream = distinct_partitions(w, p_max)
    elif kind == "fixed":
        if cfg["t"] is None:
            raise CliError("--t is required for --kind fixed")
        stream = fixed_count_partitions(w, cfg["t"], p_max)
    elif kind == "parity":
        try:
            parity = Parity(cfg["parity"].lower())
        except ValueError as exc:
            raise CliError(f"bad --parity {cfg['parity']!r}") from exc
        stream = parity_partitions(w, parity, p_max)
    elif kind == "level1":
        parities, lengths = cfg["parities"], cfg["lengths"]
        if not parities or not lengths or len(parities) != len(lengths):
            raise CliError("level1 needs --parities and --lengths of equal size")
        tau = cfg["tau"]
        if tau is not None and len(tau) != len(lengths):
            raise CliError("--tau needs one value per segment")
        offsets = TuningOffsets(tuple(tau)) if tau else None
        for vec in level1_compositions(w, parities, segment_caps(lengths), offsets):
            f = "".join(map(str, vec.base.f))
            print(f"base={f} min={vec.base.min_total} w=" + ",".join(map(str, vec.w)))
        return 0
    else:
        raise CliError(f"unknown --kind {kind!r}")
    for part in stream:
        print(" ".join(map(str, part)) if part else "-")
    return 0


def cmd_codes(cfg) -> int:
    if cfg["export"]:
        if not cfg["out"]:
            raise CliError("--export needs --out")
        try:
            save_code(get_code(cfg["export"]), cfg["out"])
        except CodeError as exc:
            raise CliError(str(exc)) from exc
        return 0
    for name in REGISTRY:
        c = get_code(name)
        print(f"{name}\tn={c.n}\tk={c.k}\trate={c.rate:.4f}")
    return 0


HANDLERS = {
    "simulate": cmd_simulate,
    "decode": cmd_decode,
    "segment": cmd_segment,
    "partitions": cmd_partitions,
    "codes": cmd_codes,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        opts = COMMANDS[args.command][0]
        cfg = effective_config(args, opts)
        if args.dump_config:
            sys.stdout.write(dump_config(cfg, opts))
            return 0
        return HANDLERS[args.command](cfg)
    except CliError as exc:
        print(f"grandlab: error: {exc}", file=sys.stderr)
        return 1
    except (KeyboardInterrupt, BrokenPipeError):
        return 2
    except (OSError, CodeError, GF2Error, ValueError, RuntimeError, ArithmeticError) as exc:
        print(f"grandlab: failed: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
