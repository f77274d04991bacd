"""Command-line interface.

Subcommands: estimate, sketch, merge, ncd, matrix, exact, dk.
Exit codes: 0 success, 1 usage or invalid parameters, 2 I/O or file format,
3 parameter mismatch between sketches, 4 declared capacity exceeded.
"""

from __future__ import annotations

import argparse
import os
import secrets
import sys
from fractions import Fraction

from . import _kernel
from .errors import (
    CapacityExceededError,
    DeltaSketchError,
    InvalidParameterError,
    ParameterMismatchError,
    SketchFormatError,
)
from .ncd import ncd_from_sketches, ncd_matrix, write_phylip, write_tsv
from .oracle import exact_profile
from .sketch import DEFAULT_SEED, DeltaSketch, SketchParams
from .stream import StreamEstimator

#: -p presets, sparsest to densest sampling.
PRESETS = {1: 1.0, 2: 0.5, 3: 0.25, 4: 0.1, 5: 0.05}

_EXACT_GUARD = 10**6
_READ_CHUNK = 1 << 20


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _add_param_args(sp):
    sp.add_argument("-e", "--epsilon", type=float, default=None,
                    help="relative error target (default 0.2)")
    sp.add_argument("-p", "--preset", type=int, choices=sorted(PRESETS),
                    default=None, help="precision preset, 1 (sparsest) to 5")
    sp.add_argument("--registers", type=int, default=14, metavar="P",
                    help="log2 of the register count per length (default 14)")
    sp.add_argument("--seed", default=None,
                    help="64-bit hash seed, or 'random' (default: fixed)")
    sp.add_argument("-t", "--threads", type=int, default=0,
                    help="worker threads, 0 = all cores (default 0)")


def _add_stream_args(sp):
    sp.add_argument("--n-max", type=int, default=None,
                    help="upper bound on stream length; required for stdin, "
                         "defaults to file size otherwise")
    sp.add_argument("--window", type=int, default=None, metavar="K",
                    help="override the sliding-window capacity")
    sp.add_argument("--rlbwt", action="store_true",
                    help="track window lengths beyond the window via a "
                         "run-length BWT (off by default)")


def _resolve_seed(arg) -> int:
    if arg is None:
        return DEFAULT_SEED
    if arg == "random":
        return secrets.randbits(64)
    return int(arg, 0) & 0xFFFFFFFFFFFFFFFF


def _resolve_params(args, n_max: int) -> SketchParams:
    epsilon = 0.2
    if args.preset is not None:
        epsilon = PRESETS[args.preset]
    if args.epsilon is not None:
        epsilon = args.epsilon
    return SketchParams(epsilon=epsilon, n_max=max(2, n_max),
                        p=args.registers, seed=_resolve_seed(args.seed))


def _input_bound(args, parser) -> int:
    if args.n_max is not None:
        if args.n_max < 1:
            parser.error("--n-max must be positive")
        return args.n_max
    if args.input == "-":
        parser.error("--n-max is required when reading standard input")
    return os.path.getsize(args.input)


def _stream_input(args, est: StreamEstimator) -> None:
    if args.input == "-":
        src = sys.stdin.buffer
        while True:
            chunk = src.read(_READ_CHUNK)
            if not chunk:
                break
            est.feed(chunk)
    else:
        with open(args.input, "rb") as fh:
            while True:
                chunk = fh.read(_READ_CHUNK)
                if not chunk:
                    break
                est.feed(chunk)


def _read_bytes(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    with open(path, "rb") as fh:
        return fh.read()


def _load_sketch(path: str) -> DeltaSketch:
    with open(path, "rb") as fh:
        return DeltaSketch.from_bytes(fh.read())


def _write_text(path, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _guard_exact(data: bytes, args, parser) -> None:
    if len(data) > _EXACT_GUARD and not args.force:
        parser.error(f"input has {len(data)} bytes; exact computation is "
                     "quadratic, pass --force to proceed")


# -- subcommand bodies --------------------------------------------------------


def cmd_estimate(args, parser) -> int:
    if args.from_sketch:
        sk = _load_sketch(args.input)
        print(f"{sk.estimate():.6f}")
        return 0
    n = _input_bound(args, parser)
    params = _resolve_params(args, n)
    est = StreamEstimator(params, max(2, n), k_override=args.window,
                          rlbwt_enabled=args.rlbwt)
    _stream_input(args, est)
    value, _ = est.finalize()
    print(f"{value:.6f}")
    return 0


def cmd_sketch(args, parser) -> int:
    n = _input_bound(args, parser)
    params = _resolve_params(args, n)
    est = StreamEstimator(params, max(2, n), k_override=args.window,
                          rlbwt_enabled=args.rlbwt)
    _stream_input(args, est)
    _, sk = est.finalize()
    blob = sk.to_bytes()
    with open(args.output, "wb") as fh:
        fh.write(blob)
    print(f"processed {sk.stream_len} bytes, |A| = {len(sk.A)}, "
          f"wrote {len(blob)} bytes to {args.output}")
    return 0


def cmd_merge(args, parser) -> int:
    sketches = [_load_sketch(p) for p in args.inputs]
    merged = sketches[0]
    for sk in sketches[1:]:
        merged = merged.merge(sk)
    with open(args.output, "wb") as fh:
        fh.write(merged.to_bytes())
    print(f"merged {len(sketches)} sketches into {args.output}")
    return 0


def cmd_ncd(args, parser) -> int:
    sa = _load_sketch(args.a)
    sb = _load_sketch(args.b)
    raw, clamped = ncd_from_sketches(sa, sb)
    print(f"raw = {raw:.6f}")
    print(f"clamped = {clamped:.6f}")
    return 0


def cmd_matrix(args, parser) -> int:
    sketches = [_load_sketch(p) for p in args.inputs]
    names = [os.path.splitext(os.path.basename(p))[0] for p in args.inputs]
    m = ncd_matrix(sketches, names)
    _write_text(args.output, write_tsv(m) if args.tsv else write_phylip(m))
    return 0


def cmd_exact(args, parser) -> int:
    data = _read_bytes(args.input)
    _guard_exact(data, args, parser)
    if not data:
        parser.error("exact delta is undefined for empty input")
    prof = exact_profile(data)
    d: Fraction = prof.delta
    print(f"delta = {d.numerator}/{d.denominator} = {float(d):.6f}, "
          f"k_hat = {prof.k_hat}")
    return 0


def cmd_dk(args, parser) -> int:
    data = _read_bytes(args.input)
    _guard_exact(data, args, parser)
    if not data:
        parser.error("d_k table is undefined for empty input")
    prof = exact_profile(data)
    print(" ".join(f"{k}:{v}" for k, v in enumerate(prof.d, start=1)))
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="deltasketch",
                     description="Substring-complexity estimation from "
                                 "mergeable sketches.")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("estimate", help="print the complexity estimate of a stream")
    sp.add_argument("input", help="input file, or - for stdin")
    sp.add_argument("--from-sketch", action="store_true",
                    help="input is a serialized sketch, not raw bytes")
    _add_param_args(sp)
    _add_stream_args(sp)
    sp.set_defaults(func=cmd_estimate)

    sp = sub.add_parser("sketch", help="stream input and write a sketch file")
    sp.add_argument("input", help="input file, or - for stdin")
    sp.add_argument("-o", "--output", required=True, help="sketch file to write")
    _add_param_args(sp)
    _add_stream_args(sp)
    sp.set_defaults(func=cmd_sketch)

    sp = sub.add_parser("merge", help="merge sketch files")
    sp.add_argument("inputs", nargs="+", help="two or more sketch files")
    sp.add_argument("-o", "--output", required=True, help="merged sketch file")
    sp.set_defaults(func=cmd_merge)

    sp = sub.add_parser("ncd", help="distance between two sketch files")
    sp.add_argument("a")
    sp.add_argument("b")
    sp.set_defaults(func=cmd_ncd)

    sp = sub.add_parser("matrix", help="all-pairs distance matrix from sketch files")
    sp.add_argument("inputs", nargs="+", help="two or more sketch files")
    sp.add_argument("-o", "--output", default=None,
                    help="output path (default stdout)")
    sp.add_argument("--tsv", action="store_true",
                    help="long-form TSV instead of PHYLIP")
    sp.set_defaults(func=cmd_matrix)

    sp = sub.add_parser("exact", help="exact delta by brute force (small inputs)")
    sp.add_argument("input", help="input file, or - for stdin")
    sp.add_argument("--force", action="store_true",
                    help="skip the quadratic-cost size guard")
    sp.set_defaults(func=cmd_exact)

    sp = sub.add_parser("dk", help="exact distinct-substring table (small inputs)")
    sp.add_argument("input", help="input file, or - for stdin")
    sp.add_argument("--force", action="store_true",
                    help="skip the quadratic-cost size guard")
    sp.set_defaults(func=cmd_dk)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code or 0
    if getattr(args, "threads", 0):
        _kernel.set_threads(args.threads)
    try:
        if len(getattr(args, "inputs", ["", ""])) < 2:
            parser.error(f"{args.command} needs at least two sketch files")
        return args.func(args, parser)
    except SystemExit as exc:
        return exc.code or 0
    except ParameterMismatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except CapacityExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except (OSError, SketchFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (InvalidParameterError, DeltaSketchError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
