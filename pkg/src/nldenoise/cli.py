"""Command-line front door: corrupt, denoise, evaluate, and bench over PNM files.

Exit codes: 0 success, 1 usage error (bad flags or values, nothing
touched), 2 I/O or data error. All flag values are validated before any
file is opened, and no command ever modifies its input files.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .bench import emit_csv, emit_plot_data, load_config, run_bench
from .filters import DEFAULT_MSMF_T, FILTER_KINDS, FilterId, apply_filter, backend_name
from .image import check_border, check_mask
from .metrics import check_peak, mse, psnr
from .noise import NoiseSpec, apply_noise
from .pnm import read_pnm, write_pnm

_EPILOG = """\
filters:     mean, median, cmf, vmf, smf, msmf:T (default T=4)
noise kinds: gaussian:<variance>, speckle:<variance>, sp:<density>, each optionally :<seed>
defaults:    mask 3, border replicate (of replicate|reflect|zero), peak 256
"""


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


def _fmt(value: float) -> str:
    import math
    return "inf" if math.isinf(value) else f"{value:.6f}"


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="nldenoise",
        description="Nonlinear denoising filters, noise injection, and PSNR/MSE benchmarking for binary PGM/PPM images.",
        epilog=_EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"nldenoise {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    corrupt = sub.add_parser("corrupt", help="inject noise into an image", epilog=_EPILOG,
                             formatter_class=argparse.RawDescriptionHelpFormatter)
    corrupt.add_argument("--in", dest="in_path", required=True, help="input PGM/PPM")
    corrupt.add_argument("--out", dest="out_path", required=True, help="output PGM/PPM")
    corrupt.add_argument("--noise", required=True, help="noise spec kind:param[:seed]")
    corrupt.add_argument("--seed", type=int, default=None, help="RNG seed (overrides the spec's seed)")
    corrupt.add_argument("--per-channel", action="store_true",
                         help="salt & pepper: corrupt samples independently instead of whole pixels")

    denoise = sub.add_parser("denoise", help="apply one filter to an image", epilog=_EPILOG,
                             formatter_class=argparse.RawDescriptionHelpFormatter)
    denoise.add_argument("--in", dest="in_path", required=True, help="input PGM/PPM")
    denoise.add_argument("--out", dest="out_path", required=True, help="output PGM/PPM")
    denoise.add_argument("--filter", required=True, help=f"one of {', '.join(FILTER_KINDS)} (msmf accepts msmf:T)")
    denoise.add_argument("--mask", type=int, default=3, help="odd mask side (default 3)")
    denoise.add_argument("--T", dest="threshold", type=int, default=None,
                         help=f"msmf keep-threshold (default {DEFAULT_MSMF_T})")
    denoise.add_argument("--border", default="replicate", help="replicate | reflect | zero (default replicate)")

    evaluate = sub.add_parser("evaluate", help="print mse/psnr of a candidate against a reference")
    evaluate.add_argument("--reference", required=True, help="clean reference PGM/PPM")
    evaluate.add_argument("--candidate", required=True, help="image to score")
    evaluate.add_argument("--peak", type=int, default=256, help="PSNR peak, 255 or 256 (default 256)")

    bench = sub.add_parser("bench", help="run a corrupt/filter/score grid from a config file")
    bench.add_argument("--config", required=True, help="path to the flat key = value bench config")

    return parser


def _usage_check(fn, *args, **kwargs):
    """Run a validator/parser; bad values become usage errors, not data errors."""
    try:
        return fn(*args, **kwargs)
    except ValueError as exc:
        raise _UsageError(str(exc)) from None


def _cmd_corrupt(args) -> int:
    spec = _usage_check(NoiseSpec.parse, args.noise)
    seed = args.seed if args.seed is not None else spec.seed
    if seed is None:
        raise _UsageError("corrupt needs a seed: pass --seed or use kind:param:seed")
    spec = _usage_check(NoiseSpec, spec.kind, spec.param, seed)
    img = read_pnm(args.in_path)
    write_pnm(args.out_path, apply_noise(img, spec, per_channel=args.per_channel))
    return 0


def _cmd_denoise(args) -> int:
    if args.filter == "msmf" and args.threshold is not None:
        f = _usage_check(FilterId, "msmf", args.threshold)
    else:
        f = _usage_check(FilterId.parse, args.filter)
    if ":" in args.filter and args.threshold is not None and f.t != args.threshold:
        raise _UsageError(f"--T {args.threshold} conflicts with --filter {args.filter}")
    if args.threshold is not None and f.kind != "msmf":
        raise _UsageError(f"--T only applies to msmf, not {f.kind}")
    k = args.mask
    _usage_check(check_mask, k)
    _usage_check(check_border, args.border)
    if f.kind == "msmf":
        if f.t > k * k:
            raise _UsageError(f"msmf threshold {f.t} exceeds window size {k * k}")
        if args.threshold is None and ":" not in args.filter:
            print(f"denoise: using default msmf threshold T={f.t}", file=sys.stderr)
    img = read_pnm(args.in_path)
    write_pnm(args.out_path, apply_filter(img, f, k, args.border))
    return 0


def _cmd_evaluate(args) -> int:
    _usage_check(check_peak, args.peak)
    reference = read_pnm(args.reference)
    candidate = read_pnm(args.candidate)
    m = mse(reference, candidate)
    print(f"mse={_fmt(m)} psnr={_fmt(psnr(m, args.peak))}")
    return 0


def _cmd_bench(args) -> int:
    cfg = load_config(args.config)
    result = run_bench(cfg)
    for err in result.errors:
        print(f"bench: skipped {err}", file=sys.stderr)
    emit_csv(result.rows, result.summary, cfg.csv_path)
    emit_plot_data(result.summary, cfg.plot_path)
    print(f"bench: backend={backend_name()} rows={len(result.rows)} "
          f"csv={cfg.csv_path} plot={cfg.plot_path}", file=sys.stderr)
    return 2 if result.errors else 0


_COMMANDS = {
    "corrupt": _cmd_corrupt,
    "denoise": _cmd_denoise,
    "evaluate": _cmd_evaluate,
    "bench": _cmd_bench,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"nldenoise {args.command}: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"nldenoise {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
