"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 I/O error, 3 solver failure.
"""

import argparse
import math
import sys

from . import conv, io
from .errors import (
    ConfigError,
    DegenerateInputError,
    DegenerateKernelError,
    ImageIOError,
    InvalidInputError,
    SolverFailure,
)
from .graph import weight_histogram
from .kernel import KernelSolveParams, solve_kernel
from .metrics import psnr
from .pipeline import SolverParams, deblur_blind, read_config
from .skeleton import write_trace_csv
from .synth import SynthSpec, parse_kernel_spec, synth_blur

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_SOLVER = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _odd_int(text):
    value = int(text)
    if value < 1 or value % 2 == 0:
        raise argparse.ArgumentTypeError(f"{text} is not a positive odd integer")
    return value


def _int_tuple(n):
    def parse(text):
        parts = text.split(",")
        if len(parts) != n:
            raise argparse.ArgumentTypeError(f"expected {n} comma-separated values")
        return tuple(int(p) for p in parts)
    return parse


def _float_pair(text):
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected lo,hi")
    return tuple(float(p) for p in parts)


def _load_kernel_arg(spec):
    try:
        return parse_kernel_spec(spec)
    except FileNotFoundError:
        raise ImageIOError(spec, "no such kernel file") from None
    except InvalidInputError as exc:
        if spec.startswith("builtin:"):
            raise
        raise ImageIOError(spec, str(exc)) from None


def cmd_blur(args):
    kernel = _load_kernel_arg(args.kernel)
    sharp = io.read_image(args.input)
    blurred = synth_blur(sharp, SynthSpec(kernel, args.noise_sigma, args.seed))
    io.save_image(blurred, args.output)


def cmd_deblur(args):
    if args.config:
        try:
            params = read_config(args.config, kernel_size=args.kernel_size)
        except FileNotFoundError:
            raise ImageIOError(args.config, "no such config file") from None
    else:
        params = SolverParams(kernel_size=args.kernel_size)
    blurry = io.read_image(args.input)
    log = [] if args.trace else None
    result = deblur_blind(blurry, params, log=log)
    io.save_image(result.restored, args.output)
    try:
        conv.write_kernel(result.kernel, args.kernel_out)
        if args.trace:
            write_trace_csv(log, args.trace)
    except OSError as exc:
        raise ImageIOError(exc.filename or args.kernel_out, exc.strerror or str(exc)) from None
    if args.kernel_pgm:
        io.save_kernel_image(result.kernel, args.kernel_pgm)
    for i, level in enumerate(result.levels):
        for warning in level.warnings:
            print(f"warning: level {i}: {warning}", file=sys.stderr)


def cmd_kernel_estimate(args):
    sharp = io.load_image(args.sharp)
    blurry = io.load_image(args.blurry)
    k = solve_kernel(sharp, blurry, KernelSolveParams(mu=args.mu, kernel_size=args.kernel_size))
    try:
        conv.write_kernel(k, args.output)
    except OSError as exc:
        raise ImageIOError(args.output, exc.strerror or str(exc)) from None


def cmd_analyze(args):
    img = io.load_image(args.input)
    hist = weight_histogram(
        img, region=args.region, bins=args.bins, mid_band=args.mid_band,
        sigma=args.sigma, axis=args.axis,
    )
    try:
        hist.write_csv(args.output)
    except OSError as exc:
        raise ImageIOError(args.output, exc.strerror or str(exc)) from None


def cmd_psnr(args):
    value = psnr(io.load_image(args.a), io.load_image(args.b))
    print("inf" if math.isinf(value) else f"{value:.4f}")


def build_parser():
    parser = _Parser(prog="rgtv-deblur", description="Blind deblurring with reweighted graph TV.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("blur", help="synthesize a blurry, noisy image")
    p.add_argument("--input", required=True)
    p.add_argument("--kernel", required=True,
                   help="kernel file or builtin:gaussian:<std> | builtin:motion:<len>,<deg> | builtin:disk:<r>")
    p.add_argument("--noise-sigma", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_blur)

    p = sub.add_parser("deblur", help="estimate the kernel and restore the image")
    p.add_argument("--input", required=True)
    p.add_argument("--kernel-size", type=_odd_int, required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--kernel-out", required=True)
    p.add_argument("--config")
    p.add_argument("--trace", help="CSV of primal-dual iterations")
    p.add_argument("--kernel-pgm", help="also write the kernel as a viewable image")
    p.set_defaults(func=cmd_deblur)

    p = sub.add_parser("kernel-estimate", help="kernel from a sharp/blurry pair")
    p.add_argument("--sharp", required=True)
    p.add_argument("--blurry", required=True)
    p.add_argument("--kernel-size", type=_odd_int, required=True)
    p.add_argument("--mu", type=float, default=0.05)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_kernel_estimate)

    p = sub.add_parser("analyze", help="edge-weight histogram of an image region")
    p.add_argument("--input", required=True)
    p.add_argument("--region", type=_int_tuple(4), metavar="X,Y,W,H")
    p.add_argument("--bins", type=int, default=20)
    p.add_argument("--output", required=True)
    p.add_argument("--sigma", type=float, default=0.1)
    p.add_argument("--mid-band", type=_float_pair, default=(0.2, 0.8), metavar="LO,HI")
    p.add_argument("--axis", choices=("weight", "difference"), default="weight")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("psnr", help="PSNR between two images, in dB")
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(func=cmd_psnr)
    return parser


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (InvalidInputError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ImageIOError, OSError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (SolverFailure, DegenerateInputError, DegenerateKernelError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
