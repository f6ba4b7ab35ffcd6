"""Command-line front end.

Exit status: 0 success, 1 bad input or flags, 2 degenerate curve, 3 curves not equivalent.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from typing import Sequence

from . import io
from .canonical import classify_case, generate_canonical
from .curve_model import EPS_DET, MIN_SAMPLES, SampledCurve, resample_uniform
from .errors import AffineCurveError, DegenerateCurve, NonUniformGrid
from .group import apply, random_map
from .invariants import signature
from .reconstruction import NaturalEquations, reconstruct_curve, verify_equivalence

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_DEGENERATE = 2
EXIT_NOT_EQUIVALENT = 3


@dataclass(frozen=True)
class Config:
    tolerance: float = 1e-3
    samples: int = 400
    eps_det: float = EPS_DET
    seed: int = 0

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.samples < MIN_SAMPLES:
            raise ValueError(f"samples must be at least {MIN_SAMPLES}")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _load_curve(path: str, config: Config, resample: bool) -> SampledCurve:
    curve = io.read_curve_csv(path)
    if curve.uniform_step is None:
        if not resample:
            raise NonUniformGrid(f"{path}: parameter grid is not uniform; pass --resample to resample it")
        curve = resample_uniform(curve, max(config.samples, len(curve)), method="local")
    return curve


def _signature_samples(curve: SampledCurve, config: Config) -> int:
    return max(config.samples, len(curve))


def _target(out: str | None):
    return sys.stdout if out is None or out == "-" else out


def _notice_stream(out: str | None):
    # Keep stdout clean for CSV when the data itself goes there.
    return sys.stderr if out is None or out == "-" else sys.stdout


def cmd_signature(path: str, out: str | None, config: Config, resample: bool = False) -> int:
    curve = _load_curve(path, config, resample)
    sig = signature(curve, _signature_samples(curve, config), config.eps_det)
    io.write_signature_csv(_target(out), sig)
    return EXIT_OK


def cmd_synthesize(chi1: float, chi2: float, sigma_max: float, out: str | None, config: Config) -> int:
    curve = generate_canonical(chi1, chi2, sigma_max, config.samples)
    io.write_curve_csv(_target(out), curve)
    print(classify_case(chi1, chi2), file=_notice_stream(out))
    return EXIT_OK


def cmd_compare(path_a: str, path_b: str, config: Config, resample: bool = False) -> int:
    a = _load_curve(path_a, config, resample)
    b = _load_curve(path_b, config, resample)
    n = max(_signature_samples(a, config), _signature_samples(b, config))
    report = verify_equivalence(a, b, config.tolerance, n, config.eps_det)
    print(json.dumps(report.to_dict()))
    return EXIT_OK if report.equivalent else EXIT_NOT_EQUIVALENT


def cmd_reconstruct(path: str, out: str | None, config: Config) -> int:
    sig = io.read_signature_csv(path)
    curve = reconstruct_curve(NaturalEquations.from_signature(sig))
    io.write_curve_csv(_target(out), curve)
    return EXIT_OK


def cmd_transform(path: str, map_path: str | None, out: str | None, config: Config) -> int:
    # Maps act pointwise, so any parameter grid is fine here.
    curve = io.read_curve_csv(path)
    if map_path is not None:
        m = io.read_map_json(map_path)
    else:
        m = random_map(config.seed)
        print(json.dumps(m.to_dict()), file=_notice_stream(out))
    io.write_curve_csv(_target(out), apply(m, curve))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=Config.tolerance, help="equivalence tolerance on curvatures")
    common.add_argument("--samples", type=int, default=Config.samples, help="grid size for generated and resampled curves")
    common.add_argument("--eps-det", type=float, default=Config.eps_det, help="nondegeneracy threshold")
    common.add_argument("--seed", type=int, default=None, help="seed for a random special affine map")
    common.add_argument("--out", default=None, help="output path (default: standard output)")
    common.add_argument("--resample", action="store_true", help="resample a non-uniform input grid (local degree-7 interpolation)")

    parser = _Parser(prog="affine-curves", description="Special affine invariants of space curves.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("signature", parents=[common], help="arc length and curvatures of a curve CSV")
    p.add_argument("input")

    p = sub.add_parser("synthesize", parents=[common], help="canonical curve with constant curvatures")
    p.add_argument("--chi1", type=float, required=True)
    p.add_argument("--chi2", type=float, required=True)
    p.add_argument("--sigma-max", type=float, default=3.0)
    p.add_argument("--case", action="store_true", help="only print the case label")

    p = sub.add_parser("compare", parents=[common], help="decide special affine equivalence of two curves")
    p.add_argument("a")
    p.add_argument("b")

    p = sub.add_parser("reconstruct", parents=[common], help="curve from a signature CSV")
    p.add_argument("input")

    p = sub.add_parser("transform", parents=[common], help="apply a special affine map to a curve")
    p.add_argument("input")
    p.add_argument("--map", dest="map_path", default=None, help="map JSON {\"B\": [...9], \"tau\": [...3]}")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = Config(args.tol, args.samples, args.eps_det, 0 if args.seed is None else args.seed)
    except ValueError as exc:
        parser.error(str(exc))
    try:
        if args.command == "signature":
            return cmd_signature(args.input, args.out, config, args.resample)
        if args.command == "synthesize":
            if args.case:
                print(classify_case(args.chi1, args.chi2))
                return EXIT_OK
            return cmd_synthesize(args.chi1, args.chi2, args.sigma_max, args.out, config)
        if args.command == "compare":
            return cmd_compare(args.a, args.b, config, args.resample)
        if args.command == "reconstruct":
            return cmd_reconstruct(args.input, args.out, config)
        if args.map_path is None and args.seed is None:
            parser.error("transform needs --map or --seed")
        if args.map_path is not None and args.seed is not None:
            parser.error("give only one of --map and --seed")
        return cmd_transform(args.input, args.map_path, args.out, config)
    except BrokenPipeError:
        # Reader closed early (e.g. piped into head); not our failure.
        sys.stdout = open(os.devnull, "w")
        return EXIT_OK
    except DegenerateCurve as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (AffineCurveError, OSError, ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
