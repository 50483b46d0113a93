"""Command-line front end.

Subcommands:
    qmap      build and save a per-row quality map
    wspsnr    spherically weighted PSNR report for a pair of raw YUV files
    bdrate    BD-Rate between two rate/quality curve files
    simulate  analytic banded R-D simulation with BD-Rate summary
    bank      inspect or evaluate a vector-bank container

All numeric output uses 6 significant digits unless --precision overrides
it ("full" switches to shortest round-trip repr). Errors go to stderr with
exit code 1; data goes to --out or stdout.
"""

import argparse
import math
import sys

import numpy as np

from . import banks, bdrate, metrics, qpa, rdsim
from .geometry import row_latitudes

__all__ = ["main"]


def _fmt(value, precision):
    if precision == "full":
        return repr(float(value))
    return f"{value:.{precision}g}"


def _precision_arg(text):
    if text == "full":
        return text
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"precision must be an integer or 'full', got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"precision must be >= 1, got {value}")
    return value


def _write_output(text, out_path):
    if out_path is None or out_path == "-":
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="ascii") as f:
            f.write(text)


def _cmd_qmap(args):
    config = qpa.QpaConfig(
        q0=args.q0,
        lambda_min=args.lambda_min,
        lambda_max=args.lambda_max,
        q_num=args.q_num,
    )
    qmap = qpa.build_quality_map(args.rows, config, clamp=args.clamp)
    qpa.save_quality_map(qmap, args.out)
    p = args.precision
    print(f"rows = {qmap.rows}")
    print(f"q_tilde_min = {_fmt(qmap.q_tilde.min(), p)}")
    print(f"q_tilde_max = {_fmt(qmap.q_tilde.max(), p)}")
    print(f"q_tilde_mean = {_fmt(qmap.q_tilde.mean(), p)}")
    print(f"mean_delta_q = {_fmt(qpa.mean_delta_q(config), p)}")
    return 0


def _cmd_wspsnr(args):
    count = args.frames
    if count is None:
        probe = metrics.VideoSpec(
            width=args.width, height=args.height, bit_depth=args.bit_depth, frame_count=1
        )
        count = min(
            metrics.probe_frame_count(args.ref, probe),
            metrics.probe_frame_count(args.test, probe),
        )
        if count == 0:
            raise ValueError("no complete frame in the input files at this geometry")
    spec = metrics.VideoSpec(
        width=args.width, height=args.height, bit_depth=args.bit_depth, frame_count=count
    )
    report = metrics.sequence_metrics(args.ref, args.test, spec)
    _write_output(metrics.render_report(report, precision=args.precision), args.out)
    return 0


def _cmd_bdrate(args):
    ref = bdrate.load_curve(args.ref_curve)
    test = bdrate.load_curve(args.test_curve)
    value = bdrate.bd_rate(ref, test, method=args.method)
    text = f"{value:+.2f}%"
    if text == "-0.00%":
        text = "+0.00%"
    print(text)
    return 0


def _lambda0_list(text):
    try:
        values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad lambda0 list {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty lambda0 list")
    return values


def _cmd_simulate(args):
    model = rdsim.RdModel(scale=args.scale, decay=args.decay)
    latitudes = row_latitudes(args.bands)
    result = rdsim.simulate_bd_gain(model, latitudes, args.lambda0)
    _write_output(rdsim.render_simulation_report(result, precision=args.precision), args.out)
    return 0


def _cmd_bank(args):
    bank_set = banks.load_bank_set(args.bank_file)
    if args.subaction == "info":
        print(f"q_num = {bank_set.encoder.q_num}")
        for name in banks.BANK_ORDER:
            bank = getattr(bank_set, name)
            print(f"{name}: channels = {bank.channels}")
        return 0

    bank = getattr(bank_set, args.which)
    p = args.precision
    if args.subaction == "interp":
        if args.q_tilde is None:
            raise ValueError("interp needs --q-tilde")
        vector = banks.interpolate(bank, args.q_tilde)
        _write_output(" ".join(_fmt(v, p) for v in vector) + "\n", args.out)
        return 0

    # rowmod
    if args.qmap_file is None:
        raise ValueError("rowmod needs --qmap-file")
    qmap = qpa.load_quality_map(args.qmap_file)
    matrix = banks.row_modulation_matrix(bank, qmap)
    lines = [" ".join(_fmt(v, p) for v in row) for row in matrix]
    _write_output("\n".join(lines) + "\n", args.out)
    return 0


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="qpa360",
        description="Latitude-adaptive quality tooling for equirectangular video.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("qmap", help="build a per-row quality map")
    p.add_argument("--rows", type=int, required=True, help="ERP row count")
    p.add_argument("--q0", type=float, required=True, help="base quality parameter")
    p.add_argument("--lambda-min", type=float, default=1.0)
    p.add_argument("--lambda-max", type=float, default=768.0)
    p.add_argument("--q-num", type=int, default=64)
    p.add_argument("--clamp", action="store_true", help="clip to [0, q_num-1]")
    p.add_argument("--out", required=True, help="quality-map file to write")
    p.add_argument("--precision", type=_precision_arg, default=6)
    p.set_defaults(func=_cmd_qmap)

    p = sub.add_parser("wspsnr", help="weighted PSNR report for raw YUV 4:2:0 files")
    p.add_argument("--ref", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--bit-depth", type=int, choices=(8, 10), default=8)
    p.add_argument("--frames", type=int, default=None, help="default: all complete frames")
    p.add_argument("--out", default=None, help="report file (default stdout)")
    p.add_argument("--precision", type=_precision_arg, default=6)
    p.set_defaults(func=_cmd_wspsnr)

    p = sub.add_parser("bdrate", help="BD-Rate between two curve files")
    p.add_argument("--ref-curve", required=True)
    p.add_argument("--test-curve", required=True)
    p.add_argument("--method", choices=("pchip", "cubic"), default="pchip")
    p.set_defaults(func=_cmd_bdrate)

    p = sub.add_parser("simulate", help="banded R-D simulation with BD summary")
    p.add_argument("--bands", type=int, required=True, help="latitude band count (ERP rows)")
    p.add_argument("--scale", type=float, required=True, help="distortion at zero rate")
    p.add_argument("--decay", type=float, required=True, help="exponential decay per rate unit")
    p.add_argument(
        "--lambda0",
        type=_lambda0_list,
        required=True,
        help="comma-separated base multiplier sweep (>= 4 values)",
    )
    p.add_argument("--out", default=None, help="report file (default stdout)")
    p.add_argument("--precision", type=_precision_arg, default=6)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("bank", help="inspect or evaluate a vector-bank container")
    p.add_argument("subaction", choices=("info", "interp", "rowmod"))
    p.add_argument("--bank-file", required=True)
    p.add_argument("--which", choices=banks.BANK_ORDER, default="encoder")
    p.add_argument("--q-tilde", type=float, default=None, help="quality position for interp")
    p.add_argument("--qmap-file", default=None, help="quality map for rowmod")
    p.add_argument("--out", default=None, help="output file (default stdout)")
    p.add_argument("--precision", type=_precision_arg, default=6)
    p.set_defaults(func=_cmd_bank)

    return parser


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
