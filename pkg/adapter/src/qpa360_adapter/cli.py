"""Command line front end: export bank containers, demo quality-map patching."""

import argparse
import sys

import torch

from qpa360 import BANK_ORDER, load_bank_set, load_quality_map

from .checkpoint import CheckpointBankSpec, export_banks
from .modulation import apply_quality_map
from .reference import DEMO_TENSOR_NAMES, ReferenceCodec


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="qpa360-adapter",
        description="Bridge between codec checkpoints and qpa360 containers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_export = sub.add_parser(
        "export", help="extract per-quality vector tables from a checkpoint"
    )
    p_export.add_argument("--checkpoint", required=True, help="torch checkpoint file")
    p_export.add_argument("--out", required=True, help="destination container file")
    for name in BANK_ORDER:
        p_export.add_argument(
            f"--{name}-pattern",
            default=DEMO_TENSOR_NAMES[name],
            help=f"regex selecting the {name} table (default: %(default)s)",
        )
    p_export.set_defaults(func=_cmd_export)

    p_apply = sub.add_parser(
        "apply", help="patch the reference codec with a quality map and run it"
    )
    p_apply.add_argument("--banks", required=True, help="vector bank container")
    p_apply.add_argument("--qmap", required=True, help="quality map file")
    p_apply.add_argument(
        "--quality", type=int, default=0, help="base quality index for the codec"
    )
    p_apply.add_argument(
        "--rows", type=int, default=None, help="latent rows (default: map rows)"
    )
    p_apply.add_argument("--cols", type=int, default=8, help="latent columns")
    p_apply.add_argument(
        "--resample",
        choices=("error", "nearest"),
        default="error",
        help="row-count mismatch policy",
    )
    p_apply.add_argument("--seed", type=int, default=0, help="input latent seed")
    p_apply.set_defaults(func=_cmd_apply)

    return parser


def _cmd_export(args):
    spec = CheckpointBankSpec(
        checkpoint=args.checkpoint,
        encoder_pattern=args.encoder_pattern,
        decoder_pattern=args.decoder_pattern,
        reconstruction_pattern=args.reconstruction_pattern,
        feature_pattern=args.feature_pattern,
    )
    matched = export_banks(spec, args.out)
    bank_set = load_bank_set(args.out)
    print(f"wrote {args.out} (q_num = {bank_set.q_num})")
    for name, tensor_name in zip(BANK_ORDER, matched):
        channels = getattr(bank_set, name).channels
        print(f"{name}: {tensor_name} ({channels} channels)")
    return 0


def _cmd_apply(args):
    qmap = load_quality_map(args.qmap)
    bank_set = load_bank_set(args.banks)
    rows = qmap.rows if args.rows is None else args.rows
    codec = ReferenceCodec(bank_set, args.quality, rows)
    codec.eval()

    gen = torch.Generator().manual_seed(args.seed)
    latent = torch.randn((1, codec.input_channels, rows, args.cols), generator=gen)

    patched = apply_quality_map(codec, args.qmap, args.banks, resample=args.resample)
    with torch.no_grad():
        base_out = codec(latent)
        patched_out = patched(latent)

    diff = (patched_out - base_out).abs().max().item()
    print(f"latent = 1x{codec.input_channels}x{rows}x{args.cols}, map rows = {qmap.rows}")
    print(f"baseline_sum = {base_out.sum().item():.10g}")
    print(f"patched_sum = {patched_out.sum().item():.10g}")
    print(f"max_abs_diff = {diff:.10g}")
    print(f"identical = {'yes' if torch.equal(patched_out, base_out) else 'no'}")
    return 0


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
