"""Command-line interface: finetune and extract."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .backbone import load_backbone, pretrained_backbone, random_backbone, save_backbone
from .errors import LfeError, SplitEmpty
from .extractor import LfeConfig, extract_local, fine_tune
from .files import FEATURE_SET_NAMES, feature_set_paths, load_png, read_manifest, read_split, write_fvec


def _resolve_backbone(args):
    if args.weights is not None:
        return load_backbone(args.weights)
    if args.random_init is not None:
        return random_backbone(args.random_init)
    return pretrained_backbone()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lfe", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("finetune", help="fine-tune the backbone on the finetune split")
    p.add_argument("--manifest", required=True)
    p.add_argument("--split", required=True, help="SPLIT1 file from the pipeline")
    p.add_argument("--feature-images", required=True, help="directory of dumped per-image PNG sets")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epochs", type=int, default=10)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--weights", default=None, help="starting weights file (default: pretrained)")
    p.add_argument("--random-init", type=int, default=None, metavar="SEED",
                   help="start from seeded random weights instead of pretrained")
    p.add_argument("--weights-out", required=True)

    p = sub.add_parser("extract", help="export pooled mid-layer features as FVEC1")
    p.add_argument("--manifest", required=True)
    p.add_argument("--weights", default=None)
    p.add_argument("--random-init", type=int, default=None, metavar="SEED")
    p.add_argument("--feature-images", required=True)
    p.add_argument("--single-set", action="store_true", help="use only the band images (length 1472)")
    p.add_argument("--out", required=True)

    return parser


def cmd_finetune(args) -> int:
    entries = read_manifest(args.manifest)
    tags = read_split(args.split)
    if len(tags) != len(entries):
        raise SplitEmpty(f"split covers {len(tags)} entries, manifest has {len(entries)}")
    net = _resolve_backbone(args)

    images, labels = [], []
    for idx, (_, cls) in enumerate(entries):
        if tags[idx] != "finetune":
            continue
        paths = feature_set_paths(args.feature_images, idx)
        for name in FEATURE_SET_NAMES:
            images.append(load_png(paths[name]))
            labels.append(cls)
    if not images:
        raise SplitEmpty("no finetune-tagged entries in the split")

    config = LfeConfig(epochs=args.epochs, batch_size=args.batch_size, seed=args.seed)
    losses = fine_tune(images, labels, config, net)
    save_backbone(net, args.weights_out, seed=args.seed)
    shown = ", ".join(f"{v:.4f}" for v in losses) if losses else "none (0 epochs)"
    print(f"wrote {args.weights_out} (epoch losses: {shown})")
    return 0


def cmd_extract(args) -> int:
    entries = read_manifest(args.manifest)
    net = _resolve_backbone(args)
    names = FEATURE_SET_NAMES[:1] if args.single_set else FEATURE_SET_NAMES
    rows = []
    for idx in range(len(entries)):
        paths = feature_set_paths(args.feature_images, idx)
        rows.append(extract_local([load_png(paths[name]) for name in names], net))
    vectors = np.vstack(rows)
    write_fvec(args.out, vectors, [cls for _, cls in entries])
    print(f"wrote {args.out} ({vectors.shape[0]} records, dim {vectors.shape[1]})")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "finetune":
            return cmd_finetune(args)
        if args.command == "extract":
            return cmd_extract(args)
    except LfeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
