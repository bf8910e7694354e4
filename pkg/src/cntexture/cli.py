"""Command-line interface: extract, split, run, synth."""

from __future__ import annotations

import argparse
import sys

from .cn_graph import CnParams
from .errors import CnTextureError
from .pipeline import RunOptions, extract, load_manifest, run, save_split, split_dataset
from .synthetic import make_corpus


def _add_graph_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--radius", type=float, default=3.0, help="search radius in pixels")
    p.add_argument("--threshold", type=float, default=0.315, help="similarity threshold")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cntexture", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="write global feature vectors for a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True, help="output FVEC1 path")
    _add_graph_args(p)
    p.add_argument("--no-normalize-hist", action="store_true")
    p.add_argument("--dump-feature-images", metavar="DIR", default=None)
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("split", help="write a deterministic 20/50/30 split")
    p.add_argument("--manifest", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("run", help="full pipeline: split, extract, reduce, train, evaluate")
    p.add_argument("--manifest", required=True)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--local", default=None, help="FVEC1 file of local vectors in manifest order")
    p.add_argument("--reduce", choices=("none", "pca", "chi2"), default="none")
    pca_group = p.add_mutually_exclusive_group()
    pca_group.add_argument("--pca-k", type=int, default=None)
    pca_group.add_argument("--pca-threshold", type=float, default=None)
    p.add_argument("--chi2-k", type=int, default=None)
    p.add_argument("--svm-c", type=float, default=1.0)
    _add_graph_args(p)
    p.add_argument("--no-normalize-hist", action="store_true")
    p.add_argument("--repeats", type=int, default=1)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--report", required=True, help="output directory for reports and models")

    p = sub.add_parser("synth", help="generate the bundled synthetic grating corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--per-class", type=int, default=40)
    p.add_argument("--size", type=int, default=128)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "extract":
            manifest = load_manifest(args.manifest)
            params = CnParams(radius=args.radius, threshold=args.threshold)
            extract(
                manifest, params, out=args.out,
                normalize=not args.no_normalize_hist,
                dump_dir=args.dump_feature_images, jobs=args.jobs,
            )
            print(f"wrote {args.out} ({len(manifest.entries)} records)")
        elif args.command == "split":
            manifest = load_manifest(args.manifest)
            save_split(split_dataset(manifest, args.seed), args.out)
            print(f"wrote {args.out}")
        elif args.command == "run":
            manifest = load_manifest(args.manifest)
            options = RunOptions(
                seed=args.seed,
                params=CnParams(radius=args.radius, threshold=args.threshold),
                local_path=args.local,
                reduce=args.reduce,
                pca_k=args.pca_k,
                pca_threshold=args.pca_threshold,
                chi2_k=args.chi2_k,
                svm_c=args.svm_c,
                normalize_hist=not args.no_normalize_hist,
                repeats=args.repeats,
                jobs=args.jobs,
            )
            result = run(manifest, options, args.report)
            print(f"mean OA = {result.mean_oa:.6f} ({args.report}/report.txt)")
        elif args.command == "synth":
            manifest = make_corpus(args.out, seed=args.seed, per_class=args.per_class, size=args.size)
            print(f"wrote {manifest}")
    except CnTextureError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
