"""Command-line laboratory entry point.

    magnls <experiment> --config <path> [--out <dir>] [--jobs N] [--seed S]

The MAGNLS_OUT environment variable overrides --out.  Exit code is 0 iff
every verdict of the experiment passed.
"""

import argparse
import os
import sys

from .config import parse_config
from .experiments import EXPERIMENTS, run_experiment


def build_parser():
    parser = argparse.ArgumentParser(
        prog="magnls",
        description="spectral laboratory for the strong-field magnetic NLS models",
    )
    parser.add_argument("experiment", choices=EXPERIMENTS, help="experiment to run")
    parser.add_argument("--config", required=True, help="key=value configuration file")
    parser.add_argument("--out", default=None, help="output directory (default: ./out/<experiment>)")
    parser.add_argument("--jobs", type=int, default=1, help="concurrent sweep points")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    with open(args.config, encoding="utf-8") as fh:
        cfg = parse_config(fh.read())
    if args.seed is not None:
        cfg.seed = args.seed
    outdir = os.environ.get("MAGNLS_OUT") or args.out or os.path.join("out", args.experiment)
    manifest = run_experiment(args.experiment, cfg, outdir, jobs=max(1, args.jobs))
    width = max((len(v.name) for v in manifest.verdicts), default=10)
    for v in manifest.verdicts:
        status = "PASS" if v.passed else "FAIL"
        line = f"[{status}] {v.name:<{width}}  measured {v.measured}  tolerance {v.tolerance}"
        if v.detail:
            line += f"  ({v.detail})"
        print(line)
    print(f"outputs in {outdir}: {', '.join(manifest.outputs + ['manifest.json'])}")
    return 0 if manifest.passed else 1


if __name__ == "__main__":
    sys.exit(main())
