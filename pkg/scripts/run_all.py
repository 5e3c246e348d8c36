"""Run every experiment on one catalog, sharing a single output directory.

    python scripts/run_all.py --profile ci --out-dir results/ci

Unrecognised options (for example ``-S 50``) are passed to every mode.
"""

import argparse
import sys
import time

from wellport.cli import main
from wellport.experiments import EXIT_OK, MODES


def parse_args(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--profile", default="ci")
    p.add_argument("--out-dir", default="results")
    p.add_argument("--catalog")
    p.add_argument("--skip", action="append", default=[], choices=MODES, help="mode to leave out (repeatable)")
    return p.parse_known_args(argv)


def run(argv=None) -> int:
    args, extra = parse_args(argv)
    common = ["--profile", args.profile, "--out-dir", args.out_dir, *extra]
    if args.catalog:
        common += ["--catalog", args.catalog]
    # optimize first so the later modes reuse its archive
    for mode in (m for m in MODES if m not in args.skip and m != "make-synthetic"):
        start = time.perf_counter()
        code = main([mode, *common])
        print(f"{mode}: exit {code} in {time.perf_counter() - start:.1f} s", file=sys.stderr)
        if code != EXIT_OK:
            return code
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(run())
