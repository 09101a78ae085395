#!/usr/bin/env python3
"""Regenerate every figure table (and SVGs) with the default seed.

    python scripts/reproduce_figures.py [OUT_DIR] [--workers N]
"""
import argparse
import sys

from targeting import cli


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("out", nargs="?", default="out/figures")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--trials", type=int, default=cli.DEFAULT_TRIALS)
    a = ap.parse_args()
    return cli.main(["figures", "--out", a.out, "--svg", "--dump-trials", "--workers",
                     str(a.workers), "--trials", str(a.trials), "-v"])


if __name__ == "__main__":
    sys.exit(main())
