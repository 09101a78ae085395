#!/usr/bin/env python3
"""Regenerate the committed capture regression CSVs in tests/data.

Runs the default capture point (seed 20170101, 10,000 trials) through the CLI
and copies its summary and per-trial CSVs. Only rerun this after an intended
change to the simulator or the RNG version.
"""
import shutil
import sys
import tempfile
from pathlib import Path

from targeting import cli

DATA = Path(__file__).resolve().parent.parent / "tests" / "data"


def main() -> int:
    with tempfile.TemporaryDirectory() as tmp:
        code = cli.main(["sim-capture", "--scenario", str(DATA / "capture_default.json"),
                         "--trials", "10000", "--out", tmp, "--dump-trials"])
        if code:
            return code
        for name in ("sim_capture.csv", "sim_capture_trials.csv"):
            shutil.copyfile(Path(tmp) / name, DATA / f"regression_{name}")
            print(f"wrote {DATA / f'regression_{name}'}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
