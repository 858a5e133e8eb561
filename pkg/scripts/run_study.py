#!/usr/bin/env python3
"""End-to-end study driver: synthesize inputs, run the batch, assess, report.

Convenience wrapper around the CLI for one-command reproduction:

    python3 scripts/run_study.py --workdir out/demo --seed 0 --workers 4

Writes everything under --workdir and prints the report to stdout. Pass
--skip-synth to reuse inputs already present in the workdir.
"""

import argparse
import sys
from pathlib import Path

from gridfire.cli import main as cli


def run(argv):
    print("+ gridfire " + " ".join(argv), file=sys.stderr)
    rc = cli(argv)
    if rc != 0:
        sys.exit(rc)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--workdir", default="out/study", help="directory for all inputs and outputs")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--size", type=int, default=128, help="landscape rows and columns")
    ap.add_argument("--top", type=int, default=10, help="ranking rows to print")
    ap.add_argument("--skip-synth", action="store_true")
    args = ap.parse_args()

    wd = Path(args.workdir)
    if not args.skip_synth:
        run(["synth", "--out", str(wd), "--seed", str(args.seed), "--size", str(args.size)])
    cfg = str(wd / "study.ini")
    run(["simulate", "--config", cfg, "--out", str(wd / "run"),
         "--workers", str(args.workers)])
    run(["assess", "--config", cfg, "--results", str(wd / "run" / "results.csv"),
         "--out", str(wd / "report")])
    print()
    run(["report", str(wd / "report"), "--top", str(args.top)])

    print()
    print("reference-table assessment (published per-line seasonal figures):")
    run(["assess", "--from-tables", str(wd / "table1.csv"), str(wd / "table2.csv"),
         "--out", str(wd / "report_reference")])
    run(["report", str(wd / "report_reference"), "--top", str(args.top)])


if __name__ == "__main__":
    main()
