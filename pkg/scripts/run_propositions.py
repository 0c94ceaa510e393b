"""Run every bundled verify_* configuration and print one verdict per line.

Usage: python scripts/run_propositions.py [--out DIR] [--threads N]
"""

import argparse
import glob
import json
import os
import sys

from predprey_lab import cli

HERE = os.path.dirname(os.path.abspath(__file__))
CONFIGS = sorted(glob.glob(os.path.join(HERE, "..", "configs", "verify_*.ini"))) + [
    os.path.join(HERE, "..", "configs", "ivlev_large_c.ini"),
]


def main() -> int:
    p = argparse.ArgumentParser()
    p.add_argument("--out", default="proposition_runs")
    p.add_argument("--threads", type=int, default=1)
    args = p.parse_args()
    worst = 0
    for path in CONFIGS:
        name = os.path.splitext(os.path.basename(path))[0]
        out = os.path.join(args.out, name)
        code = cli.main(["verify", "--config", path, "--out", out, "--threads", str(args.threads)])
        verdict = "error"
        report = os.path.join(out, "verdict.json")
        if os.path.exists(report):
            with open(report) as fh:
                verdict = json.load(fh)["verdict"]
        print(f"{name}: {verdict} (exit {code})", file=sys.stderr)
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(main())
