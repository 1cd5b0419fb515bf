#!/usr/bin/env python3
"""End-to-end demo: synthesize scenes, sample indices, evaluate, aggregate.

Builds two methods on one synthetic scene (a perfect copy and a noisy one),
runs the full CLI loop in a temp directory, and prints the leaderboard.

    python scripts/run_demo_eval.py [--keep DIR]
"""

import argparse
import subprocess
import sys
import tempfile
from pathlib import Path

HERE = Path(__file__).resolve().parent


def run(cmd):
    print("+", " ".join(str(c) for c in cmd))
    subprocess.run([str(c) for c in cmd], check=True)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--keep", default=None,
                    help="work under this directory instead of a temp dir")
    args = ap.parse_args()

    ctx = tempfile.TemporaryDirectory() if args.keep is None else None
    work = Path(args.keep) if args.keep else Path(ctx.name)
    work.mkdir(parents=True, exist_ok=True)
    gt = work / "gt"
    perfect = work / "perfect"
    noisy = work / "noisy"
    reports = work / "reports"
    reports.mkdir(exist_ok=True)

    py = sys.executable
    run([py, HERE / "make_synthetic_scene.py", "--out", gt,
         "--pred-out", perfect, "--frames", "12"])
    run([py, HERE / "make_synthetic_scene.py", "--out", gt,
         "--pred-out", noisy, "--frames", "12",
         "--noise-depth", "0.05", "--noise-center", "0.01"])

    index = work / "index.json"
    run([py, "-m", "geoeval.cli", "sample", "--scene-dir", gt, "--out", index])

    for method, pred in (("perfect", perfect), ("noisy", noisy)):
        for regime in ("sparse", "medium", "dense"):
            run([py, "-m", "geoeval.cli", "eval", "--index", index,
                 "--gt-dir", gt, "--pred-dir", pred, "--regime", regime,
                 "--method", method,
                 "--out", reports / f"{method}_{regime}.json"])

    run([py, "-m", "geoeval.cli", "aggregate", "--reports", reports,
         "--format", "markdown", "--out", "-"])
    if ctx is not None:
        ctx.cleanup()


if __name__ == "__main__":
    main()
