#!/usr/bin/env python3
"""Sweep the basic-vs-cache-oblivious matmul energy ratio over square sizes.

Evaluates both matmul models in cpu-bound mode on the two fitted HPC
platforms (24 and 57 cores), writes the comparison CSV and a ratio bar
chart. A ratio above 1 means the rescanning triple loop is predicted to
cost more energy than the recursive algorithm.
"""

import argparse
import sys
from pathlib import Path

from encost.cli import main as encost_main


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="results", help="output directory")
    parser.add_argument("--sizes", default="256,512,1024,2048")
    parser.add_argument("--platforms", default="Xeon,Xeon-Phi")
    args = parser.parse_args()

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    return encost_main([
        "compare", "--a", "basic-matmul", "--b", "co-matmul",
        "--inputs", args.sizes,
        "--bound-mode", "cpu",
        "--platforms", args.platforms,
        "--out-csv", str(out_dir / "matmul_basic_vs_co.csv"),
        "--out-chart", str(out_dir / "matmul_basic_vs_co.svg"),
    ])


if __name__ == "__main__":
    sys.exit(main())
