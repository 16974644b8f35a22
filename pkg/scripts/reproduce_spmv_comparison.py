#!/usr/bin/env python3
"""Sweep the CSC-vs-CSB energy ratio over the built-in matrices.

Evaluates both SpMV models in memory-bound mode on the two fitted HPC
platforms, writes the comparison CSV and a ratio bar chart, and prints the
table. A ratio above 1 means column-compressed SpMV is predicted to cost
more energy than the blocked format on that input/platform.
"""

import argparse
import sys
from pathlib import Path

from encost.cli import main as encost_main


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="results", help="output directory")
    parser.add_argument("--platforms", default="Xeon,Xeon-Phi")
    args = parser.parse_args()

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    return encost_main([
        "compare", "--a", "csc", "--b", "csb",
        "--bound-mode", "memory",
        "--platforms", args.platforms,
        "--out-csv", str(out_dir / "spmv_csc_vs_csb.csv"),
        "--out-chart", str(out_dir / "spmv_csc_vs_csb.svg"),
    ])


if __name__ == "__main__":
    sys.exit(main())
