#!/usr/bin/env python3
"""Run the full cache-model validation: miss bound plus I/O cross-checks.

First verifies on random traces that distributed private-cache misses never
exceed core_count times the serial misses, then checks every kernel's
closed-form I/O count against trace simulation. Exits nonzero if either
validation fails.
"""

import argparse
import sys

from encost.cli import main as encost_main


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=1000)
    parser.add_argument("--trace-len", type=int, default=10000)
    parser.add_argument("--seed", type=int, default=42)
    args = parser.parse_args()

    print("== distributed-vs-serial miss bound ==")
    rc = encost_main([
        "validate-miss-bound",
        "--trials", str(args.trials),
        "--cores", "2,4,8",
        "--trace-len", str(args.trace_len),
        "--seed", str(args.seed),
    ])
    if rc != 0:
        return rc

    sweeps = [
        ("csr", "32,48,64"),
        ("csc", "32,48,64"),
        ("csb", "32,48,64"),
        ("basic-matmul", "16,32,64"),
        ("co-matmul", "16,32,64"),
    ]
    for kernel, sizes in sweeps:
        print(f"\n== closed-form I/O vs simulation: {kernel} ==")
        rc = encost_main([
            "validate-io", "--kernel", kernel, "--sizes", sizes,
            "--seed", str(args.seed),
        ])
        if rc != 0:
            return rc
    return 0


if __name__ == "__main__":
    sys.exit(main())
