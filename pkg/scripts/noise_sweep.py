#!/usr/bin/env python3
"""Sweep the flip probability and compare classic vs robust success.

Writes an aligned table to stdout and, with --out, a CSV for plotting.

    python3 scripts/noise_sweep.py --sessions 500 --seed 3 --out sweep.csv
"""

import argparse
import csv
import sys

sys.path.insert(0, "src")

from sembisect.simulate import run_noise_experiment  # noqa: E402

PROBABILITIES = [0.0, 0.02, 0.05, 0.1, 0.15, 0.2, 0.3]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sessions", type=int, default=500)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--commits", type=int, default=32)
    parser.add_argument("--region-width", type=int, default=5)
    parser.add_argument("--out", help="CSV output path")
    args = parser.parse_args()

    rows = []
    print(f"{'flip p':>7}  {'classic':>8}  {'robust':>8}  {'classic steps':>13}  {'robust steps':>12}")
    for p in PROBABILITIES:
        report = run_noise_experiment(
            n_commits=args.commits,
            flip_probability=p,
            flaky_region_width=args.region_width,
            sessions=args.sessions,
            seed=args.seed,
        )
        classic_rate = report.classic_success_rate
        robust_rate = report.robust_success_rate
        classic_steps = report.classic_steps_total / report.sessions
        robust_steps = report.robust_steps_total / report.sessions
        print(
            f"{p:7.2f}  {classic_rate:8.3f}  {robust_rate:8.3f}"
            f"  {classic_steps:13.2f}  {robust_steps:12.2f}"
        )
        rows.append(
            {
                "flip_probability": p,
                "classic_success_rate": classic_rate,
                "robust_success_rate": robust_rate,
                "classic_avg_steps": classic_steps,
                "robust_avg_steps": robust_steps,
            }
        )
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
            writer.writeheader()
            writer.writerows(rows)
        print(f"\nwrote {args.out}")


if __name__ == "__main__":
    main()
