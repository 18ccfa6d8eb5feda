#!/usr/bin/env python3
"""Plot the per-iteration price trajectory written by `bsde solve`.

Usage:
    python3 scripts/plot_convergence.py out/fig2/convergence.csv [more.csv ...]
        [--benchmark 2.0353] [--out convergence.png]
"""

import argparse
import csv
import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def read_curve(path):
    ks, y0s = [], []
    with open(path) as fh:
        for row in csv.DictReader(fh):
            ks.append(int(row["k"]))
            y0s.append(float(row["Y0"]))
    return ks, y0s


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("csv", nargs="+", help="convergence.csv files")
    ap.add_argument("--benchmark", type=float, default=None, help="reference price line")
    ap.add_argument("--out", default="convergence.png")
    args = ap.parse_args()

    fig, ax = plt.subplots(figsize=(7, 4.5))
    for path in args.csv:
        ks, y0s = read_curve(path)
        ax.plot(ks, y0s, marker="+", label=pathlib.Path(path).parent.name or path)
    if args.benchmark is not None:
        ax.axhline(args.benchmark, color="black", linestyle="--", linewidth=0.8, label="benchmark")
    ax.set_xlabel("iteration")
    ax.set_ylabel("$Y_0$")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
