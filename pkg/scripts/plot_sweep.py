"""Plot a sweep CSV: worst-prior ratio against stop cost, one line per algorithm.

Usage: python3 scripts/plot_sweep.py sweep.csv [out.png]
Needs matplotlib, which the package itself does not depend on.
"""

import argparse
import csv
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

LABELS = {"wc": "worst-case optimal", "sg": "subgame optimal", "pi": "prior-independent"}


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("csv")
    parser.add_argument("out", nargs="?", default="sweep.png")
    args = parser.parse_args()

    series = defaultdict(list)
    with open(args.csv) as fh:
        for row in csv.DictReader(fh):
            series[(int(row["T"]), row["algorithm"])].append((float(row["B"]), float(row["ratio"])))

    fig, ax = plt.subplots(figsize=(6, 4))
    for (T, alg), pts in sorted(series.items()):
        pts.sort()
        ax.plot([b for b, _ in pts], [r for _, r in pts], marker="o",
                label=f"{LABELS.get(alg, alg)} (T={T})")
    ax.set_xlabel("stop cost B")
    ax.set_ylabel("ratio against worst prior")
    ax.grid(alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
