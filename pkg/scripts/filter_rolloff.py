"""Filter functions over omega*T and the small-omega*T roll-off of each index."""
import argparse
import csv
from pathlib import Path

import numpy as np

from walshrecon.ddfilter import filter_function, rolloff
from walshrecon.negligibility import negligibility, rank


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--indices", default="1,2,3,4,6,7,8,12")
    ap.add_argument("--order", type=int, default=4)
    ap.add_argument("--out", default="out/filter")
    args = ap.parse_args()
    idx = [int(s) for s in args.indices.split(",")]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    wT = np.geomspace(1e-3, 1e3, 301)
    with open(out / "filter.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["omegaT", *(f"F_{m}" for m in idx)])
        cols = [filter_function(m, wT, args.order) for m in idx]
        for i, x in enumerate(wT):
            w.writerow([f"{x:.6e}", *(f"{c[i]:.6e}" for c in cols)])

    with open(out / "rolloff.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["paley", "rank", "negligibility", "F_at_1e-2", "rolloff_at_1e-2", "ratio"])
        for m in idx:
            F, R = filter_function(m, 1e-2, args.order), rolloff(m, 1e-2)
            w.writerow([m, rank(m), negligibility(m), f"{F:.6e}", f"{R:.6e}", f"{F / R:.8f}"])
    print(f"wrote {out}/filter.csv and {out}/rolloff.csv")


if __name__ == "__main__":
    main()
