"""Negligibility landscape: p, rank and minima flags per index, plus per-degree summaries."""
import argparse
import csv
import json
from pathlib import Path

from walshrecon.negligibility import (is_local_minimum, maximal_contrast_at_degree, negligibility,
                                      rank)
from walshrecon.walsh import degree


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--order", type=int, default=10)
    ap.add_argument("--out", default="out/negligibility")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    N = 2**args.order
    with open(out / "indices.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["paley", "degree", "rank", "negligibility", "p_minimum", "r_minimum"])
        for k in range(N):
            w.writerow([k, degree(k), rank(k), negligibility(k),
                        int(k > 0 and is_local_minimum(negligibility, k, strict=True)),
                        int(k > 0 and is_local_minimum(rank, k, strict=True))])
    summary = {}
    for d in range(2, args.order + 1):
        block = range(2 ** (d - 1), 2**d)
        cpmg_p = negligibility(3 * 2 ** (d - 2))
        ps = [negligibility(j) for j in block]
        summary[d] = {
            "min_p": min(ps),
            "max_p": max(ps),
            "below_cpmg": sum(p < cpmg_p for p in ps),
            "maximal_contrast": list(maximal_contrast_at_degree(d)),
        }
    (out / "degrees.json").write_text(json.dumps(summary, indent=2, sort_keys=True))
    print(f"wrote {out}/indices.csv and {out}/degrees.json")


if __name__ == "__main__":
    main()
