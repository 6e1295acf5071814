"""MSQE and pulse count of every compression method across the profile corpus."""
import argparse
import csv
from pathlib import Path

from walshrecon.compression import msqe, plan_indices, reconstruct
from walshrecon.profiles import CORPUS, named_profile

PLANS = [
    ("full", {"n": 3}),
    ("full", {"n": 5}),
    ("threshold", {"p0": 6}),
    ("threshold", {"p0": 9}),
    ("subdegree", {"n": 5}),
    ("cpmgpdd", {"M": 4}),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out/msqe_table.csv")
    args = ap.parse_args()
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["profile", "method", "parameters", "terms", "pulses", "msqe"])
        for name in sorted(CORPUS):
            f = named_profile(name)
            for method, kw in PLANS:
                plan = plan_indices(method, **kw)
                err = msqe(f, reconstruct(f, plan))
                w.writerow([name, method, ";".join(f"{k}={v}" for k, v in kw.items()),
                            len(plan), plan.pulse_count, f"{err:.6e}"])
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
