"""Mean stabilization steps of CIW_n, CIW_{n,k} and CIG on complete graphs.

Writes one CSV per family into the output directory and prints the
log-log slope for each single-k family.

    python3 scripts/scaling_sweep.py --out results/ --trials 30
"""

import argparse
from pathlib import Path

from cgident.engine import measure_scaling, scaling_csv
from cgident.stats import loglog_slope


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results")
    ap.add_argument("--trials", type=int, default=30)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    sizes = [8, 16, 32, 64]
    runs = {
        "ciw_n": dict(protocol="ciw_n", sizes=sizes),
        "ciw_nk_n32": dict(protocol="ciw_nk", sizes=[32], ks=[1, 2, 4, 8]),
        "cig": dict(protocol="cig", sizes=[8, 16, 32]),
    }
    for name, kw in runs.items():
        rows = measure_scaling(trials=args.trials, seed=args.seed, jobs=args.jobs, **kw)
        (out / f"{name}.csv").write_text(scaling_csv(rows))
        if len(kw["sizes"]) >= 3:
            slope = loglog_slope([(r.n, r.mean_steps) for r in rows])
            print(f"{name}: slope {slope:.3f}")
        else:
            print(f"{name}: " + ", ".join(f"k={r.k} mean {r.mean_steps:.0f}" for r in rows))


if __name__ == "__main__":
    main()
