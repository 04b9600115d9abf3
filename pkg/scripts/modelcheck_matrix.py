"""Exhaustive verdicts for every protocol on every small fixture graph."""

import argparse
import json

from cgident.graph import GENERATOR_KINDS, generate
from cgident.modelcheck import InstanceTooLarge, verify
from cgident.protocols import make_protocol


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-n", type=int, default=3)
    ap.add_argument("--cap", type=int, default=500_000)
    args = ap.parse_args()
    for n in range(2, args.max_n + 1):
        specs = [("ciw_n", None)] + [("ciw_nk", k) for k in range(1, n + 1)] + [("cig", None)]
        for kind in GENERATOR_KINDS:
            g = generate(kind, n, 0)
            for name, k in specs:
                p = make_protocol(name, n, k)
                try:
                    v = verify(p, g, cap=args.cap)
                    row = v.to_json(p, g)
                except InstanceTooLarge:
                    row = {"protocol": name, "n": n, "k": k, "too_large": True}
                row["graph_kind"] = kind
                row.pop("graph", None)
                print(json.dumps(row))


if __name__ == "__main__":
    main()
