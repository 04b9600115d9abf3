"""Maximum hitting time of the derived multigraph for each generator kind."""

import argparse

from cgident.graph import GENERATOR_KINDS, generate, to_undirected_multigraph
from cgident.stats import hitting_times


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", default="4,8,16,32,64")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]
    print("kind,n,max_hitting")
    for kind in GENERATOR_KINDS:
        for n in sizes:
            h = hitting_times(to_undirected_multigraph(generate(kind, n, args.seed)))
            print(f"{kind},{n},{h.max_hitting:.4f}")


if __name__ == "__main__":
    main()
