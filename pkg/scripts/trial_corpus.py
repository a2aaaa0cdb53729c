"""Functional ratio of every trial function against C*, sorted by excess."""
import argparse

from rhls.indices import conformal_indices
from rhls.operator import functional_ratio
from rhls.sharpconst import c_star_ball, trial_corpus


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=2)
    ap.add_argument("--alpha", type=float, default=3.0)
    args = ap.parse_args()
    es = conformal_indices(args.n, args.alpha, 0)
    cstar = c_star_ball(args.n, args.alpha, 0)
    rows = [(functional_ratio(f, es) / cstar - 1, f.name) for f in trial_corpus(args.n, args.alpha)]
    print(f"C* = {cstar:.15f}")
    print(f"{'trial':<32} ratio/C* - 1")
    for excess, name in sorted(rows):
        print(f"{name:<32} {excess: .3e}")


if __name__ == "__main__":
    main()
