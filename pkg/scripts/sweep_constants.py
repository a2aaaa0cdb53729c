"""Sharp constants, EL deviation and Pohozaev residual over an (alpha, beta) grid, as CSV."""
import argparse
import sys

from rhls.cli import parse_number, sweep_rows, write_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=2)
    ap.add_argument("--alphas", default="2.5,3,3.5,4,5")
    ap.add_argument("--betas", default="0,0.1,1/4")
    ap.add_argument("--no-pair", action="store_true")
    ap.add_argument("--out", default=None)
    args = ap.parse_args()
    alphas = [parse_number(a) for a in args.alphas.split(",")]
    betas = [parse_number(b) for b in args.betas.split(",")]
    rows = sweep_rows(args.n, alphas, betas, with_pair=not args.no_pair)
    if args.out:
        with open(args.out, "w") as fh:
            write_sweep(rows, fh)
    else:
        write_sweep(rows, sys.stdout)


if __name__ == "__main__":
    main()
