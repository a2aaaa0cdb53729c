"""Direct-vs-ball gap of C* as the panel rule is coarsened or refined."""
import argparse
from fractions import Fraction

from rhls.cli import parse_number
from rhls.quadrature import QuadratureConfig
from rhls.sharpconst import c_star_ball, c_star_direct


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=2)
    ap.add_argument("--alpha", type=parse_number, default=3)
    ap.add_argument("--beta", type=parse_number, default=Fraction(0))
    ap.add_argument("--nodes", default="4,6,8,10,12")
    args = ap.parse_args()
    ball = c_star_ball(args.n, args.alpha, args.beta)
    print(f"ball value {ball:.15f}")
    print("nodes_per_panel  direct                relative gap")
    for m in (int(x) for x in args.nodes.split(",")):
        direct = c_star_direct(args.n, args.alpha, args.beta, QuadratureConfig(nodes_per_panel=m))
        print(f"{m:>15d}  {direct:.15f}  {abs(direct / ball - 1):.2e}")


if __name__ == "__main__":
    main()
