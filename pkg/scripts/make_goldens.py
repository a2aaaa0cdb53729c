"""Regenerate src/rhls/goldens.txt.

ball_value comes from an mpmath oracle at 30 digits that uses closed forms of
the sphere-pair integral g where they exist (elliptic integral for n=2,
alpha=3; polynomials for alpha-n = 2 and for n=3, alpha=4) and tanh-sinh
quadrature for the radial integral, so it shares no code with the library.
direct_value is the library's half-space computation run on a refined grid.
"""
import argparse
import math
from fractions import Fraction
from pathlib import Path

import mpmath as mp

from rhls.indices import conformal_indices
from rhls.sharpconst import GOLDEN_PATH, c_star_direct, config_hash, refined, write_goldens

TUPLES = [(2, 3, 0), (2, 4, Fraction(1, 2)), (3, 4, 0)]
DPS = 30


def sphere_pair_mp(n, alpha, rho):
    a = mp.mpf(alpha - n) / 2
    if n == 2 and alpha == 3:
        # |e^{it} - rho| integrated over the circle
        return 4 * (1 + rho) * mp.ellipe(min(4 * rho / (1 + rho) ** 2, mp.mpf(1)))
    if alpha - n == 2:
        # |eta - xi|^2 = 1 + rho^2 - 2 eta.xi and the linear term averages out
        return _sphere_area(n - 1) * (1 + rho ** 2)
    if n == 3 and alpha == 4:
        return 4 * mp.pi * (1 + rho ** 2 / 3)
    w = _sphere_area(n - 2)
    return w * mp.quad(lambda th: (1 + rho ** 2 - 2 * rho * mp.cos(th)) ** a * mp.sin(th) ** (n - 2),
                       [0, mp.pi])


def _sphere_area(k):
    return 2 * mp.pi ** (mp.mpf(k + 1) / 2) / mp.gamma(mp.mpf(k + 1) / 2)


def ball_oracle(n, alpha, beta):
    es = conformal_indices(n, alpha, beta)
    q = mp.mpf(es.q.numerator) / es.q.denominator
    b = mp.mpf(Fraction(beta).numerator) / Fraction(beta).denominator
    area = n * mp.pi ** (mp.mpf(n) / 2) / mp.gamma(mp.mpf(n) / 2 + 1)
    # r = 1 - u^m removes the (1 - r)^(beta q) endpoint singularity
    m = max(1, math.ceil(1 / (1 + Fraction(beta) * es.q)))

    def integrand(u):
        r = 1 - u ** m
        w = (u ** m * (1 + r) / 2) ** b
        return (w * sphere_pair_mp(n, alpha, r)) ** q * r ** (n - 1) * m * u ** (m - 1)

    inner = mp.quad(integrand, [0, mp.mpf(1) / 2, 1])
    expo = -mp.mpf(n + alpha - 2) / (2 * (n - 1))
    return area ** expo * (area * inner) ** (1 / q)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=str(GOLDEN_PATH))
    args = ap.parse_args()
    mp.mp.dps = DPS
    cfg = refined(None)
    h = config_hash({"dps": DPS, "ball": "closed-form g + tanh-sinh", "direct": cfg})
    records = {}
    for n, alpha, beta in TUPLES:
        ball = ball_oracle(n, alpha, beta)
        mp.mp.dps = DPS - 10
        coarse = ball_oracle(n, alpha, beta)
        mp.mp.dps = DPS
        direct = c_star_direct(n, alpha, beta, cfg)
        budget = float(abs(direct - ball) / ball + abs(ball - coarse) / ball)
        records[(n, float(alpha), float(beta))] = {
            "ball_value": float(ball), "direct_value": direct,
            "error_budget": max(budget, 1e-15), "oracle_config_hash": h}
        print(n, alpha, beta, mp.nstr(ball, 20), direct, budget)
    write_goldens(records, Path(args.out))


if __name__ == "__main__":
    main()
