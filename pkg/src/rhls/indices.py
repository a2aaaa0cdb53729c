"""Exponent algebra for the reversed HLS inequality with extended kernel.

All relations are evaluated in exact rational arithmetic when every input
is an ``int`` or ``Fraction``; otherwise plain floats are used and residuals
are compared against ``FLOAT_TOL``.
"""
from __future__ import annotations

from dataclasses import dataclass, fields
from fractions import Fraction
from numbers import Rational
import math

from .errors import DegenerateExponent, NotAdmissible

FLOAT_TOL = 1e-12

# Order in which admissibility conditions are tested; the first failure is reported.
CONDITIONS = (
    "n lower bound",
    "alpha lower bound",
    "beta lower bound",
    "beta upper bound",
    "p lower bound",
    "p upper bound",
    "beta q positivity",
)


def _is_exact(*xs):
    return all(isinstance(x, Rational) for x in xs)


def _coerce(x, exact):
    if exact:
        return Fraction(x)
    x = float(x)
    if not math.isfinite(x):
        raise NotAdmissible("finite inputs", f"got {x!r}")
    return x


@dataclass(frozen=True)
class ExponentSet:
    n: int
    alpha: float
    beta: float
    p: float
    p_prime: float
    q: float
    q_prime: float
    theta: float
    k: float

    @property
    def exact(self) -> bool:
        return _is_exact(self.alpha, self.beta, self.p)

    def critical_residual(self):
        """(n-1)/(n p) + 1/q' - (alpha+beta-1)/n - 1."""
        n = self.n
        return (n - 1) / (n * self.p) + 1 / self.q_prime - (self.alpha + self.beta - 1) / n - 1

    def equivalent_residual(self):
        """1/q - ((n-1)/n) (1/p - (alpha+beta-1)/(n-1))."""
        n = self.n
        return 1 / self.q - Fraction(n - 1, n) * (1 / self.p - (self.alpha + self.beta - 1) / (n - 1))

    def conjugacy_residuals(self):
        return (1 / self.q + 1 / self.q_prime - 1, 1 / self.p + 1 / self.p_prime - 1)

    def theta_k_residual(self):
        n = self.n
        lhs = 1 / (self.k - 1)
        rhs = Fraction(n - 1, n) * ((self.alpha + self.beta - n) / (n - 1) - 1 / (self.theta - 1))
        return lhs - rhs

    def duality_residuals(self):
        return (self.theta - 1 / (1 - self.p), self.k - (1 - self.q))

    def pohozaev_residual(self):
        return pohozaev_relation(self.theta, self.k, self.n, self.alpha, self.beta)

    def residuals(self) -> dict:
        c1, c2 = self.conjugacy_residuals()
        d1, d2 = self.duality_residuals()
        return {
            "critical": self.critical_residual(),
            "critical_equivalent": self.equivalent_residual(),
            "conjugacy_q": c1,
            "conjugacy_p": c2,
            "theta_duality": d1,
            "k_duality": d2,
            "theta_k": self.theta_k_residual(),
            "pohozaev": self.pohozaev_residual(),
        }

    def as_floats(self) -> dict:
        return {f.name: (getattr(self, f.name) if f.name == "n" else float(getattr(self, f.name)))
                for f in fields(self)}


@dataclass(frozen=True)
class ConformalIndices(ExponentSet):
    """ExponentSet at the conformally invariant point p = 2(n-1)/(n+alpha-2)."""


def _check_n(n):
    if n < 2:
        raise NotAdmissible("n lower bound", f"n={n} < 2")


def _check_alpha_beta(n, alpha, beta, beta_bound):
    if not alpha > n:
        raise NotAdmissible("alpha lower bound", f"alpha={alpha} must exceed n={n}")
    if beta < 0:
        raise NotAdmissible("beta lower bound", f"beta={beta} < 0")
    if not beta < beta_bound:
        raise NotAdmissible("beta upper bound", f"beta={beta} must be < {beta_bound}")


def p_window(n, alpha, beta):
    """Open interval of admissible p for given (n, alpha, beta)."""
    return (n - 1) / (alpha - 1 - (n - 1) * beta), 1


def derive_exponents(n: int, alpha, beta, p) -> ExponentSet:
    """Solve the critical relation for q' and fill in every derived exponent."""
    if not isinstance(n, int) or isinstance(n, bool):
        if float(n) != int(n):
            raise NotAdmissible("n lower bound", f"n={n} is not an integer")
        n = int(n)
    _check_n(n)
    exact = _is_exact(alpha, beta, p)
    alpha, beta, p = (_coerce(x, exact) for x in (alpha, beta, p))
    _check_alpha_beta(n, alpha, beta, (alpha - n) / (n - 1))
    lower, upper = p_window(n, alpha, beta)
    if not p > lower:
        raise NotAdmissible("p lower bound", f"p={p} must exceed {lower}")
    if not p < upper:
        raise NotAdmissible("p upper bound", f"p={p} must be < 1")

    inv_qp = 1 + (alpha + beta - 1) / n - (n - 1) / (n * p)
    q_prime = 1 / inv_qp
    q = 1 / (1 - inv_qp)
    if not (0 < q_prime < 1 and q < 0):
        raise NotAdmissible("p lower bound", f"q'={q_prime} outside (0, 1)")
    if not beta * q + 1 > 0:
        raise NotAdmissible("beta q positivity", f"beta*q+1={beta * q + 1}")
    p_prime = p / (p - 1)
    theta = 1 / (1 - p)
    k = 1 - q
    return ExponentSet(n, alpha, beta, p, p_prime, q, q_prime, theta, k)


def conformal_indices(n: int, alpha, beta) -> ConformalIndices:
    """Indices at p = 2(n-1)/(n+alpha-2), where q = 2n/(n-alpha-2beta),
    theta = (n+alpha-2)/(alpha-n) and k = (n+alpha+2beta)/(alpha+2beta-n).

    The derived exponents come from ``derive_exponents`` so that float inputs
    satisfy the duality relations to rounding; the closed forms above are
    asserted in exact arithmetic.  (For alpha near n the closed form for theta
    and 1/(1-p) differ by the rounding of p amplified by theta^2.)
    """
    _check_n(n)
    exact = _is_exact(alpha, beta)
    alpha, beta = (_coerce(x, exact) for x in (alpha, beta))
    _check_alpha_beta(n, alpha, beta, (alpha - n) / (2 * (n - 1)))
    two = Fraction(2) if exact else 2.0
    p = two * (n - 1) / (n + alpha - 2)
    es = derive_exponents(n, alpha, beta, p)
    if exact:
        assert es.q == two * n / (n - alpha - 2 * beta)
        assert es.theta == (n + alpha - 2) / (alpha - n)
        assert es.k == (n + alpha + 2 * beta) / (alpha + 2 * beta - n)
    return ConformalIndices(**{f.name: getattr(es, f.name) for f in fields(es)})


def pohozaev_relation(theta, k, n: int, alpha, beta):
    """(n-1)/(theta-1) + n/(k-1) - (alpha+beta-n); zero iff the necessary condition holds."""
    if theta == 1 or k == 1:
        raise DegenerateExponent(f"theta={theta}, k={k}: exponent equal to 1")
    return (n - 1) / (theta - 1) + n / (k - 1) - (alpha + beta - n)


def residuals_ok(es: ExponentSet, tol: float = FLOAT_TOL) -> bool:
    return all(abs(v) <= (0 if es.exact else tol) for v in es.residuals().values())
