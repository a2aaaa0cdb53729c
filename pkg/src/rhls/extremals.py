"""The bubble family, the calibrated solution pair (u, v), and the checks
that the bubble solves the Euler-Lagrange system: ratio constancy,
asymptotics at infinity and the Pohozaev integral identity."""
from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
import math

import numpy as np

from .errors import CalibrationDrift
from .geometry import ball_map, ball_centers, norm
from .indices import ConformalIndices, conformal_indices, pohozaev_relation
from .operator import (PotentialField, RadialBoundaryFunction, adjoint_integral, boundary_integral,
                       field_for, norm_kappa)
from .quadrature import QuadratureConfig


class BubbleKind(Enum):
    F_EXTREMAL = "f"
    U_SOLUTION = "u"
    V_TRACE = "v"


@dataclass(frozen=True)
class Bubble:
    """c (d / (1 + d^2 |y - z0|^2))^gamma on the boundary R^{n-1}.

    gamma = (n + alpha - 2)/2 for F_EXTREMAL and (n - alpha)/2 for
    U_SOLUTION and V_TRACE.
    """
    n: int
    alpha: float
    c: float = 1.0
    d: float = 1.0
    z0: tuple = None
    kind: BubbleKind = BubbleKind.F_EXTREMAL

    def __post_init__(self):
        if not (self.c > 0 and self.d > 0):
            raise ValueError("bubble needs c > 0 and d > 0")
        if self.z0 is None:
            object.__setattr__(self, "z0", (0.0,) * (self.n - 1))

    @property
    def gamma(self) -> float:
        if self.kind is BubbleKind.F_EXTREMAL:
            return 0.5 * (self.n + float(self.alpha) - 2)
        return 0.5 * (self.n - float(self.alpha))

    def radial_profile(self, r):
        d = self.d
        return self.c * (d / (1.0 + d * d * np.asarray(r, float) ** 2)) ** self.gamma

    def __call__(self, y):
        y = np.asarray(y, float)
        return self.radial_profile(norm(y - np.asarray(self.z0, float)))

    def radial(self) -> RadialBoundaryFunction:
        """The profile about z0 as radial boundary data (decaying kinds only)."""
        return RadialBoundaryFunction(self.radial_profile, 2 * self.gamma, scale=1.0 / self.d,
                                      name=f"bubble[{self.kind.value}]")

    def power(self, e: float) -> RadialBoundaryFunction:
        """The radial profile raised to the power e, with its decay exponent."""
        c, d, g = self.c, self.d, self.gamma
        return RadialBoundaryFunction(
            lambda r: c ** e * (d / (1.0 + d * d * np.asarray(r, float) ** 2)) ** (g * e),
            2 * g * e, scale=1.0 / d, name=f"bubble[{self.kind.value}]^{e:g}")

    def with_(self, **kw) -> "Bubble":
        return replace(self, **kw)


@dataclass(frozen=True)
class FlatExtremal:
    """f(y) = (lam / |y - x0|)^(n + alpha - 2) with x0 = (0, -lam)."""
    n: int
    alpha: float
    lam: float = 2.0

    @property
    def exponent(self):
        return self.n + float(self.alpha) - 2

    def radial_profile(self, r):
        lam = self.lam
        return (lam / np.sqrt(np.asarray(r, float) ** 2 + lam * lam)) ** self.exponent

    def radial(self) -> RadialBoundaryFunction:
        return RadialBoundaryFunction(self.radial_profile, self.exponent, scale=self.lam,
                                      name=f"flat[{self.lam:g}]")

    def transplant(self, eta):
        """The Kelvin-type transplant of f to the sphere |eta - x1| = lam/2; identically 1."""
        eta = np.asarray(eta, float)
        x0, _ = ball_centers(self.n, self.lam)
        y = ball_map(eta, self.lam)  # the ball map is an involution
        dist = norm(y - x0)
        return (dist / self.lam) ** self.exponent * self.radial_profile(norm(y[..., :-1]))

    def norm_closed_form(self) -> float:
        """||f||_p at conformal p: (n nu_n)^((n+alpha-2)/(2(n-1))) (lam/2)^((n+alpha-2)/2)."""
        from .quadrature import unit_ball_volume
        n = self.n
        return ((n * unit_ball_volume(n)) ** (self.exponent / (2 * (n - 1)))
                * (self.lam / 2) ** (self.exponent / 2))


# ---------------------------------------------------------------------------
# Euler-Lagrange ratio

def _s_kappa(es):
    """Decay in s of s^(n-2) W V^(q-1) for V ~ s^(alpha-n)."""
    return float(-(es.n - 2) - es.q * (es.alpha - es.n))


def el_ratios(f: RadialBoundaryFunction, es, radii, cfg: QuadratureConfig | None = None,
              field: PotentialField | None = None):
    """rho(y) = [integral x_n^beta |x-y|^(alpha-n) (Tf)^(q-1) dx] / f(y)^(p-1) at |y| = radii."""
    if field is None:
        field = field_for(f, es, cfg)
    beta, q = float(es.beta), float(es.q)
    num = adjoint_integral(field, lambda V, r, t: t ** (beta * q) * V ** (q - 1), radii,
                           kappa_s=_s_kappa(es), kappa_t=norm_kappa(es),
                           head_exponent=beta * q, cfg=cfg)
    return num / f(np.asarray(radii, float)) ** (float(es.p) - 1)


def el_residual(f, es, sample_radii, cfg: QuadratureConfig | None = None) -> float:
    """max_i |rho(r_i)/rho(r_1) - 1|; zero for a critical point of the ratio."""
    if isinstance(f, Bubble):
        f = f.radial()
    rho = el_ratios(f, es, sample_radii, cfg)
    return float(np.max(np.abs(rho / rho[0] - 1.0)))


def default_radii(d: float = 1.0, count: int = 8):
    """Log-spaced sample radii over two decades around 1/d."""
    return np.logspace(-1, 1, count) / d


# ---------------------------------------------------------------------------
# solution pair

@dataclass
class SolutionPair:
    """u (a U_SOLUTION bubble with calibrated amplitude) and the sampled field
    v = integral |x - y|^(alpha-n) u^-theta dy; ``calibration`` is the amplitude
    c1 of u, ``trace_amplitude`` the fitted c2 of v(., 0)."""
    es: ConformalIndices
    u: Bubble
    v: PotentialField
    calibration: float
    multipliers: np.ndarray
    trace_amplitude: float = float("nan")
    trace_exponent: float = float("nan")

    def with_amplitude(self, c: float) -> "SolutionPair":
        """The same profile with u amplitude c and the matching v (uncalibrated if c differs)."""
        theta = float(self.es.theta)
        v = self.v.scaled((c / self.u.c) ** (-theta))
        return replace(self, u=self.u.with_(c=c), v=v, calibration=c)


def _rhs(es, v: PotentialField, radii, cfg):
    """integral x_n^(beta(1-k)) |x-y|^(alpha-n) v^-k dx at |y| = radii."""
    beta, k = float(es.beta), float(es.k)
    return adjoint_integral(v, lambda V, r, t: t ** (beta * (1 - k)) * V ** (-k), radii,
                            kappa_s=_s_kappa(es), kappa_t=norm_kappa(es),
                            head_exponent=beta * (1 - k), cfg=cfg)


def make_solution_pair(n: int, alpha, beta, d: float = 1.0, cfg: QuadratureConfig | None = None,
                       *, test_radii=None, drift_tol: float = 1e-3) -> SolutionPair:
    """Build (u, v) with u a unit bubble, then rescale u so that
    u = integral x_n^(beta(1-k)) |x-y|^(alpha-n) v^-k dx holds at y = z0.

    Replacing u by c u turns v into c^-theta v and the right side into
    c^(theta k) times itself, so c = (u(z0)/rhs(z0))^(1/(theta k - 1)).
    The multiplier is also computed at ``test_radii``; conformal covariance
    makes it constant, so a spread above ``drift_tol`` means the quadrature
    failed.
    """
    es = conformal_indices(n, alpha, beta)
    theta, k = float(es.theta), float(es.k)
    u1 = Bubble(n, alpha, 1.0, d, kind=BubbleKind.U_SOLUTION)
    v1 = PotentialField.of(u1.power(-theta), n, float(alpha), kappa=norm_kappa(es),
                           head_exponent=float(es.beta * es.q), cfg=cfg)
    radii = np.concatenate([[0.0], default_radii(d) if test_radii is None else test_radii])
    ratio = u1.radial_profile(radii) / _rhs(es, v1, radii, cfg)
    mult = ratio ** (1.0 / (theta * k - 1))
    spread = float(np.max(np.abs(mult / mult[0] - 1)))
    if spread > drift_tol:
        raise CalibrationDrift(f"calibration multiplier varies by {spread:.3e} across test radii")
    c = float(mult[0])
    pair = SolutionPair(es, u1, v1, 1.0, mult).with_amplitude(c)
    pair.multipliers = mult
    amp, expo = fit_trace(pair, d)
    pair.trace_amplitude, pair.trace_exponent = amp, expo
    return pair


def fit_trace(pair: SolutionPair, d: float, decades: float = 3.0, count: int = 25):
    """Fit v(y, 0) = c2 (d/(1 + d^2 |y|^2))^gamma by least squares in log-log form
    over ``decades`` decades of |y| starting at 1/d; returns (c2, gamma)."""
    y = np.logspace(0, decades, count) / d
    vals = pair.v.direct(y, np.zeros_like(y))
    X = np.log(d / (1.0 + d * d * y * y))
    A = np.vstack([np.ones_like(X), X]).T
    (lc, gam), *_ = np.linalg.lstsq(A, np.log(vals), rcond=None)
    return float(math.exp(lc)), float(gam)


def asymptotics_check(pair: SolutionPair, radius: float | None = None,
                      cfg: QuadratureConfig | None = None) -> dict:
    """Both large-|x| limits against their integral predictions.

    u(y)/|y|^(alpha-n) -> integral x_n^(beta(1-k)) v^-k dx and
    v(0, x_n)/x_n^(alpha-n) -> integral u^-theta dy.
    """
    es = pair.es
    n, alpha, beta = es.n, float(es.alpha), float(es.beta)
    k, theta = float(es.k), float(es.theta)
    R = 1e3 / pair.u.d if radius is None else radius
    a = alpha - n
    u_limit = float(pair.u.radial_profile(R)) / R ** a
    u_integral = pair.v.integrate(lambda V, r, t: t ** (beta * (1 - k)) * V ** (-k))
    v_limit = float(pair.v.direct(np.array([0.0]), np.array([R]))[0]) / R ** a
    f = pair.u.power(-theta)
    v_integral = boundary_integral(f, n, decay=f.decay_exponent, scale=f.scale, cfg=cfg)
    return {"radius": R, "u_limit": u_limit, "u_integral": u_integral,
            "v_limit": v_limit, "v_integral": v_integral,
            "u_gap": abs(u_limit / u_integral - 1), "v_gap": abs(v_limit / v_integral - 1)}


def pohozaev_check(pair: SolutionPair, cfg: QuadratureConfig | None = None):
    """(integral u^(1-theta) dy, integral (x_n^beta v)^(1-k) dx, relative gap)."""
    es = pair.es
    n, beta = es.n, float(es.beta)
    k, theta = float(es.k), float(es.theta)
    f = pair.u.power(1 - theta)
    lhs = boundary_integral(f, n, decay=f.decay_exponent, scale=f.scale, cfg=cfg)
    rhs = pair.v.integrate(lambda V, r, t: (t ** beta * V) ** (1 - k))
    return lhs, rhs, abs(lhs / rhs - 1)


def pohozaev_exponent_residual(es: ConformalIndices):
    return pohozaev_relation(es.theta, es.k, es.n, es.alpha, es.beta)


def miscalibration_factor(es, factor: float) -> float:
    """Predicted change of lhs/rhs in ``pohozaev_check`` when u is multiplied by factor."""
    return factor ** (1 - float(es.theta) * float(es.k))
