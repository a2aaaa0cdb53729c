"""The operator T, the reversed norms, and the functional ratio for radial data.

For radial boundary data f(y) = f(|y|) the operator

    Tf(x) = x_n^beta * integral over R^{n-1} of |x - y|^(alpha-n) f(y) dy

depends on (r, t) = (|x'|, x_n) only and reduces to

    Tf(r, t) = t^beta * integral_0^inf f(s) s^(n-2) W(r, s, t) ds

with W the angular factor.  The beta-free part V = t^-beta Tf is smooth up
to the boundary; ``PotentialField`` samples it once on a polar grid in the
quarter plane (r, t) and serves both the outer integrals (at grid nodes) and
arbitrary-point evaluation (by panelwise Lagrange interpolation).
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .errors import NonFiniteSample, NonIntegrableTail, NonPositiveSample
from .indices import ExponentSet
from .quadrature import (QuadratureConfig, adaptive_1d, angle_axis, kink_integral, radial_axis,
                         semi_infinite, sphere_area)


@dataclass(frozen=True)
class RadialBoundaryFunction:
    """Radial boundary datum f(|y|) with the metadata the quadrature needs.

    ``scale`` is the length on which the profile varies, ``breakpoints``
    lists radii where it is not smooth, and ``support`` bounds it when it is
    compactly supported.
    """
    profile: Callable
    decay_exponent: float
    positivity: bool = True
    scale: float = 1.0
    breakpoints: tuple = ()
    support: float | None = None
    name: str = ""

    def __call__(self, r):
        return np.asarray(self.profile(np.asarray(r, dtype=float)), dtype=float)

    def scaled(self, lam: float, p: float, n: int) -> "RadialBoundaryFunction":
        """f^lam(y) = lam^((n-1)/p) f(lam y), which leaves ||f||_p unchanged."""
        amp = lam ** ((n - 1) / p)
        prof = self.profile
        return replace(self, profile=lambda r: amp * prof(lam * np.asarray(r, float)),
                       scale=self.scale / lam,
                       breakpoints=tuple(b / lam for b in self.breakpoints),
                       support=None if self.support is None else self.support / lam,
                       name=f"{self.name}^{lam:g}")

    def times(self, g: Callable, name: str = "") -> "RadialBoundaryFunction":
        """Pointwise product with a bounded factor g (same decay class)."""
        prof = self.profile
        return replace(self, profile=lambda r: prof(r) * g(r), name=name or self.name)


@dataclass(frozen=True)
class FieldSample:
    r: float
    x_n: float
    value: float


def _omega(n):
    return sphere_area(n - 2)


def check_decay(f: RadialBoundaryFunction, alpha: float):
    if f.support is None and not f.decay_exponent > alpha - 1:
        raise NonIntegrableTail(
            f"decay exponent {f.decay_exponent} must exceed alpha-1={alpha - 1} for Tf to converge")


def inner_kappa(f: RadialBoundaryFunction, alpha: float):
    """Decay exponent in s of f(s) s^(n-2) W(r, s, t)."""
    return f.decay_exponent - alpha + 2


def potential(f: RadialBoundaryFunction, n: int, alpha: float, r, t,
              cfg: QuadratureConfig | None = None):
    """V(r, t) = t^-beta Tf(r, t) at arrays of points (vectorized)."""
    check_decay(f, alpha)
    r, t = np.broadcast_arrays(np.asarray(r, float), np.asarray(t, float))
    shape = r.shape
    out = kink_integral(lambda s, tt: f(s), n, alpha, r.ravel(), t.ravel(), scale=f.scale,
                        kappa=inner_kappa(f, alpha), breakpoints=f.breakpoints,
                        support=f.support, cfg=cfg)
    return out.reshape(shape)


def apply_T(f: RadialBoundaryFunction, r, x_n, es: ExponentSet, cfg: QuadratureConfig | None = None):
    """Tf at (r, x_n); scalar or array input."""
    x_n = np.asarray(x_n, float)
    if np.any(x_n < 0):
        raise ValueError("x_n must be >= 0")
    v = potential(f, es.n, float(es.alpha), r, x_n, cfg)
    out = x_n ** float(es.beta) * v
    return float(out) if out.ndim == 0 else out


def apply_T_reference(f: RadialBoundaryFunction, r: float, x_n: float, es: ExponentSet,
                      cfg: QuadratureConfig | None = None) -> float:
    """Tf(r, x_n) by adaptive Gauss-Kronrod on the s-axis (slow reference path).

    The s-axis is split at the kink s = r, at the profile breakpoints and at
    the support edge; the unbounded piece uses the declared decay exponent.
    """
    from .quadrature import angular_factor
    n, alpha, beta = es.n, float(es.alpha), float(es.beta)
    check_decay(f, alpha)

    def g(s):
        return f(s) * s ** (n - 2) * angular_factor(n, r, s, x_n, alpha)

    cuts = sorted({c for c in (r, *f.breakpoints) if c > 0}
                  | ({f.support} if f.support else set()))
    end = f.support
    if end is not None:
        cuts = [c for c in cuts if c <= end]
    edges = [0.0] + cuts
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        if b > a:
            total += adaptive_1d(g, a, b, cfg).value
    if end is None:
        total += semi_infinite(g, edges[-1], inner_kappa(f, alpha), cfg,
                               scale=max(f.scale, x_n, r)).value
    return x_n ** beta * total


def boundary_integral(h, n: int, *, decay: float, scale: float = 1.0, breakpoints=(),
                      support=None, cfg: QuadratureConfig | None = None) -> float:
    """omega_{n-2} integral_0^inf h(r) r^(n-2) dr for radial h = O(r^-decay)."""
    def g(r):
        return h(r) * r ** (n - 2)

    cuts = sorted(b for b in breakpoints if b > 0)
    if support is not None:
        cuts = [c for c in cuts if c < support] + [support]
    edges = [0.0] + cuts
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        total += adaptive_1d(g, a, b, cfg).value
    if support is None:
        # one adaptive block over the core, then the truncated tail
        a0 = edges[-1]
        b0 = a0 + 4 * scale
        total += adaptive_1d(g, a0, b0, cfg).value
        total += semi_infinite(g, b0, decay - (n - 2), cfg, scale=scale).value
    return _omega(n) * total


def lp_boundary_norm(f: RadialBoundaryFunction, p: float, n: int,
                     cfg: QuadratureConfig | None = None) -> float:
    """(omega_{n-2} integral_0^inf f(r)^p r^(n-2) dr)^(1/p) for 0 < p < 1."""
    if not 0 < p < 1:
        raise ValueError(f"p={p} outside (0, 1)")
    p = float(p)

    def h(r):
        v = f(r)
        if np.any(v < 0):
            raise NonPositiveSample("boundary datum is negative")
        return v ** p

    total = boundary_integral(h, n, decay=f.decay_exponent * p, scale=f.scale,
                              breakpoints=f.breakpoints, support=f.support, cfg=cfg)
    return total ** (1.0 / p)


# ---------------------------------------------------------------------------
# sampled potential field

def norm_kappa(es: ExponentSet) -> float:
    """Decay exponent in |x| of (x_n^beta V)^q |x|^(n-1) for V ~ |x|^(alpha-n)."""
    return float(-es.q * (es.alpha + es.beta - es.n) - es.n + 1)


class PotentialField:
    """V = t^-beta Tf sampled on a polar grid of the quarter plane (r, t).

    Grid: R = |(r, t)| on log panels around ``scale`` with a power-law tail
    map (decay ``kappa`` of the intended outer integrands), and the polar
    angle phi = atan2(t, r) graded toward the boundary phi = 0 with the first
    panel flattened for t^head_exponent.
    """

    def __init__(self, n: int, alpha: float, values_fn, *, scale: float, kappa: float,
                 head_exponent: float = 0.0, cfg: QuadratureConfig | None = None,
                 direct_fn=None):
        cfg = cfg or QuadratureConfig()
        self.n, self.alpha, self.cfg = n, float(alpha), cfg
        self.scale = float(cfg.grid_scale or scale)
        self.R = radial_axis(self.scale, kappa, cfg)
        self.phi = angle_axis(cfg, head_exponent=head_exponent)
        RR, PP = np.meshgrid(self.R.nodes, self.phi.nodes, indexing="ij")
        self.r = RR * np.cos(PP)
        self.t = RR * np.sin(PP)
        self.values = np.asarray(values_fn(self.r.ravel(), self.t.ravel())).reshape(RR.shape)
        if not np.all(np.isfinite(self.values)):
            raise NonFiniteSample("potential field has non-finite samples")
        # r^(n-2) dr dt = R^(n-1) cos^(n-2) phi dR dphi
        self.weights = (_omega(n) * np.outer(self.R.weights * self.R.nodes ** (n - 1),
                                             self.phi.weights * np.cos(self.phi.nodes) ** (n - 2)))
        self._norm = self._normaliser(RR)
        self._direct = direct_fn

    @classmethod
    def of(cls, f: RadialBoundaryFunction, n: int, alpha: float, *, kappa: float,
           head_exponent: float = 0.0, cfg: QuadratureConfig | None = None):
        check_decay(f, alpha)
        return cls(n, alpha, lambda r, t: potential(f, n, alpha, r, t, cfg), scale=f.scale,
                   kappa=kappa, head_exponent=head_exponent, cfg=cfg,
                   direct_fn=lambda r, t: potential(f, n, alpha, r, t, cfg))

    def _normaliser(self, R):
        return (self.scale ** 2 + R ** 2) ** (0.5 * (self.alpha - self.n))

    def integrate(self, fun) -> float:
        """omega_{n-2} * integral of fun(V, r, t) r^(n-2) dr dt over the quarter plane."""
        vals = fun(self.values, self.r, self.t)
        return float(np.sum(self.weights * vals))

    def __call__(self, r, t, chunk: int = 40000):
        """Interpolated V at arbitrary points (r, t), r, t >= 0."""
        r, t = np.broadcast_arrays(np.asarray(r, float), np.asarray(t, float))
        shape = r.shape
        r, t = r.ravel(), t.ravel()
        out = np.empty(r.size)
        m = self.R.m
        table = self.values / self._norm
        ar = np.arange(m)
        for i in range(0, r.size, chunk):
            rc, tc = r[i:i + chunk], t[i:i + chunk]
            R = np.hypot(rc, tc)
            ph = np.arctan2(tc, rc)
            kr, wr = self.R.interpolation(R)
            kp, wp = self.phi.interpolation(ph)
            ir = kr[:, None] * m + ar
            ip = kp[:, None] * m + ar
            block = table[ir[:, :, None], ip[:, None, :]]
            out[i:i + chunk] = np.einsum("qi,qij,qj->q", wr, block, wp) * self._normaliser(R)
        return out.reshape(shape)

    def direct(self, r, t):
        """V at (r, t) by direct quadrature, bypassing the grid."""
        if self._direct is None:
            raise ValueError("field has no direct evaluator")
        return self._direct(r, t)

    def scaled(self, factor: float) -> "PotentialField":
        """The field of factor * f (T is linear)."""
        new = object.__new__(PotentialField)
        new.__dict__.update(self.__dict__)
        new.values = self.values * factor
        d = self._direct
        new._direct = None if d is None else (lambda r, t: factor * d(r, t))
        return new

    def combine(self, others, coeffs) -> "PotentialField":
        """The field of f + sum c_i g_i from the fields of f and g_i (same grid)."""
        for o in others:
            if o.scale != self.scale or o.values.shape != self.values.shape:
                raise ValueError("fields live on different grids")
        new = object.__new__(PotentialField)
        new.__dict__.update(self.__dict__)
        new.values = self.values + sum(c * o.values for c, o in zip(coeffs, others))
        new._direct = None
        return new


def adjoint_integral(field: PotentialField, weight_fn, radii, *, kappa_s: float, kappa_t: float,
                     head_exponent: float, cfg: QuadratureConfig | None = None):
    """integral over R^n_+ of |x - y|^(alpha-n) G(x) dx at boundary points |y| = radii,
    with G(r, t) = weight_fn(V(r, t), r, t) built from the interpolated field.

    The t-axis is a flattened head (t^head_exponent) plus log panels and a
    tail (decay kappa_t); each t-slice is a kinked s-integral (decay kappa_s).
    """
    cfg = cfg or field.cfg
    n, alpha = field.n, field.alpha
    tax = radial_axis(field.scale, kappa_t, cfg, head_exponent=head_exponent)
    radii = np.asarray(radii, float)
    rr = np.repeat(radii, tax.size)
    tt = np.tile(tax.nodes, radii.size)

    def h(s, t):
        tb = np.broadcast_to(t, s.shape)
        return weight_fn(field(s, tb), s, tb)

    inner = kink_integral(h, n, alpha, rr, tt, scale=field.scale, kappa=kappa_s, cfg=cfg,
                          chunk_elems=600_000)
    return (inner.reshape(radii.size, tax.size) * tax.weights).sum(axis=1)


def lq_halfspace_norm(g, q: float, n: int, *, scale: float = 1.0, kappa: float | None = None,
                      boundary_exponent: float = 0.0, domain=None,
                      cfg: QuadratureConfig | None = None) -> float:
    """(omega_{n-2} * integral of g(r, x_n)^q r^(n-2) dr dx_n)^(1/q) for q < 0.

    ``kappa`` is the decay exponent in |x| of g^q |x|^(n-1) and
    ``boundary_exponent`` the power of x_n that g^q behaves like near x_n = 0.
    ``domain=(r_max, t_max)`` restricts to the box [0, r_max] x [0, t_max]
    (a tensor Gauss-Legendre rule with flattened x_n = 0 end).
    """
    if not q < 0:
        raise ValueError(f"q={q} must be negative")
    cfg = cfg or QuadratureConfig()
    if domain is not None:
        from .quadrature import HEAD, LIN, PanelAxis
        rmax, tmax = domain
        m = cfg.nodes_per_panel
        rax = PanelAxis([(LIN, i * rmax / 8, (i + 1) * rmax / 8, 0.0) for i in range(8)], m)
        c = 1.0 / (1.0 + boundary_exponent)
        tax = PanelAxis([(HEAD, 0.0, 1.0, tmax, c)], m)
        rr, tt = np.meshgrid(rax.nodes, tax.nodes, indexing="ij")
        w = _omega(n) * np.outer(rax.weights * rax.nodes ** (n - 2), tax.weights)
    else:
        if kappa is None:
            raise NonIntegrableTail("decay metadata (kappa) is required on the full half-space")
        rax = radial_axis(scale, kappa, cfg)
        pax = angle_axis(cfg, head_exponent=boundary_exponent)
        RR, PP = np.meshgrid(rax.nodes, pax.nodes, indexing="ij")
        rr, tt = RR * np.cos(PP), RR * np.sin(PP)
        w = _omega(n) * np.outer(rax.weights * rax.nodes ** (n - 1),
                                 pax.weights * np.cos(pax.nodes) ** (n - 2))
    vals = np.asarray(g(rr, tt), float)
    if np.any(~(vals > 0)):
        raise NonPositiveSample("g must be strictly positive for a negative exponent")
    return float(np.sum(w * vals ** q)) ** (1.0 / q)


def tf_norm(field: PotentialField, es: ExponentSet) -> float:
    """||Tf||_q from a field built for f."""
    q, beta = float(es.q), float(es.beta)
    if np.any(field.values <= 0):
        raise NonPositiveSample("Tf must be strictly positive")
    return field.integrate(lambda V, r, t: t ** (beta * q) * V ** q) ** (1.0 / q)


def field_for(f: RadialBoundaryFunction, es: ExponentSet, cfg: QuadratureConfig | None = None):
    """The potential field of f on the grid suited to ||Tf||_q."""
    return PotentialField.of(f, es.n, float(es.alpha), kappa=norm_kappa(es),
                             head_exponent=float(es.beta * es.q), cfg=cfg)


def functional_ratio(f: RadialBoundaryFunction, es: ExponentSet,
                     cfg: QuadratureConfig | None = None, *, field: PotentialField | None = None) -> float:
    """||Tf||_q / ||f||_p."""
    if field is None:
        field = field_for(f, es, cfg)
    return tf_norm(field, es) / lp_boundary_norm(f, float(es.p), es.n, cfg)
