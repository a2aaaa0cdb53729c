"""One-dimensional quadrature and the dimension-reduction integrals.

Two families of rules live here:

* ``adaptive_1d`` / ``semi_infinite``: a globally adaptive Gauss-Kronrod
  (7/15) integrator for scalar 1-D problems with error estimates.
* Panelized Gauss-Legendre rules (``PanelAxis`` and ``kink_integral``):
  fixed, vectorized composite rules on log/tail/head-mapped panels used for
  the nested half-space integrals, where thousands of 1-D integrals are
  evaluated at once.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache
import math

import numpy as np
from scipy import special

from .errors import InvalidIndex, NonFiniteSample, NonIntegrableTail, NotConverged


@dataclass(frozen=True)
class QuadratureConfig:
    rel_tol: float = 1e-8
    abs_tol: float = 1e-12
    max_refinements: int = 30
    tail_decay_margin: float = 2.0
    # panelized rules
    nodes_per_panel: int = 10
    log_span_below: float = 34.0
    log_span_above: float = 4.0
    log_panels: int = 24
    upper_panels: int = 8
    kink_levels: int = 18
    kink_ratio: float = 4.0
    tail_levels: int = 20
    tail_ratio: float = 4.0
    radial_span_below: float = 24.0
    radial_span_above: float = 6.0
    radial_panel_width: float = 1.5
    angle_levels: int = 10
    angle_ratio: float = 3.0
    # reference length of the outer grids; None means "use the profile scale"
    grid_scale: float | None = None

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_refinements < 1:
            raise ValueError("max_refinements must be >= 1")

    def with_(self, **kw) -> "QuadratureConfig":
        return replace(self, **kw)

    def tightened(self, factor: float = 10.0) -> "QuadratureConfig":
        return replace(self, rel_tol=self.rel_tol / factor, abs_tol=self.abs_tol / factor)


FAST = QuadratureConfig(nodes_per_panel=8, log_panels=20, upper_panels=6, kink_levels=16,
                        tail_levels=16, angle_levels=8)


@dataclass(frozen=True)
class IntegralResult:
    value: float
    error_estimate: float
    evaluations: int
    converged: bool

    def __float__(self):
        return float(self.value)


# ---------------------------------------------------------------------------
# special values

def gamma_half_integer(x) -> float:
    """Gamma at positive integers and half-integers, no library call."""
    twice = 2 * x
    if twice != int(twice) or x <= 0:
        raise ValueError(f"gamma_half_integer needs a positive (half-)integer, got {x}")
    twice = int(twice)
    if twice % 2 == 0:
        return float(math.factorial(twice // 2 - 1))
    k = (twice - 1) // 2  # x = k + 1/2
    return math.factorial(2 * k) * math.sqrt(math.pi) / (4 ** k * math.factorial(k))


def unit_ball_volume(n: int) -> float:
    return math.pi ** (n / 2) / gamma_half_integer(n / 2 + 1)


def sphere_area(k: int) -> float:
    """Surface area of the unit sphere S^k in R^{k+1}; S^0 counts two points."""
    if k < 0:
        raise ValueError("sphere dimension must be >= 0")
    return 2 * math.pi ** ((k + 1) / 2) / gamma_half_integer((k + 1) / 2)


# ---------------------------------------------------------------------------
# adaptive Gauss-Kronrod

_XGK = np.array([0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                 0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                 0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                 0.207784955007898467600689403773245, 0.0])
_WGK = np.array([0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                 0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                 0.204432940075298892414161999234649, 0.209482141084727828012999174891714])
_WG = np.array([0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                0.381830050505118944950369775488975, 0.417959183673469387755102040816327])

_GK_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_GK_WK = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GK_WG = np.zeros(15)
_GK_WG[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])


def _call(f, x):
    y = np.asarray(f(x), dtype=float)
    if y.shape != x.shape:
        y = np.broadcast_to(y, x.shape) if y.ndim == 0 else np.array([f(v) for v in x.ravel()],
                                                                     dtype=float).reshape(x.shape)
    return y


def _gk_batch(g, lo, hi):
    c = 0.5 * (lo + hi)
    h = 0.5 * (hi - lo)
    x = c[:, None] + h[:, None] * _GK_NODES[None, :]
    y = _call(g, x)
    if not np.all(np.isfinite(y)):
        bad = x[~np.isfinite(y)][0]
        raise NonFiniteSample(f"integrand is not finite at interior point {bad!r}")
    k = h * (y @ _GK_WK)
    gauss = h * (y @ _GK_WG)
    return k, np.abs(k - gauss)


def adaptive_1d(f, a: float, b: float, cfg: QuadratureConfig | None = None, *,
                raise_on_fail: bool = True, max_intervals: int = 20000) -> IntegralResult:
    """Integrate ``f`` over [a, b] by globally adaptive Gauss-Kronrod 7/15.

    The interval is first mapped by x = c + h (3v - v^3)/2, which vanishes to
    first order at both ends and so flattens algebraic endpoint singularities.
    ``f`` must accept numpy arrays.
    """
    cfg = cfg or QuadratureConfig()
    if not (math.isfinite(a) and math.isfinite(b)) or not a < b:
        raise ValueError(f"need finite a < b, got ({a}, {b})")
    c0, h0 = 0.5 * (a + b), 0.5 * (b - a)

    def g(v):
        return _call(f, c0 + h0 * (1.5 * v - 0.5 * v ** 3)) * (h0 * 1.5 * (1.0 - v * v))

    lo = np.array([-1.0, 0.0])
    hi = np.array([0.0, 1.0])
    depth = np.zeros(2, dtype=int)
    val, err = _gk_batch(g, lo, hi)
    nev = 30
    while True:
        total = val.sum()
        etot = err.sum()
        tol = max(cfg.abs_tol, cfg.rel_tol * abs(total))
        if etot <= tol:
            return IntegralResult(float(total), float(etot), nev, True)
        share = tol * (hi - lo) / 2.0
        split = (err > share) & (depth < cfg.max_refinements)
        if not split.any() or lo.size > max_intervals:
            if raise_on_fail:
                raise NotConverged("adaptive_1d did not reach tolerance", float(total), float(etot))
            return IntegralResult(float(total), float(etot), nev, False)
        mid = 0.5 * (lo[split] + hi[split])
        nlo = np.concatenate([lo[split], mid])
        nhi = np.concatenate([mid, hi[split]])
        ndep = np.concatenate([depth[split], depth[split]]) + 1
        nval, nerr = _gk_batch(g, nlo, nhi)
        nev += 15 * nlo.size
        keep = ~split
        lo = np.concatenate([lo[keep], nlo])
        hi = np.concatenate([hi[keep], nhi])
        depth = np.concatenate([depth[keep], ndep])
        val = np.concatenate([val[keep], nval])
        err = np.concatenate([err[keep], nerr])


def semi_infinite(f, a: float, decay_exponent: float, cfg: QuadratureConfig | None = None, *,
                  scale: float = 1.0) -> IntegralResult:
    """Integrate f over [a, inf) given |f(t)| = O(t^-decay_exponent).

    The truncation radius R is chosen so that the analytic tail bound
    C R^(1-delta)/(delta-1) falls below ``abs_tol``, with C estimated from
    samples and R multiplied by ``tail_decay_margin``. ``decay_exponent=inf``
    declares faster-than-power decay; R is then found by doubling until
    |f(R)| R < abs_tol.
    """
    cfg = cfg or QuadratureConfig()
    delta = decay_exponent
    if not delta > 1:
        raise NonIntegrableTail(f"decay exponent {delta} <= 1")
    t0 = max(abs(a), scale, 1e-300)
    samples = t0 * 2.0 ** np.arange(2, 12)
    fs = np.abs(_call(f, samples))
    if math.isinf(delta):
        R = samples[0]
        while abs(float(_call(f, np.array([R]))[0])) * R > cfg.abs_tol and R < 1e300:
            R *= 2.0
        R *= cfg.tail_decay_margin
        tail_bound = 0.0
    else:
        C = float(np.max(fs * samples ** delta))
        if C == 0.0:
            R = samples[-1]
        else:
            R = (C / ((delta - 1) * cfg.abs_tol)) ** (1.0 / (delta - 1))
        R = cfg.tail_decay_margin * max(R, samples[-1])
        tail_bound = C * R ** (1 - delta) / (delta - 1)
    # geometric blocks keep each adaptive run on a well-scaled interval
    edges = [a]
    step = scale
    while edges[-1] < R:
        edges.append(min(R, edges[-1] + step))
        step *= 2.0
    nblk = len(edges) - 1
    sub = cfg.with_(abs_tol=cfg.abs_tol / nblk)
    total, etot, nev = 0.0, tail_bound, 0
    for lo, hi in zip(edges[:-1], edges[1:]):
        res = adaptive_1d(f, lo, hi, sub)
        total += res.value
        etot += res.error_estimate
        nev += res.evaluations
    return IntegralResult(total, etot, nev, True)


# ---------------------------------------------------------------------------
# dimension reductions

def _check_alpha(n, alpha):
    if not alpha > n:
        raise InvalidIndex(f"alpha={alpha} must exceed n={n}")


def angular_factor(n: int, r, s, x_n, alpha: float):
    """Integral over S^{n-2} of (r^2 + s^2 - 2 r s w_1 + x_n^2)^((alpha-n)/2).

    n = 2 is the two-point sum over S^0.  For n >= 3 the polar-angle integral
    is evaluated in closed form through a Gauss hypergeometric function.
    Broadcasts over array arguments.
    """
    _check_alpha(n, alpha)
    a = 0.5 * (alpha - n)
    r, s, x_n = np.asarray(r, float), np.asarray(s, float), np.asarray(x_n, float)
    t2 = x_n * x_n
    if n == 2:
        return _pw((r - s) ** 2 + t2, a) + _pw((r + s) ** 2 + t2, a)
    A = r * r + s * s + t2
    z = np.divide(2 * r * s, A, out=np.zeros(np.broadcast(r, s, A).shape), where=A > 0)
    m = n - 3
    const = sphere_area(n - 3) * special.beta(0.5, (m + 1) / 2)
    return const * _pw(A, a) * special.hyp2f1(-a / 2, (1 - a) / 2, (n - 1) / 2, z * z)


def angular_factor_quad(n: int, r: float, s: float, x_n: float, alpha: float,
                        cfg: QuadratureConfig | None = None) -> float:
    """Reference evaluation of ``angular_factor`` by adaptive quadrature."""
    _check_alpha(n, alpha)
    a = 0.5 * (alpha - n)
    if n == 2:
        return float(angular_factor(2, r, s, x_n, alpha))
    A = r * r + s * s + x_n * x_n
    if n == 3:
        res = adaptive_1d(lambda th: (A - 2 * r * s * np.cos(th)) ** a, 0.0, 2 * math.pi, cfg)
        return res.value
    res = adaptive_1d(lambda th: (A - 2 * r * s * np.cos(th)) ** a * np.sin(th) ** (n - 3),
                      0.0, math.pi, cfg)
    return sphere_area(n - 3) * res.value


def _pw(x, a):
    if a == 0.5:
        return np.sqrt(x)
    if a == 1.0:
        return x
    return x ** a


def sphere_pair(n: int, rho: float, alpha: float, cfg: QuadratureConfig | None = None) -> float:
    """g(rho): integral over the unit sphere of |eta - xi|^(alpha-n), |xi| = rho."""
    _check_alpha(n, alpha)
    if not 0 <= rho <= 1:
        raise ValueError(f"rho={rho} outside [0, 1]")
    a = 0.5 * (alpha - n)
    if rho == 0:
        return sphere_area(n - 1)
    res = adaptive_1d(lambda th: np.maximum(1 + rho * rho - 2 * rho * np.cos(th), 0.0) ** a
                      * np.sin(th) ** (n - 2), 0.0, math.pi, cfg)
    return sphere_area(n - 2) * res.value


def ball_radial(n: int, h, cfg: QuadratureConfig | None = None, *,
                endpoint_exponent: float = 0.0, factored: bool = False) -> IntegralResult:
    """n nu_n * integral_0^1 h(rho) rho^(n-1) d rho.

    ``endpoint_exponent`` gamma declares h ~ (1-rho)^gamma at rho = 1; for
    gamma != 0 the substitution rho = 1 - u^(1/(1+gamma)) removes it.  With
    ``factored=True`` the caller passes the regular part h(rho)/(1-rho)^gamma
    instead, and the singular factor is cancelled analytically (no rounding of
    1 - rho near the endpoint).
    """
    gam = endpoint_exponent
    if not gam > -1:
        raise NonIntegrableTail(f"endpoint exponent {gam} <= -1")
    area = n * unit_ball_volume(n)
    if gam == 0:
        res = adaptive_1d(lambda r: h(r) * r ** (n - 1), 0.0, 1.0, cfg)
    else:
        c = 1.0 / (1.0 + gam)

        def g(u):
            rho = 1.0 - u ** c
            if factored:
                # (1-rho)^gam |d rho/du| = c exactly
                return h(rho) * c * rho ** (n - 1)
            return h(rho) * c * u ** (c - 1) * rho ** (n - 1)

        res = adaptive_1d(g, 0.0, 1.0, cfg)
    return IntegralResult(area * res.value, area * res.error_estimate, res.evaluations, res.converged)


# ---------------------------------------------------------------------------
# panelized Gauss-Legendre rules

@lru_cache(maxsize=None)
def gauss_legendre(m: int):
    """Nodes in (-1, 1), weights, and barycentric weights."""
    x, w = np.polynomial.legendre.leggauss(m)
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    bary = 1.0 / diff.prod(axis=1)
    return x, w, bary


def composite(breaks, m: int):
    """Gauss-Legendre on consecutive panels; breaks has shape (..., K)."""
    x, w, _ = gauss_legendre(m)
    a = breaks[..., :-1, None]
    b = breaks[..., 1:, None]
    h = 0.5 * (b - a)
    nodes = (0.5 * (a + b) + h * x).reshape(*breaks.shape[:-1], -1)
    weights = (h * w).reshape(*breaks.shape[:-1], -1)
    return nodes, weights


LOG, TAIL, HEAD, LIN = 0, 1, 2, 3


class PanelAxis:
    """A half-line (or interval) cut into panels, each with its own variable.

    Panel kinds: LOG (x = e^u), TAIL (x = S u^-e for u in (0, 1]),
    HEAD (x = H u^c for u in (0, 1]) and LIN (x = u).  Every panel carries
    an m-point Gauss-Legendre rule in its local variable, which gives both a
    quadrature rule (``nodes``, ``weights`` for dx) and a spectrally accurate
    piecewise interpolant.
    """

    def __init__(self, panels, m: int):
        self.m = m
        self.kind = np.array([p[0] for p in panels], dtype=int)
        self.ulo = np.array([p[1] for p in panels], dtype=float)
        self.uhi = np.array([p[2] for p in panels], dtype=float)
        self.par = np.array([p[3] for p in panels], dtype=float)
        self.par2 = np.array([p[4] if len(p) > 4 else 0.0 for p in panels], dtype=float)
        x, w, _ = gauss_legendre(m)
        h = 0.5 * (self.uhi - self.ulo)
        u = 0.5 * (self.ulo + self.uhi)[:, None] + h[:, None] * x
        X, J = self._to_x(u, self.kind[:, None], self.par[:, None], self.par2[:, None])
        self.nodes = X.ravel()
        self.weights = (h[:, None] * w * J).ravel()
        lo, _ = self._to_x(self.ulo, self.kind, self.par, self.par2)
        hi, _ = self._to_x(self.uhi, self.kind, self.par, self.par2)
        self.xlo = np.minimum(lo, hi)
        self.xhi = np.maximum(lo, hi)
        order = np.argsort(self.xlo)
        if not np.array_equal(order, np.arange(order.size)):
            raise ValueError("panels must be listed in increasing x")

    @staticmethod
    def _to_x(u, kind, par, par2):
        u = np.asarray(u, float)
        out = np.empty(np.broadcast(u, kind).shape)
        jac = np.empty_like(out)
        kb = np.broadcast_to(kind, out.shape)
        pb = np.broadcast_to(par, out.shape)
        qb = np.broadcast_to(par2, out.shape)
        ub = np.broadcast_to(u, out.shape)
        m = kb == LOG
        out[m] = np.exp(ub[m])
        jac[m] = out[m]
        m = kb == TAIL
        with np.errstate(divide="ignore", over="ignore"):
            out[m] = pb[m] * ub[m] ** (-qb[m])
            jac[m] = pb[m] * qb[m] * ub[m] ** (-qb[m] - 1)
        m = kb == HEAD
        with np.errstate(divide="ignore"):
            out[m] = pb[m] * ub[m] ** qb[m]
            jac[m] = pb[m] * qb[m] * ub[m] ** (qb[m] - 1)
        m = kb == LIN
        out[m] = ub[m]
        jac[m] = 1.0
        return out, jac

    def _to_u(self, x, k):
        kind, par, par2 = self.kind[k], self.par[k], self.par2[k]
        u = np.empty_like(x)
        m = kind == LOG
        u[m] = np.log(x[m])
        m = kind == TAIL
        u[m] = (x[m] / par[m]) ** (-1.0 / par2[m])
        m = kind == HEAD
        u[m] = (x[m] / par[m]) ** (1.0 / par2[m])
        m = kind == LIN
        u[m] = x[m]
        return u

    @property
    def size(self):
        return self.nodes.size

    def interpolation(self, x):
        """Panel index and (Q, m) Lagrange weights for query points x."""
        x = np.asarray(x, float).ravel()
        xc = np.clip(x, self.xlo[0], self.xhi[-1])
        k = np.clip(np.searchsorted(self.xlo, xc, side="right") - 1, 0, self.kind.size - 1)
        u = self._to_u(xc, k)
        h = 0.5 * (self.uhi[k] - self.ulo[k])
        t = (u - 0.5 * (self.ulo[k] + self.uhi[k])) / h
        t = np.clip(t, -1.0, 1.0)
        nodes, _, bary = gauss_legendre(self.m)
        d = t[:, None] - nodes[None, :]
        hit = d == 0.0
        d[hit] = 1.0
        lw = bary / d
        lw /= lw.sum(axis=1, keepdims=True)
        rows = hit.any(axis=1)
        if rows.any():
            lw[rows] = hit[rows].astype(float)
        return k, lw


def radial_axis(scale: float, kappa: float, cfg: QuadratureConfig, *,
                head_exponent: float | None = None) -> PanelAxis:
    """Log panels around ``scale`` plus a power-law tail map beyond them.

    ``kappa`` is the decay exponent of the integrand in x (must be > 1).
    With ``head_exponent`` b the interval below the first log panel is
    covered too, by a panel flattened for an x^b endpoint behaviour.
    """
    if not kappa > 1:
        raise NonIntegrableTail(f"integrand decay exponent {kappa} <= 1")
    m = cfg.nodes_per_panel
    lo = math.log(scale) - cfg.radial_span_below
    hi = math.log(scale) + cfg.radial_span_above
    npan = max(1, int(math.ceil((hi - lo) / cfg.radial_panel_width)))
    edges = np.linspace(lo, hi, npan + 1)
    panels = [(LOG, a, b, 0.0) for a, b in zip(edges[:-1], edges[1:])]
    if head_exponent is not None:
        if not head_exponent > -1:
            raise NonIntegrableTail(f"endpoint exponent {head_exponent} <= -1")
        panels.insert(0, (HEAD, 0.0, 1.0, math.exp(lo), 1.0 / (1.0 + head_exponent)))
    panels += tail_panels(math.exp(hi), kappa, cfg)
    return PanelAxis(panels, m)


def tail_panels(start: float, kappa: float, cfg: QuadratureConfig):
    e = 1.0 / (kappa - 1.0)
    ratio = cfg.tail_ratio
    levels = cfg.tail_levels
    # keep x = start * u^-e below 1e150
    umin = (start / 1e150) ** (1.0 / e) if start < 1e150 else 1.0
    levels = max(1, min(levels, int(math.log(1.0 / max(umin, 1e-300)) / math.log(ratio))))
    edges = ratio ** -np.arange(levels, -1, -1.0)
    # panels listed in increasing x, i.e. decreasing u
    return [(TAIL, a, b, start, e) for a, b in zip(edges[:-1], edges[1:])][::-1]


def angle_axis(cfg: QuadratureConfig, *, head_exponent: float = 0.0) -> PanelAxis:
    """Angles in (0, pi/2), geometrically graded toward 0, with the first
    panel flattened for an integrand behaving like phi^head_exponent."""
    ratio, levels, m = cfg.angle_ratio, cfg.angle_levels, cfg.nodes_per_panel
    if not head_exponent > -1:
        raise NonIntegrableTail(f"boundary exponent {head_exponent} <= -1")
    cuts = (math.pi / 2) * ratio ** -np.arange(levels, -1, -1.0)
    panels = [(HEAD, 0.0, 1.0, cuts[0], 1.0 / (1.0 + head_exponent))]
    panels += [(LIN, a, b, 0.0) for a, b in zip(cuts[:-1], cuts[1:])]
    return PanelAxis(panels, m)


# ---------------------------------------------------------------------------
# kinked radial integrals

def kink_integral(h, n: int, alpha: float, r, t, *, scale: float, kappa: float,
                  breakpoints=(), support=None, cfg: QuadratureConfig | None = None,
                  chunk_elems: int = 1_500_000):
    """For each point (r_i, t_i) return integral_0^inf h(s, t_i) s^(n-2) W(r_i, s, t_i) ds,
    where W is ``angular_factor``.

    The s-axis is cut into log panels; around the kink at s = r_i of width
    t_i the cuts are graded geometrically, and a power-law tail map with
    integrand decay exponent ``kappa`` covers s beyond the last log panel
    (skipped when ``support`` bounds h).  ``h(s, t)`` receives s of shape
    (P, N) and t of shape (P, 1).
    """
    cfg = cfg or QuadratureConfig()
    r = np.asarray(r, float).ravel()
    t = np.asarray(t, float).ravel()
    r, t = np.broadcast_arrays(r, t)
    m = cfg.nodes_per_panel
    ls = math.log(scale)
    slo = ls - cfg.log_span_below
    jl = np.arange(-1, cfg.kink_levels, dtype=float)
    kink_off = cfg.kink_ratio ** jl
    bps = np.log(np.asarray([b for b in breakpoints if b > 0], float))
    if support is None and not kappa > 1:
        raise NonIntegrableTail(f"integrand decay exponent {kappa} <= 1")
    tx, tw, _ = gauss_legendre(m)
    tail_u = None
    # faster than any power: truncate e^(log_span_above + 1) scales out, no tail map
    fast = support is None and math.isinf(kappa)
    top = ls + cfg.log_span_above + (1.0 if fast else 0.0)
    upper = np.linspace(0.0, 1.0, cfg.upper_panels + 1)
    if support is None and not fast:
        tp = tail_panels(1.0, kappa, cfg)
        e = 1.0 / (kappa - 1.0)
        ulo = np.array([p[1] for p in tp])
        uhi = np.array([p[2] for p in tp])
        hh = 0.5 * (uhi - ulo)
        tail_u = (0.5 * (ulo + uhi)[:, None] + hh[:, None] * tx).ravel()
        tail_wu = (hh[:, None] * tw).ravel()
        umin = float(ulo.min())
        imin = int(np.argmin(tail_u))
    npts = r.size
    per = ((cfg.log_panels + cfg.upper_panels + 2 * jl.size + bps.size + 2) * m
           + (0 if tail_u is None else tail_u.size))
    csize = max(1, chunk_elems // per)
    out = np.empty(npts)
    for i0 in range(0, npts, csize):
        rc = r[i0:i0 + csize]
        tc = t[i0:i0 + csize]
        P = rc.size
        with np.errstate(divide="ignore"):
            lr = np.log(rc)
        if support is None:
            shi = np.maximum(top, np.log(rc + tc) + 1.5)
        else:
            shi = np.full(P, math.log(support))
        core = np.linspace(slo, top, cfg.log_panels + 1)
        # panels between the profile scale and the evaluation point, if it is far out
        far = top + (np.maximum(shi, top) - top)[:, None] * upper
        uni = np.concatenate([np.broadcast_to(core, (P, core.size)), far], axis=1)
        with np.errstate(invalid="ignore", divide="ignore"):
            eps = np.where(rc > 0, tc / rc, np.inf)
        off = np.minimum(eps[:, None] * kink_off, 2.0)
        centre = np.where(rc > 0, lr, slo)[:, None]
        kinks = np.concatenate([centre - off, centre + off, centre], axis=1)
        parts = [uni, kinks]
        if bps.size:
            parts.append(np.broadcast_to(bps, (P, bps.size)))
        br = np.concatenate(parts, axis=1)
        br = np.clip(br, slo, shi[:, None])
        br.sort(axis=1)
        sig, wsig = composite(br, m)
        s = np.exp(sig)
        ws = wsig * s
        tcol = tc[:, None]
        if tail_u is not None:
            S = np.exp(shi)[:, None]
            with np.errstate(over="ignore"):
                st = S * tail_u ** (-e)
                wt = S * e * tail_u ** (-e - 1) * tail_wu
            s = np.concatenate([s, st], axis=1)
            ws = np.concatenate([ws, wt], axis=1)
        vals = h(s, tcol) * angular_factor(n, rc[:, None], s, tcol, alpha)
        if n != 2:
            vals = vals * s ** (n - 2)
        vals = np.where(ws == 0.0, 0.0, vals)
        tot = (vals * ws).sum(axis=1)
        if tail_u is not None:
            # the uncovered piece u in (0, umin) of the tail map: integrand ~ constant there
            k = ws.shape[1] - tail_u.size + imin
            tot += vals[:, k] * ws[:, k] / tail_wu[imin] * umin
        out[i0:i0 + csize] = tot
    return out
