"""The sharp constant C*: the ball/sphere formula, the direct half-space ratio
of the flat extremal, golden values, and a simplex search over perturbed
bubbles."""
from __future__ import annotations

from dataclasses import dataclass, replace
import hashlib
import math
from pathlib import Path

import numpy as np
from scipy import optimize

from .errors import NotConverged, PositivityViolated
from .extremals import Bubble, FlatExtremal
from .indices import conformal_indices
from .operator import (RadialBoundaryFunction, field_for, lp_boundary_norm, tf_norm)
from .quadrature import QuadratureConfig, ball_radial, sphere_pair, unit_ball_volume

GOLDEN_PATH = Path(__file__).with_name("goldens.txt")
GOLDEN_FIELDS = ("ball_value", "direct_value", "error_budget", "oracle_config_hash")
GOLDEN_DECIMALS = 15


@dataclass(frozen=True)
class SharpConstantResult:
    ball_formula_value: float
    direct_value: float
    relative_gap: float
    error_budget: float

    def __post_init__(self):
        for v in (self.ball_formula_value, self.direct_value):
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"sharp constant values must be positive and finite, got {v}")


def _pair_integrand(n, alpha, beta, q):
    """Regular part of (((1-rho^2)/2)^beta g(rho))^q after removing (1-rho)^(beta q)."""
    def h(rho):
        rho = np.asarray(rho, float)
        g = np.array([sphere_pair(n, float(x), alpha) for x in rho.ravel()]).reshape(rho.shape)
        return ((1 + rho) / 2) ** (beta * q) * g ** q
    return h


def c_star_ball(n: int, alpha, beta, cfg: QuadratureConfig | None = None) -> float:
    """C* from the ball formula, with g the sphere-pair integral:

    (n nu_n)^(-(n+alpha-2)/(2(n-1))) [n nu_n int_0^1 (((1-rho^2)/2)^beta g(rho))^q rho^(n-1) d rho]^(1/q).
    """
    es = conformal_indices(n, alpha, beta)
    alpha, beta, q = float(es.alpha), float(es.beta), float(es.q)
    try:
        res = ball_radial(n, _pair_integrand(n, alpha, beta, q), cfg,
                          endpoint_exponent=beta * q, factored=True)
    except NotConverged as exc:
        raise NotConverged(f"ball integral did not converge (endpoint rho=1, exponent {beta * q + 0.0:g})",
                           exc.value, exc.error_estimate) from exc
    area = n * unit_ball_volume(n)
    return area ** (-(n + alpha - 2) / (2 * (n - 1))) * res.value ** (1 / q)


def c_star_ball_error(n, alpha, beta, cfg=None) -> float:
    """Relative error estimate of ``c_star_ball`` (propagated through the 1/q power)."""
    es = conformal_indices(n, alpha, beta)
    q, b = float(es.q), float(es.beta)
    res = ball_radial(n, _pair_integrand(n, float(alpha), b, q), cfg, endpoint_exponent=b * q, factored=True)
    return abs(res.error_estimate / res.value / q)


def c_star_direct(n: int, alpha, beta, cfg: QuadratureConfig | None = None, *, lam: float = 2.0,
                  details: bool = False):
    """||T f||_q / ||f||_p for the flat extremal f = (lam/|y - x0|)^(n+alpha-2), computed
    in half-space coordinates."""
    es = conformal_indices(n, alpha, beta)
    f = FlatExtremal(n, float(alpha), lam).radial()
    num = tf_norm(field_for(f, es, cfg), es)
    den = lp_boundary_norm(f, float(es.p), n, cfg)
    if details:
        return num / den, {"tf_norm": num, "f_norm": den,
                           "f_norm_closed_form": FlatExtremal(n, float(alpha), lam).norm_closed_form()}
    return num / den


def refined(cfg: QuadratureConfig | None) -> QuadratureConfig:
    """A strictly finer panel configuration for a posteriori error estimates."""
    cfg = cfg or QuadratureConfig()
    return cfg.with_(nodes_per_panel=cfg.nodes_per_panel + 4, kink_levels=cfg.kink_levels + 2,
                     tail_levels=cfg.tail_levels + 4, angle_levels=cfg.angle_levels + 2,
                     radial_panel_width=cfg.radial_panel_width * 0.75,
                     rel_tol=cfg.rel_tol / 10, abs_tol=cfg.abs_tol / 10)


def sharp_constant(n: int, alpha, beta, cfg: QuadratureConfig | None = None, *,
                   estimate_error: bool = False) -> SharpConstantResult:
    ball = c_star_ball(n, alpha, beta, cfg)
    direct = c_star_direct(n, alpha, beta, cfg)
    budget = c_star_ball_error(n, alpha, beta, cfg)
    if estimate_error:
        budget += abs(c_star_direct(n, alpha, beta, refined(cfg)) - direct) / ball
    return SharpConstantResult(ball, direct, abs(ball - direct) / ball, budget)


# ---------------------------------------------------------------------------
# golden values

def _key(n, alpha, beta):
    return (int(n), float(alpha), float(beta))


def config_hash(obj) -> str:
    return hashlib.sha256(repr(obj).encode()).hexdigest()[:16]


def format_golden(n, alpha, beta, record: dict) -> str:
    parts = [f"n={int(n)}", f"alpha={float(alpha):.6f}", f"beta={float(beta):.6f}"]
    for k in GOLDEN_FIELDS:
        v = record[k]
        parts.append(f"{k}={v}" if isinstance(v, str) else f"{k}={v:.{GOLDEN_DECIMALS}f}")
    return " ".join(parts)


def write_goldens(records: dict, path: Path = GOLDEN_PATH):
    lines = ["# sharp-constant goldens; one record per (n, alpha, beta)"]
    lines += [format_golden(*key, rec) for key, rec in sorted(records.items())]
    path.write_text("\n".join(lines) + "\n")


def load_goldens(path: Path = GOLDEN_PATH) -> dict:
    out = {}
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        kv = dict(item.split("=", 1) for item in line.split())
        rec = {k: (kv[k] if k == "oracle_config_hash" else float(kv[k])) for k in GOLDEN_FIELDS}
        out[_key(kv["n"], kv["alpha"], kv["beta"])] = rec
    return out


def golden(n, alpha, beta, path: Path = GOLDEN_PATH) -> dict:
    return load_goldens(path)[_key(n, alpha, beta)]


# ---------------------------------------------------------------------------
# trial family and simplex search

def log_bump(center: float, width: float):
    """C-infinity bump in log r: exp(1 - 1/(1 - x^2)), x = log(r/center)/width; peak 1."""
    def psi(r):
        r = np.asarray(r, float)
        with np.errstate(divide="ignore", invalid="ignore"):
            x = np.log(np.where(r > 0, r, np.nan) / center) / width
            out = np.where(np.abs(x) < 1, np.exp(1 - 1 / np.clip(1 - x * x, 1e-300, None)), 0.0)
        return np.nan_to_num(out)
    return psi


@dataclass(frozen=True)
class TrialFamilySpec:
    """Bubble (scale d) times 1 + sum eps_i psi_i with log-spaced bumps psi_i."""
    m: int = 3
    d: float = 1.0
    start: tuple = (0.2, -0.2, 0.1)
    centers: tuple | None = None
    width: float = 0.7
    restarts: int = 3
    seed: int = 0
    maxiter: int = 400
    xatol: float = 1e-5
    fatol: float = 1e-12

    def bump_centers(self):
        if self.centers is not None:
            return tuple(self.centers)
        return tuple(np.logspace(-0.5, 0.5, self.m) / self.d) if self.m else ()


def trial_function(n, alpha, spec: TrialFamilySpec, eps) -> RadialBoundaryFunction:
    """The perturbed bubble; raises PositivityViolated outside the positive cone."""
    eps = np.asarray(eps, float)
    bub = Bubble(n, float(alpha), 1.0, spec.d).radial()
    bumps = [log_bump(c, spec.width) for c in spec.bump_centers()]
    centers = spec.bump_centers()
    if eps.size:
        lo = min(centers) * math.exp(-spec.width)
        hi = max(centers) * math.exp(spec.width)
        rr = np.geomspace(lo, hi, 2001)
        factor = 1 + sum(e * b(rr) for e, b in zip(eps, bumps))
        if np.min(factor) <= 0:
            raise PositivityViolated(f"perturbation {eps.tolist()} leaves the positive cone")
    f = bub.times(lambda r: 1 + sum(e * b(r) for e, b in zip(eps, bumps)),
                  name=f"perturbed{tuple(float(e) for e in np.round(eps, 6))}")
    breaks = sorted(b for c in centers for b in bump_breaks(c, spec.width)) if eps.size else []
    return replace(f, breakpoints=tuple(breaks))


def bump_breaks(center: float, width: float, pieces: int = 8):
    """Panel breaks resolving a log bump (its support edges included)."""
    return tuple(center * np.exp(width * np.linspace(-1, 1, pieces + 1)))


def infimum_search(n: int, alpha, beta, spec: TrialFamilySpec = TrialFamilySpec(),
                   cfg: QuadratureConfig | None = None) -> tuple:
    """Nelder-Mead minimisation of the functional ratio over the bump amplitudes.

    T is linear, so the fields of the bubble and of each bubble*psi_i are
    computed once and the field of every trial is their combination.  The
    scale d is held fixed: the ratio is exactly invariant under joint
    rescaling of the bubble and its bumps, so it carries no information.
    Trials outside the positive cone receive a penalty.
    Returns (best_ratio, {"d": d, "eps": eps, "restarts": [...]}).
    """
    es = conformal_indices(n, alpha, beta)
    p = float(es.p)
    bub = Bubble(n, float(alpha), 1.0, spec.d).radial()
    # all fields share one grid so that they can be combined linearly
    cfg = (cfg or QuadratureConfig()).with_(grid_scale=bub.scale)
    base = field_for(bub, es, cfg)
    centers = spec.bump_centers()
    parts = []
    for c in centers:
        psi = log_bump(c, spec.width)
        g = RadialBoundaryFunction(lambda r, psi=psi: bub(r) * psi(r), bub.decay_exponent,
                                   scale=c, support=c * math.exp(spec.width),
                                   breakpoints=bump_breaks(c, spec.width))
        parts.append(field_for(g, es, cfg))
    if spec.m == 0:
        r = tf_norm(base, es) / lp_boundary_norm(bub, p, n, cfg)
        return r, {"d": spec.d, "eps": [], "restarts": [r]}

    penalty_floor = 10.0 * tf_norm(base, es) / lp_boundary_norm(bub, p, n, cfg)

    def objective(eps):
        try:
            f = trial_function(n, alpha, spec, eps)
        except PositivityViolated:
            return penalty_floor * (1 + float(np.sum(np.square(eps))))
        fld = base.combine(parts, eps)
        if np.any(fld.values <= 0):
            return penalty_floor * (1 + float(np.sum(np.square(eps))))
        return tf_norm(fld, es) / lp_boundary_norm(f, p, n, cfg)

    rng = np.random.default_rng(spec.seed)
    start = np.asarray(spec.start[:spec.m], float)
    best = None
    history = []
    for i in range(spec.restarts):
        x0 = start if i == 0 else start + rng.uniform(-0.1, 0.1, spec.m)
        res = optimize.minimize(objective, x0, method="Nelder-Mead",
                                options={"xatol": spec.xatol, "fatol": spec.fatol,
                                         "maxiter": spec.maxiter})
        history.append(float(res.fun))
        if best is None or res.fun < best.fun:
            best = res
    return float(best.fun), {"d": spec.d, "eps": best.x.tolist(), "restarts": history}


def trial_corpus(n: int = 2, alpha=3) -> list:
    """Radial trial functions for the reversed inequality: perturbed bubbles,
    compactly supported bumps, heavy tails and assorted non-extremal shapes."""
    alpha = float(alpha)
    F = RadialBoundaryFunction
    tail_min = alpha - 1
    corpus = []
    for d in (0.5, 2.0):
        corpus.append(replace(Bubble(n, alpha, 1.0, d).radial(), name=f"bubble[d={d:g}]"))
    spec = TrialFamilySpec()
    for eps in [(0.2, -0.2, 0.1), (-0.5, 0.0, 0.0), (0.0, 0.8, 0.0), (0.3, 0.3, 0.3),
                (0.0, 0.0, -0.6), (2.0, -0.5, 1.0)]:
        corpus.append(trial_function(n, alpha, spec, eps))
    corpus += [
        F(lambda r: (r <= 1).astype(float), math.inf, support=1.0, name="indicator"),
        F(lambda r: np.clip(1 - r * r, 0, None) ** 2, math.inf, support=1.0, breakpoints=(1.0,),
          name="compact-poly"),
        F(lambda r: np.nan_to_num(np.exp(1 - 1 / np.clip(1 - r * r, 1e-300, None))) * (r < 1),
          math.inf, support=1.0, name="compact-smooth"),
        F(lambda r: ((r >= 0.5) & (r <= 1.5)).astype(float), math.inf, support=1.5,
          breakpoints=(0.5, 1.5), name="annulus"),
        F(lambda r: np.exp(-r * r), math.inf, scale=1.0, name="gaussian"),
        F(lambda r: np.exp(-r), math.inf, scale=1.0, name="exponential"),
        F(lambda r: (1 + r * r) ** (-(tail_min + 0.2) / 2), tail_min + 0.2, name="heavy-tail-0.2"),
        F(lambda r: (1 + r * r) ** (-(tail_min + 0.5) / 2), tail_min + 0.5, name="heavy-tail-0.5"),
        F(lambda r: (1 + r) ** -(tail_min + 0.3), tail_min + 0.3, breakpoints=(), name="cusp-tail"),
        F(lambda r: (1 + r * r) ** (-(n + alpha) / 2), n + alpha, name="fast-algebraic"),
        F(lambda r: np.exp(-(r - 2) ** 2) + 0.1 * np.exp(-r * r), math.inf, scale=1.0,
          name="ring"),
        F(lambda r: (1 + r * r) ** (-(n + alpha - 2) / 2) + 3 * np.exp(-4 * r * r),
          n + alpha - 2, name="bubble-plus-spike"),
        F(lambda r: 0.5 * (1 + (r / 5) ** 2) ** (-(n + alpha - 2) / 2)
          + (1 + (3 * r) ** 2) ** (-(n + alpha - 2) / 2), n + alpha - 2, name="two-scale"),
    ]
    return corpus
