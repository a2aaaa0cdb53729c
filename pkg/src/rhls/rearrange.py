"""Sampled symmetric rearrangements and an operator-level symmetrization
check in the plane (n = 2), where boundary data live on a line."""
from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np
from scipy import special

from .errors import NonPositiveSample, NonPositiveValue, NonUniformGrid
from .indices import ExponentSet
from .quadrature import QuadratureConfig, angle_axis, radial_axis

UNIFORM_RTOL = 1e-9


@dataclass(frozen=True)
class SampledProfile:
    nodes: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.nodes, float)
        values = np.asarray(self.values, float)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "values", values)
        if nodes.ndim != 1 or nodes.shape != values.shape or nodes.size == 0:
            raise ValueError("nodes and values must be 1-D arrays of equal, nonzero length")
        if not (np.all(np.isfinite(nodes)) and np.all(np.isfinite(values))):
            raise ValueError("profile must be finite")
        if np.any(np.diff(nodes) <= 0):
            raise ValueError("nodes must be strictly increasing")
        if np.any(values < 0):
            raise ValueError("values must be nonnegative")

    @property
    def spacing(self) -> float:
        if self.nodes.size < 2:
            return 1.0
        h = np.diff(self.nodes)
        if np.max(np.abs(h - h[0])) > UNIFORM_RTOL * abs(h[0]):
            raise NonUniformGrid("cells must have equal width")
        return float(h[0])

    def translated(self, shift: float) -> "SampledProfile":
        return SampledProfile(self.nodes + shift, self.values)


def center_out_positions(size: int) -> np.ndarray:
    """Grid indices in placement order: the center (N-1)//2, then right, left, right, ..."""
    c = (size - 1) // 2
    pos = [c]
    for j in range(1, size):
        for cand in (c + j, c - j):
            if 0 <= cand < size and len(pos) < size:
                pos.append(cand)
    return np.array(pos[:size])


def decreasing_rearrangement(p: SampledProfile) -> SampledProfile:
    """Symmetric-decreasing rearrangement on the same uniform grid.

    Values are taken in decreasing order (ties by original index) and placed
    at the center, then alternately right and left of it.
    """
    p.spacing  # validates uniformity
    order = np.argsort(-p.values, kind="stable")
    out = np.empty_like(p.values)
    out[center_out_positions(p.values.size)] = p.values[order]
    return SampledProfile(p.nodes, out)


def increasing_rearrangement(p: SampledProfile) -> SampledProfile:
    """v_* = ((1/v)^*)^-1: the center-valley rearrangement."""
    if np.any(p.values <= 0):
        raise NonPositiveValue("increasing rearrangement needs strictly positive values")
    inv = decreasing_rearrangement(SampledProfile(p.nodes, 1.0 / p.values))
    return SampledProfile(p.nodes, 1.0 / inv.values)


# ---------------------------------------------------------------------------
# operator level, n = 2

def segment_potential(Z, t, a: float):
    """F(Z) = integral_0^Z (z^2 + t^2)^a dz (odd in Z)."""
    Z = np.asarray(Z, float)
    t = np.asarray(t, float)
    if a == 0.5:
        rho = np.hypot(Z, t)
        with np.errstate(divide="ignore", invalid="ignore"):
            tail = np.where(t > 0, t * t * np.arcsinh(Z / np.where(t > 0, t, 1.0)), 0.0)
        return 0.5 * (Z * rho + tail)
    if a == 1.0:
        return Z * t * t + Z ** 3 / 3
    with np.errstate(divide="ignore", invalid="ignore"):
        return Z * t ** (2 * a) * special.hyp2f1(-a, 0.5, 1.5, -(Z / t) ** 2)


def piecewise_potential(p: SampledProfile, alpha: float, x, t):
    """V(x, t) = integral of ((x - y)^2 + t^2)^((alpha-2)/2) f(y) dy for piecewise-constant f."""
    h = p.spacing
    a = 0.5 * (alpha - 2)
    x = np.asarray(x, float)[..., None]
    t = np.asarray(t, float)[..., None]
    lo = p.nodes - h / 2
    hi = p.nodes + h / 2
    cells = segment_potential(x - lo, t, a) - segment_potential(x - hi, t, a)
    return (cells * p.values).sum(axis=-1)


def halfplane_norm(p: SampledProfile, es: ExponentSet, cfg: QuadratureConfig | None = None) -> float:
    """||Tf||_q over the whole upper half-plane for piecewise-constant f on a line."""
    if es.n != 2:
        raise ValueError("the sampled symmetrization check is for n = 2")
    cfg = cfg or QuadratureConfig()
    alpha, beta, q = float(es.alpha), float(es.beta), float(es.q)
    h = p.spacing
    centre = 0.5 * (p.nodes[0] + p.nodes[-1])
    scale = 0.5 * (p.nodes[-1] - p.nodes[0]) + h
    kappa = float(-es.q * (es.alpha + es.beta - 2) - 1)
    rax = radial_axis(scale, kappa, cfg)
    pax = angle_axis(cfg, head_exponent=beta * q)
    # phi in (0, pi): the quarter-plane rule and its mirror image
    phi = np.concatenate([pax.nodes, math.pi - pax.nodes])
    wphi = np.concatenate([pax.weights, pax.weights])
    R, P = np.meshgrid(rax.nodes, phi, indexing="ij")
    x = centre + R * np.cos(P)
    t = R * np.sin(P)
    V = np.concatenate([piecewise_potential(p, alpha, x[i:i + 16], t[i:i + 16])
                        for i in range(0, x.shape[0], 16)])
    if np.any(V <= 0):
        raise NonPositiveSample("Tf must be strictly positive")
    w = np.outer(rax.weights * rax.nodes, wphi)
    return float(np.sum(w * (t ** beta * V) ** q)) ** (1.0 / q)


def sampled_lp_norm(p: SampledProfile, exponent: float) -> float:
    return float(np.sum(p.values ** exponent) * p.spacing) ** (1.0 / exponent)


def symmetrization_ratio_check(f: SampledProfile, es: ExponentSet,
                               cfg: QuadratureConfig | None = None):
    """(ratio for f, ratio for f*) with ratio = ||Tf||_q / ||f||_p at n = 2.

    Rearrangement keeps ||f||_p, and should not increase ||Tf||_q.
    """
    if not np.any(f.values > 0):
        raise ValueError("profile must have a nontrivial positive part")
    fs = decreasing_rearrangement(f)
    p = float(es.p)
    den = sampled_lp_norm(f, p)
    return halfplane_norm(f, es, cfg) / den, halfplane_norm(fs, es, cfg) / den


def fixture_corpus(seed: int = 7) -> list:
    """Profiles for the symmetrization check: bumps, steps and random data."""
    rng = np.random.default_rng(seed)
    x = np.linspace(-2, 2, 21)
    out = {
        "two-bump": np.exp(-8 * (x + 1) ** 2) + 0.5 * np.exp(-8 * (x - 1.2) ** 2) + 1e-3,
        "step": (x > 0).astype(float) + 0.1,
        "ramp": np.clip(x + 2, 0, None),
        "spike-off-center": np.where(np.abs(x - 1.4) < 0.3, 3.0, 0.2),
        "symmetric": np.exp(-x * x),
        "sparse": (np.arange(x.size) % 4 == 0).astype(float),
    }
    for i in range(4):
        out[f"random-{i}"] = rng.uniform(0, 1, x.size)
    return [(name, SampledProfile(x, v)) for name, v in out.items()]
