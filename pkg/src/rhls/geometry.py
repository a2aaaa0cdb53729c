"""Half-space geometry: the extended kernel, sphere inversions, Kelvin
transforms and the moving-sphere comparison kernel.

Points are numpy arrays with the coordinate axis last.  A half-space point
in R^n_+ has n coordinates (x', x_n); a boundary point has n-1.  The small
dataclasses below are optional typed wrappers; every function also accepts
plain arrays, and broadcasts over leading axes.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CenterSingularity, InvalidIndex

CENTER_EPS = 1e-14


@dataclass(frozen=True)
class BoundaryPoint:
    coords: tuple

    def __post_init__(self):
        if not np.all(np.isfinite(self.coords)):
            raise ValueError("boundary coordinates must be finite")

    def as_array(self):
        return np.asarray(self.coords, dtype=float)


@dataclass(frozen=True)
class HalfSpacePoint:
    tangential: tuple
    height: float

    def __post_init__(self):
        if not self.height >= 0:
            raise ValueError("height must be >= 0")

    def as_array(self):
        return np.append(np.asarray(self.tangential, dtype=float), float(self.height))


@dataclass(frozen=True)
class InversionSpec:
    center: BoundaryPoint | tuple
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("inversion radius must be positive")

    @property
    def z(self):
        return _arr(self.center)


def _arr(p):
    if isinstance(p, (BoundaryPoint, HalfSpacePoint)):
        return p.as_array()
    return np.asarray(p, dtype=float)


def embed(y):
    """Boundary point(s) y in R^{n-1} as points of R^n with zero height."""
    y = _arr(y)
    return np.concatenate([y, np.zeros(y.shape[:-1] + (1,))], axis=-1)


def norm(v):
    """Euclidean norm over the last axis, scaled to avoid overflow/underflow."""
    v = np.asarray(v, dtype=float)
    m = np.max(np.abs(v), axis=-1)
    safe = np.where(m > 0, m, 1.0)
    return m * np.sqrt(np.sum((v / safe[..., None]) ** 2, axis=-1))


def _match(x, z):
    """Bring z to the dimension of x (embedding boundary points)."""
    if z.shape[-1] == x.shape[-1] - 1:
        return embed(z)
    return z


def kernel(alpha, beta, x, y):
    """Extended kernel x_n^beta |x - y|^(alpha - n); zero at coincidence."""
    x = _arr(x)
    y = _match(x, _arr(y))
    n = x.shape[-1]
    if not alpha > n:
        raise InvalidIndex(f"alpha={alpha} must exceed n={n}")
    return x[..., -1] ** beta * norm(x - y) ** (alpha - n)


def _invert(x, z, lam):
    d = x - z
    r = norm(d)
    if np.any(r < CENTER_EPS):
        raise CenterSingularity("point coincides with the inversion center")
    return (lam / r)[..., None] ** 2 * d + z


def invert(x, spec: InversionSpec):
    """x^{z,lam} = lam^2 (x - z)/|x - z|^2 + z, for half-space or boundary points."""
    x = _arr(x)
    z = spec.z
    if z.shape[-1] == x.shape[-1] - 1:
        z = embed(z)
    return _invert(x, z, spec.radius)


def kelvin_boundary(u, spec: InversionSpec, alpha):
    """y -> (lam/|y - z|)^(n - alpha) u(y^{z,lam}) for a boundary function u."""

    def uk(y):
        y = _arr(y)
        n = y.shape[-1] + 1
        r = norm(y - spec.z)
        return (spec.radius / r) ** (n - alpha) * u(invert(y, spec))

    return uk


def ms_kernel(spec: InversionSpec, y, x, alpha):
    """Moving-sphere kernel (lam/|x-z|)^(n-alpha) |x^{z,lam} - y|^(alpha-n) - |x - y|^(alpha-n).

    With A = (|x-z| |x^{z,lam} - y| / lam)^2 and B = |x-y|^2 the kernel is
    A^a - B^a, a = (alpha-n)/2, and A - B factors as
    (lam^2 - |x-z|^2)(lam^2 - |y-z|^2)/lam^2.  The difference is formed from
    that product, so the sign is exact even next to the sphere.
    """
    x = _arr(x)
    y = _arr(y)
    n = x.shape[-1]
    if not alpha > n:
        raise InvalidIndex(f"alpha={alpha} must exceed n={n}")
    z = embed(spec.z)
    ye = embed(y)
    lam = spec.radius
    ryz = norm(ye - z)
    if np.any(ryz < CENTER_EPS):
        raise CenterSingularity("y coincides with the inversion center")
    rxz = norm(x - z)
    a = 0.5 * (alpha - n)
    diff = (lam - rxz) * (lam + rxz) * (lam - ryz) * (lam + ryz) / lam ** 2
    B = norm(x - ye) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        small = B ** a * np.expm1(a * np.log1p(diff / B))
    return np.where(B > 0, small, np.maximum(diff, 0.0) ** a)


def sign_law_factor(spec: InversionSpec, y, x):
    """(lam^2 - |x-z|^2)(lam^2 - |y-z|^2), whose sign ms_kernel must share."""
    x = _arr(x)
    z = embed(spec.z)
    lam = spec.radius
    rxz = norm(x - z)
    ryz = norm(embed(_arr(y)) - z)
    return (lam - rxz) * (lam + rxz) * (lam - ryz) * (lam + ryz)


def ball_centers(n: int, lam: float):
    """x0 = (0, -lam) and x1 = (0, -lam/2) in R^n."""
    x0 = np.zeros(n)
    x0[-1] = -lam
    return x0, x0 / 2


def ball_map(xi, lam: float):
    """Inversion about x0 = (0, -lam) with radius lam; maps the closed
    half-space onto the closed ball of radius lam/2 about x1 = (0, -lam/2)."""
    xi = _arr(xi)
    x0, _ = ball_centers(xi.shape[-1], lam)
    return _invert(xi, x0, lam)


def ball_map_residual(xi, lam: float):
    """Residual of the height identity lam^-1 |eta - x0|^2 xi_n = lam^2/4 - |eta - x1|^2
    for eta = ball_map(xi), relative to lam^2."""
    xi = _arr(xi)
    x0, x1 = ball_centers(xi.shape[-1], lam)
    eta = ball_map(xi, lam)
    lhs = norm(eta - x0) ** 2 * xi[..., -1] / lam
    rhs = lam ** 2 / 4 - norm(eta - x1) ** 2
    return (lhs - rhs) / lam ** 2
