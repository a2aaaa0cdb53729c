import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from rhls import errors
from rhls.checks import inversion_identity_sweep, sign_law_sweep
from rhls.geometry import (BoundaryPoint, HalfSpacePoint, InversionSpec, ball_map, ball_map_residual,
                           invert, kelvin_boundary, kernel, ms_kernel, norm, sign_law_factor)

coord = st.floats(-5, 5)
height = st.floats(0.01, 5)
radius = st.floats(0.1, 10)


def test_kernel_example():
    assert kernel(3, 0, [0.0, 1.0], [0.0]) == pytest.approx(1.0)
    assert kernel(3, 0.5, [3.0, 4.0], [0.0]) == pytest.approx(2 * 5)


def test_kernel_rejects_small_alpha():
    with pytest.raises(errors.InvalidIndex):
        kernel(2, 0, [0.0, 1.0], [0.0])


def test_invert_example():
    spec = InversionSpec((0.0,), 2.0)
    np.testing.assert_allclose(invert([0.0, 1.0], spec), [0.0, 4.0])
    np.testing.assert_allclose(invert([1.0], spec), [4.0])


def test_center_singularity():
    with pytest.raises(errors.CenterSingularity):
        invert([1.0, 0.0], InversionSpec((1.0,), 1.0))


def test_point_validation():
    with pytest.raises(ValueError):
        HalfSpacePoint((0.0,), -1.0)
    with pytest.raises(ValueError):
        BoundaryPoint((math.nan,))
    with pytest.raises(ValueError):
        InversionSpec((0.0,), 0.0)


def test_norm_is_overflow_safe():
    assert norm(np.array([3e200, 4e200])) == pytest.approx(5e200)
    assert norm(np.array([3e-200, 4e-200])) == pytest.approx(5e-200)


@given(coord, height, coord, radius)
def test_inversion_involution_and_height(x1, x2, z, lam):
    spec = InversionSpec((z,), lam)
    x = np.array([x1, x2])
    if norm(x - np.array([z, 0.0])) < 1e-3:
        return
    xs = invert(x, spec)
    np.testing.assert_allclose(invert(xs, spec), x, rtol=1e-10, atol=1e-10)
    r = norm(x - np.array([z, 0.0]))
    assert xs[-1] == pytest.approx((lam / r) ** 2 * x2, rel=1e-12)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_inversion_identities(n, rng):
    worst = inversion_identity_sweep(n, 300, rng)
    assert max(worst.values()) < 1e-12


def test_kelvin_boundary_fixed_point():
    # the u-bubble (1 + |y|^2)^((alpha-n)/2)/2^(...) is fixed by inversion in the unit sphere
    alpha, n = 3.0, 2
    u = lambda y: ((1 + np.sum(np.atleast_1d(y) ** 2, axis=-1)) / 2) ** (0.5 * (alpha - n))
    uk = kelvin_boundary(u, InversionSpec((0.0,), 1.0), alpha)
    for y in (0.3, 2.0, -7.0):
        assert uk(np.array([y])) == pytest.approx(u(np.array([y])), rel=1e-12)


def test_ms_kernel_example():
    spec = InversionSpec((0.0,), 1.0)
    # x* = (0, 2): 0.5 |x* - y| - |x - y|
    expected = 0.5 * math.hypot(0.5, 2.0) - math.hypot(0.5, 0.5)
    assert ms_kernel(spec, [0.5], [0.0, 0.5], 3.0) == pytest.approx(expected, rel=1e-14)


@given(coord, height, coord, coord, radius)
def test_ms_kernel_sign_law(x1, x2, y1, z, lam):
    spec = InversionSpec((z,), lam)
    x, y = np.array([x1, x2]), np.array([y1])
    if abs(y1 - z) < 1e-6:
        return
    k = ms_kernel(spec, y, x, 3.0)
    s = sign_law_factor(spec, y, x)
    if abs(s) > 1e-9 * lam ** 4:
        assert np.sign(k) == np.sign(s)


def test_ms_kernel_vanishes_on_sphere():
    spec = InversionSpec((0.0,), 2.0)
    x = 2.0 * np.array([math.cos(1.0), math.sin(1.0)])
    assert abs(ms_kernel(spec, [0.5], x, 3.0)) < 1e-14


def test_sign_law_sweep(rng):
    out = sign_law_sweep(3, 4.5, 400, rng)
    assert out["mismatches"] == 0
    assert min(out["regimes"].values()) > 0
    assert out["root_error"] < 1e-8


@given(coord, height, st.floats(0.2, 5))
def test_ball_map(x1, x2, lam):
    xi = np.array([x1, x2])
    eta = ball_map(xi, lam)
    assert norm(eta - np.array([0.0, -lam / 2])) <= lam / 2 * (1 + 1e-12)
    assert abs(ball_map_residual(xi, lam)) < 1e-12


def test_kernel_height_weight():
    assert kernel(3, 1, [0.0, 2.0], [0.0]) == pytest.approx(4.0)
    assert kernel(3, 0, [1.0, 0.0], [1.0]) == 0.0


def test_ms_kernel_mixed_sign():
    spec = InversionSpec((0.0,), 1.0)
    assert ms_kernel(spec, [2.0], [0.0, 0.5], 3.0) < 0


def test_kelvin_on_sphere():
    uk = kelvin_boundary(lambda y: np.ones(np.shape(y)[:-1]), InversionSpec((1.0,), 2.0), 3.0)
    assert uk(np.array([3.0])) == pytest.approx(1.0)


def test_ball_map_far_points_approach_x0():
    lam = 2.0
    eta = ball_map(np.array([1e8, 0.0]), lam)
    np.testing.assert_allclose(eta, [0.0, -lam], atol=1e-7)
    assert norm(eta - np.array([0.0, -lam / 2])) == pytest.approx(lam / 2)


def test_kernel_on_boundary_closure():
    # x_n = 0 is allowed: the height weight is 1 for beta = 0 and 0 for beta > 0
    assert kernel(3, 0, [2.0, 0.0], [0.0]) == pytest.approx(2.0)
    assert kernel(3, 0.5, [2.0, 0.0], [0.0]) == 0.0
