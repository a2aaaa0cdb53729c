from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from rhls import errors
from rhls.extremals import (Bubble, BubbleKind, FlatExtremal, asymptotics_check, default_radii,
                            el_residual, make_solution_pair, miscalibration_factor,
                            pohozaev_check, pohozaev_exponent_residual)
from rhls.indices import conformal_indices
from rhls.quadrature import QuadratureConfig


@pytest.fixture(scope="module")
def pair_230():
    return make_solution_pair(2, 3, 0)


def test_bubble_validation():
    with pytest.raises(ValueError):
        Bubble(2, 3.0, c=0.0)
    with pytest.raises(ValueError):
        Bubble(2, 3.0, d=-1.0)


def test_bubble_exponents():
    assert Bubble(2, 3.0).gamma == 1.5
    assert Bubble(2, 3.0, kind=BubbleKind.U_SOLUTION).gamma == -0.5
    assert Bubble(3, 4.0)(np.array([0.0, 0.0])) == 1.0


@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(0.1, 10))
def test_bubble_translation(y, z0, d):
    b = Bubble(2, 3.0, 1.3, d, z0=(z0,))
    assert b(np.array([y])) == pytest.approx(Bubble(2, 3.0, 1.3, d)(np.array([y - z0])), rel=1e-14)


def test_bubble_power():
    b = Bubble(2, 3.0, 2.0, 0.5, kind=BubbleKind.U_SOLUTION)
    r = np.linspace(0, 10, 7)
    np.testing.assert_allclose(b.power(-3.0)(r), b.radial_profile(r) ** -3.0, rtol=1e-14)
    assert b.power(-3.0).decay_exponent == pytest.approx(3.0)


@pytest.mark.parametrize("lam", [0.5, 2.0, 5.0])
def test_flat_extremal_transplant_is_one(lam):
    fe = FlatExtremal(2, 3.0, lam)
    # the sphere passes through x0 at th = pi, which maps to infinity
    th = np.concatenate([np.linspace(-3.0, -0.1, 5), np.linspace(0.0, 3.0, 5)])
    eta = np.stack([lam / 2 * np.sin(th), -lam / 2 + lam / 2 * np.cos(th)], axis=-1)
    np.testing.assert_allclose(fe.transplant(eta), 1.0, rtol=1e-12)


def test_flat_extremal_norm():
    from rhls.operator import lp_boundary_norm
    for n, alpha, lam in [(2, 3.0, 2.0), (2, 4.0, 0.7), (3, 4.0, 2.0)]:
        fe = FlatExtremal(n, alpha, lam)
        p = 2 * (n - 1) / (n + alpha - 2)
        assert lp_boundary_norm(fe.radial(), p, n) == pytest.approx(fe.norm_closed_form(), rel=1e-9)


def test_el_residual_bubble_and_control():
    from rhls.checks import el_negative_control
    es = conformal_indices(2, 3, 0)
    radii = default_radii(1.0, 4)
    assert el_residual(Bubble(2, 3.0), es, radii) < 1e-6
    assert el_residual(el_negative_control(2, 3.0), es, radii) > 1e-2


def test_pair_calibration_constant(pair_230):
    m = pair_230.multipliers
    assert np.max(np.abs(m / m[0] - 1)) < 1e-8
    assert pair_230.trace_exponent == pytest.approx(pair_230.u.gamma, abs=1e-6)


def test_pair_covariance_in_d(pair_230):
    p4 = make_solution_pair(2, 3, 0, d=4.0)
    assert p4.calibration == pytest.approx(pair_230.calibration, rel=1e-8)
    assert p4.trace_amplitude == pytest.approx(pair_230.trace_amplitude, rel=1e-8)


def test_asymptotics(pair_230):
    out = asymptotics_check(pair_230)
    assert out["u_gap"] < 1e-2 and out["v_gap"] < 1e-2
    # unit-c bubble: integral (1 + y^2)^-3/2 dy = 2
    assert out["v_integral"] / pair_230.calibration ** -3 == pytest.approx(2.0, rel=1e-6)


def test_pohozaev(pair_230):
    lhs, rhs, gap = pohozaev_check(pair_230)
    assert gap < 1e-6
    es = pair_230.es
    assert pohozaev_exponent_residual(es) == 0
    bad = pair_230.with_amplitude(2 * pair_230.calibration)
    l2, r2, _ = pohozaev_check(bad)
    assert (l2 / r2) / (lhs / rhs) == pytest.approx(miscalibration_factor(es, 2.0), rel=1e-6)


def test_pair_with_beta():
    pair = make_solution_pair(2, 4, Fraction(1, 2))
    assert pohozaev_check(pair)[2] < 1e-6
    out = asymptotics_check(pair)
    assert out["u_gap"] < 1e-2 and out["v_gap"] < 1e-2


def test_calibration_drift_detected():
    cfg = QuadratureConfig(nodes_per_panel=3, kink_levels=2, angle_levels=2, tail_levels=2)
    with pytest.raises(errors.CalibrationDrift):
        make_solution_pair(2, 3, 0, cfg=cfg, drift_tol=1e-12)
