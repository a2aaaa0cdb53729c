import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rhls import errors
from rhls.extremals import Bubble
from rhls.indices import conformal_indices
from rhls.operator import (PotentialField, RadialBoundaryFunction, apply_T, apply_T_reference,
                           field_for, functional_ratio, lp_boundary_norm, lq_halfspace_norm,
                           potential, tf_norm)
from rhls.quadrature import QuadratureConfig
from rhls.sharpconst import golden

ES = conformal_indices(2, 3, 0)
INDICATOR = RadialBoundaryFunction(lambda r: (r <= 1).astype(float), math.inf, support=1.0,
                                   name="indicator")
BUBBLE = Bubble(2, 3.0).radial()


def test_indicator_examples():
    assert apply_T(INDICATOR, 0.0, 1.0, ES) == pytest.approx(math.sqrt(2) + math.asinh(1), rel=1e-10)
    assert apply_T(INDICATOR, 0.0, 1e-9, ES) == pytest.approx(1.0, rel=1e-8)


def test_reference_path_agrees():
    for r, t in [(0.0, 1.0), (0.7, 0.05), (3.0, 2.0)]:
        assert apply_T(BUBBLE, r, t, ES) == pytest.approx(apply_T_reference(BUBBLE, r, t, ES), rel=1e-9)
        assert apply_T(INDICATOR, r, t, ES) == pytest.approx(
            apply_T_reference(INDICATOR, r, t, ES), rel=1e-9)


def test_large_height_asymptotic():
    t = 1e3
    assert apply_T(INDICATOR, 0.0, t, ES) / t == pytest.approx(2.0, rel=1e-3)


def test_apply_T_rejects_slow_decay():
    slow = RadialBoundaryFunction(lambda r: (1 + r) ** -1.5, 1.5)
    with pytest.raises(errors.NonIntegrableTail):
        apply_T(slow, 0.0, 1.0, ES)


def test_lp_examples():
    assert lp_boundary_norm(INDICATOR, 2 / 3, 2) == pytest.approx(2 * math.sqrt(2), rel=1e-10)
    assert lp_boundary_norm(BUBBLE, 2 / 3, 2) == pytest.approx(math.pi ** 1.5, rel=1e-9)


def test_lp_rejects_negative_data():
    f = RadialBoundaryFunction(lambda r: np.cos(r), math.inf, support=3.0)
    with pytest.raises(errors.NonPositiveSample):
        lp_boundary_norm(f, 2 / 3, 2)


def test_lq_rectangle():
    val = lq_halfspace_norm(lambda r, t: 2.0 * np.ones_like(r), -1.0, 2, domain=(1.5, 1.0))
    assert val == pytest.approx(2 / 3, rel=1e-12)


def test_lq_requires_positive_samples():
    with pytest.raises(errors.NonPositiveSample):
        lq_halfspace_norm(lambda r, t: r - 1.0, -1.0, 2, domain=(2.0, 1.0))
    with pytest.raises(errors.NonIntegrableTail):
        lq_halfspace_norm(lambda r, t: np.ones_like(r), -1.0, 2)


def test_lq_full_halfspace_matches_field():
    fld = field_for(BUBBLE, ES)
    direct = lq_halfspace_norm(lambda r, t: apply_T(BUBBLE, r, t, ES), -4.0, 2, scale=1.0,
                               kappa=-ES.q * (3 - 2) - 1)
    assert direct == pytest.approx(tf_norm(fld, ES), rel=1e-6)


def test_bubble_ratio_is_sharp_constant():
    assert functional_ratio(BUBBLE, ES) == pytest.approx(golden(2, 3, 0)["ball_value"], rel=1e-9)


@settings(max_examples=10)
@given(st.floats(0.05, 20), st.floats(0.01, 20))
def test_positivity_and_monotonicity(r, t):
    small = RadialBoundaryFunction(lambda s: 0.5 * (1 + s * s) ** -1.5, 3.0)
    big = RadialBoundaryFunction(lambda s: (1 + s * s) ** -1.5 + np.exp(-s), 3.0)
    lo, hi = apply_T(small, r, t, ES), apply_T(big, r, t, ES)
    assert 0 < lo <= hi


def test_field_interpolation_matches_direct():
    fld = field_for(BUBBLE, ES)
    r = np.array([0.0, 0.3, 2.0, 40.0])
    t = np.array([0.01, 1.0, 0.5, 7.0])
    np.testing.assert_allclose(fld(r, t), fld.direct(r, t), rtol=1e-7)


def test_field_linearity():
    cfg = QuadratureConfig(grid_scale=1.0)
    g = RadialBoundaryFunction(lambda s: np.exp(-s * s), math.inf)
    a, b = field_for(BUBBLE, ES, cfg), field_for(g, ES, cfg)
    both = field_for(RadialBoundaryFunction(lambda s: BUBBLE(s) + 0.3 * g(s), 3.0), ES, cfg)
    # the two sides use different s-panels, so agreement is to quadrature accuracy
    np.testing.assert_allclose(a.combine([b], [0.3]).values, both.values, rtol=1e-7)


def test_field_combine_requires_same_grid():
    a = field_for(BUBBLE, ES)
    b = field_for(BUBBLE.scaled(4.0, 2 / 3, 2), ES)
    with pytest.raises(ValueError):
        a.combine([b], [1.0])


@pytest.mark.parametrize("lam", [0.25, 4.0])
def test_ratio_scaling_invariance(lam):
    f = RadialBoundaryFunction(lambda s: np.exp(-s * s), math.inf, name="gaussian")
    base = functional_ratio(f, ES)
    assert functional_ratio(f.scaled(lam, 2 / 3, 2), ES) == pytest.approx(base, rel=1e-6)


def test_potential_field_scaled():
    fld = field_for(BUBBLE, ES)
    np.testing.assert_allclose(fld.scaled(3.0).values, 3.0 * fld.values)
    assert isinstance(fld, PotentialField)


def test_potential_n3():
    es = conformal_indices(3, 4, 0)
    f = Bubble(3, 4.0).radial()
    assert potential(f, 3, 4.0, 0.4, 0.8) == pytest.approx(apply_T_reference(f, 0.4, 0.8, es), rel=1e-9)
