from itertools import permutations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from rhls import errors
from rhls.indices import conformal_indices
from rhls.rearrange import (SampledProfile, center_out_positions, decreasing_rearrangement,
                            fixture_corpus, halfplane_norm, increasing_rearrangement,
                            piecewise_potential, segment_potential, symmetrization_ratio_check)

values = st.lists(st.floats(0, 10), min_size=1, max_size=30)


def profile(v):
    return SampledProfile(np.arange(len(v), dtype=float), np.asarray(v, float))


def test_center_out_order():
    assert center_out_positions(5).tolist() == [2, 3, 1, 4, 0]
    assert center_out_positions(4).tolist() == [1, 2, 0, 3]
    assert center_out_positions(1).tolist() == [0]


def test_example():
    out = decreasing_rearrangement(profile([0, 1, 3, 2, 0]))
    assert out.values.tolist() == [0, 1, 3, 2, 0]
    out = decreasing_rearrangement(profile([3, 0, 0, 1, 2]))
    assert out.values.tolist() == [0, 1, 3, 2, 0]


@given(values)
def test_equimeasurable(v):
    out = decreasing_rearrangement(profile(v))
    assert sorted(out.values.tolist()) == sorted(v)


@given(values)
def test_idempotent(v):
    once = decreasing_rearrangement(profile(v))
    assert decreasing_rearrangement(once).values.tolist() == once.values.tolist()


@given(st.lists(st.floats(0.01, 10), min_size=1, max_size=30))
def test_increasing_rearrangement(v):
    out = increasing_rearrangement(profile(v))
    assert sorted(out.values.tolist()) == pytest.approx(sorted(v), rel=1e-15)
    c = (len(v) - 1) // 2
    assert out.values[c] == pytest.approx(min(v), rel=1e-15)


def test_increasing_requires_positive():
    with pytest.raises(errors.NonPositiveValue):
        increasing_rearrangement(profile([1.0, 0.0]))


def test_non_uniform_grid():
    with pytest.raises(errors.NonUniformGrid):
        decreasing_rearrangement(SampledProfile(np.array([0.0, 1.0, 3.0]), np.ones(3)))


def test_profile_validation():
    with pytest.raises(ValueError):
        SampledProfile(np.array([0.0, 1.0]), np.array([1.0, -1.0]))
    with pytest.raises(ValueError):
        SampledProfile(np.array([1.0, 0.0]), np.array([1.0, 1.0]))


@pytest.mark.parametrize("size", range(1, 9))
def test_hardy_littlewood_brute_force(size):
    rng = np.random.default_rng(size)
    f = rng.uniform(0, 1, size)
    g = rng.integers(0, 3, size).astype(float)  # ties included
    fs = decreasing_rearrangement(profile(f)).values
    gs = decreasing_rearrangement(profile(g)).values
    bound = float(np.dot(fs, gs))
    best = max(float(np.dot(f[list(p)], g)) for p in permutations(range(size)))
    assert best <= bound + 1e-12
    assert best == pytest.approx(bound, rel=1e-12)


@given(st.floats(-5, 5), st.floats(0.01, 5), st.sampled_from([0.5, 1.0, 0.75]))
def test_segment_potential_derivative(z, t, a):
    h = 1e-6
    num = (segment_potential(z + h, t, a) - segment_potential(z - h, t, a)) / (2 * h)
    assert num == pytest.approx((z * z + t * t) ** a, rel=1e-6)


def test_piecewise_potential_two_cells():
    # indicator of [-1, 1] seen from (0, 1): integral of sqrt(y^2 + 1)
    v = piecewise_potential(SampledProfile(np.array([-0.5, 0.5]), np.ones(2)), 3.0, 0.0, 1.0)
    assert v == pytest.approx(np.sqrt(2) + np.arcsinh(1), rel=1e-14)


def test_halfplane_norm_translation_invariant():
    es = conformal_indices(2, 3, 0)
    f = fixture_corpus()[0][1]
    assert halfplane_norm(f.translated(3.7), es) == pytest.approx(halfplane_norm(f, es), rel=1e-8)


def test_symmetric_profile_unchanged():
    es = conformal_indices(2, 3, 0)
    name, f = [c for c in fixture_corpus() if c[0] == "symmetric"][0]
    a, b = symmetrization_ratio_check(f, es)
    assert a == pytest.approx(b, rel=1e-12)


def test_symmetrization_fixtures():
    es = conformal_indices(2, 3, 0)
    for name, f in fixture_corpus():
        a, b = symmetrization_ratio_check(f, es)
        assert b <= a + 1e-3, name
