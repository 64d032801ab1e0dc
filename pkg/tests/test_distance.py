import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from toricquot.actions import ExtendedAction, FiniteOrthGroup, TorusAction, close_group, rotation
from toricquot.distance import quotient_distance_extended, quotient_distance_torus, reduction_isometry_check
from toricquot.errors import GridTooCoarse, NotSplit
from toricquot.groups import rot2
from toricquot.strata import quotient_distance_finite


def test_finite_distance_examples():
    Z2 = close_group([rot2(np.pi)])
    assert quotient_distance_finite(Z2, [1, 0], [-1, 0]) == pytest.approx(0, abs=1e-15)
    assert quotient_distance_finite(Z2, [1, 0], [0, 1]) == pytest.approx(np.sqrt(2))
    assert quotient_distance_finite(FiniteOrthGroup.trivial(2), [1, 2], [4, 6]) == pytest.approx(5)


def test_circle_distance_is_radius_difference(rng):
    a = TorusAction.from_weights([[1]])
    for _ in range(10):
        x, y = rng.standard_normal((2, 2))
        d = quotient_distance_torus(a, x, y)
        assert d.value == pytest.approx(abs(np.linalg.norm(x) - np.linalg.norm(y)), abs=1e-6)
        assert d.gap <= 1e-6


def test_teardrop_against_dense_grid(teardrop):
    x = np.array([1.0, 0.5, 1.0, 0.25])
    y = np.array([-0.3, 1.2, 0.7, -0.9])
    d = quotient_distance_torus(teardrop, x, y)
    ts = np.linspace(0, 2 * np.pi, 10_000, endpoint=False)
    ref = min(np.linalg.norm(x - rotation(teardrop, [t]) @ y) for t in ts)
    assert d.value == pytest.approx(ref, abs=1e-5)
    assert d.value <= ref + 1e-12
    assert d.lower <= d.value


@settings(max_examples=25)
@given(st.integers(0, 2**32 - 1))
def test_distance_is_orbit_invariant(seed):
    rng = np.random.default_rng(seed)
    a = TorusAction.from_weights([[1, 2, 0], [0, 1, 3]], f=1)
    x, y = rng.standard_normal((2, a.m))
    g = rotation(a, rng.uniform(0, 2 * np.pi, 2))
    d1 = quotient_distance_torus(a, x, y).value
    d2 = quotient_distance_torus(a, x, g @ y).value
    assert d1 == pytest.approx(d2, abs=2e-6)
    assert d1 <= np.linalg.norm(x - y) + 1e-12


def test_grid_too_coarse():
    a = TorusAction.from_weights([[1, 2]])
    x = np.array([1.0, 0.5, 1.0, 0.25])
    with pytest.raises(GridTooCoarse):
        quotient_distance_torus(a, x, -x[::-1], grid=2, refinements=0, tol=1e-12)


def test_extended_distance_uses_finite_part():
    t = TorusAction.from_weights([[1]], f=1)
    flip = np.diag([1.0, 1.0, -1.0])
    ext = ExtendedAction.build(t, [flip])
    x, y = np.array([1.0, 0, 1.0]), np.array([1.0, 0, -1.0])
    assert quotient_distance_extended(ext, x, y).value == pytest.approx(0, abs=1e-6)
    assert quotient_distance_torus(t, x, y).value == pytest.approx(2, abs=1e-6)


def test_reduction_check_examples():
    c = reduction_isometry_check(TorusAction.from_weights([[1]], f=1), pairs=20, seed=1)
    assert c.max_deviation < 1e-6
    c = reduction_isometry_check(TorusAction.from_weights([[1, 0], [0, 1]]), pairs=20, seed=1)
    assert c.max_deviation < 1e-6 and c.max_gap < 1e-6
    with pytest.raises(NotSplit):
        reduction_isometry_check(TorusAction.from_weights([[1, 2]]), pairs=1)


def test_same_point_distance_zero(teardrop):
    x = np.array([0.2, -1.0, 0.4, 0.3])
    assert quotient_distance_torus(teardrop, x, x).value == pytest.approx(0, abs=1e-6)
