import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from toricquot.actions import TorusAction, horizontal_space
from toricquot.curvature import (bracket_witness, finite_difference_oracle, fitted_exponent,
                                 random_horizontal_plane, ray_scan, sec_quotient, vertical_projection_field)
from toricquot.errors import IsSplit, SingularGram
from toricquot.split import is_split

from conftest import random_action, torus_actions

TEARDROP_X = np.array([1.0, 0.5, 1.0, 0.25])


def test_projector_examples():
    a = TorusAction.from_weights([[1]])
    P = vertical_projection_field(a, [1.0, 0.0]).P
    assert np.allclose(P, [[0, 0], [0, 1]])
    t = TorusAction.from_weights([[1, 2]])
    u = np.array([0, 1, 0, 2]) / np.sqrt(5)
    assert np.allclose(vertical_projection_field(t, [1, 0, 1, 0]).P, np.outer(u, u))
    with pytest.raises(SingularGram):
        vertical_projection_field(t, np.zeros(4))


def test_projector_derivative_matches_finite_difference(teardrop, rng):
    x = TEARDROP_X
    pf = vertical_projection_field(teardrop, x)
    for _ in range(3):
        u = rng.standard_normal(4)
        h = 1e-6
        fd = (vertical_projection_field(teardrop, x + h * u).P - vertical_projection_field(teardrop, x - h * u).P) / (2 * h)
        assert np.allclose(pf.derivative(u), fd, atol=1e-7)


def test_split_action_is_flat(rng):
    a = TorusAction.from_weights([[1, 1], [0, 2]], f=1)
    for _ in range(10):
        x = rng.standard_normal(a.m)
        v, w = random_horizontal_plane(a, x, rng)
        assert abs(sec_quotient(a, x, v, w)) < 1e-9


def test_teardrop_positive_curvature(teardrop, rng):
    x = np.array([1.0, 0.0, 1.0, 0.0])
    v, w = random_horizontal_plane(teardrop, x, rng)
    assert sec_quotient(teardrop, x, v, w) > 0


def test_sec_rejects_vertical_input(teardrop):
    x = TEARDROP_X
    vert = vertical_projection_field(teardrop, x).K[:, 0]
    H = horizontal_space(teardrop, x)
    with pytest.raises(ValueError):
        sec_quotient(teardrop, x, vert, H[:, 0])


def test_cone_scaling(teardrop, rng):
    x = TEARDROP_X
    v, w = random_horizontal_plane(teardrop, x, rng)
    s = sec_quotient(teardrop, x, v, w)
    for lam in (2, 4, 10):
        assert sec_quotient(teardrop, lam * x, v, w) * lam**2 == pytest.approx(s, rel=1e-8)


def test_bracket_witness_teardrop(teardrop):
    wit = bracket_witness(teardrop)
    assert wit.value > 0
    assert wit.sec > 0
    assert 0 < wit.lambdas[0] < 1
    assert wit.inner_closed_form == pytest.approx(wit.inner_direct, rel=1e-10)
    H = horizontal_space(teardrop, wit.point)
    for vec in (wit.v, wit.w):
        assert np.linalg.norm(vec - H @ (H.T @ vec)) < 1e-10


def test_bracket_witness_sharp_fixture():
    a = TorusAction.from_weights([[1, 0, 1], [0, 1, 1]])
    wit = bracket_witness(a)
    assert wit.value > 0
    assert wit.plane in is_split(a).failing_planes


def test_bracket_witness_split_raises():
    with pytest.raises(IsSplit):
        bracket_witness(TorusAction.from_weights([[1, 0], [0, 1]]))


def test_ray_scan_ratios(teardrop):
    wit = bracket_witness(teardrop)
    samples = ray_scan(teardrop, wit.point, [1, 0.5, 0.25], planes_per_point=2, seed=3)
    by_plane = {}
    for s in samples:
        by_plane.setdefault(s.plane_index, []).append(s.sec)
    for secs in by_plane.values():
        assert secs[1] / secs[0] == pytest.approx(4, rel=1e-4)
        assert secs[2] / secs[0] == pytest.approx(16, rel=1e-4)
    assert fitted_exponent(samples) == pytest.approx(-2, abs=1e-6)


def test_ray_scan_split_flat():
    a = TorusAction.from_weights([[1, 0], [0, 1]])
    samples = ray_scan(a, [1, 0.3, -0.2, 0.7], [1, 0.1], seed=1)
    assert max(abs(s.sec) for s in samples) < 1e-6
    assert fitted_exponent(samples) is None


def test_ray_scan_off_principal_raises():
    a = TorusAction.from_weights([[1, 0], [0, 1]])
    with pytest.raises(SingularGram):
        ray_scan(a, [1, 0, 0, 0], [1], seed=0)


def test_oracle_examples(teardrop, rng):
    half_plane = TorusAction.from_weights([[1]], f=1)
    o = finite_difference_oracle(half_plane, [1.0, 0.3, 0.5])
    assert np.max(np.abs(o.riemann)) < 1e-5
    x = TEARDROP_X
    o = finite_difference_oracle(teardrop, x)
    for _ in range(3):
        v, w = random_horizontal_plane(teardrop, x, rng)
        assert o.sectional(v, w) == pytest.approx(sec_quotient(teardrop, x, v, w), rel=1e-3)


def test_oracle_split_flat(rng):
    a = TorusAction.from_weights([[1, 0], [0, 1]])
    o = finite_difference_oracle(a, [1.0, 0.2, 0.4, 0.9])
    assert np.max(np.abs(o.riemann)) < 1e-5


@given(torus_actions(kmax=2, nmax=3, fmax=0), st.integers(0, 2**32 - 1))
def test_curvature_sign_and_dichotomy(a, seed):
    assume(a.m - a.k >= 2)
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(a.m)
    v, w = random_horizontal_plane(a, x, rng)
    s = sec_quotient(a, x, v, w)
    assert s >= -1e-10  # O'Neill: quotients of flat space are nonnegatively curved
    if is_split(a).is_split:
        assert abs(s) < 1e-8


def test_random_witnesses_positive():
    rng = np.random.default_rng(5)
    seen = 0
    while seen < 5:
        a = random_action(rng, kmax=2, nmax=3)
        if is_split(a).is_split:
            continue
        assert bracket_witness(a).value > 0
        seen += 1
