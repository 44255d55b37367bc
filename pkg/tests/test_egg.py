import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gptthermo.egg import (
    egg_beta,
    egg_decompose,
    egg_g,
    egg_grid_points,
    egg_grid_sweep,
    egg_nonuniqueness_witness,
)
from gptthermo.errors import DomainError
from gptthermo.measurements import Measurement, Effect
from gptthermo.models import egg, egg_circle_point, egg_contains_point, egg_ellipse_point


def test_beta_examples():
    assert egg_beta(0.0, 1, 2) == 0.0
    assert egg_beta(math.pi / 2, 1, 2) == -math.pi / 2
    assert egg_beta(-math.pi / 2, 1, 2) == math.pi / 2
    # arccot(x) on the branch (-pi/2, pi/2] equals atan(1/x)
    expected = math.atan(1 / (-(2 / 1) * (1 / math.tan(math.pi / 4))))
    assert egg_beta(math.pi / 4, 1, 2) == pytest.approx(expected, abs=1e-12)
    assert expected == pytest.approx(-0.46365, abs=1e-5)


def test_tangents_are_parallel():
    r, R = 1.0, 2.0
    for a in np.linspace(-1.5, 1.5, 31):
        b = egg_beta(a, r, R)
        t1 = np.array([-math.sin(a), math.cos(a)])  # circle tangent
        t2 = np.array([R * math.sin(b), r * math.cos(b)])  # ellipse tangent at (-R cos b, r sin b)
        assert abs(t1[0] * t2[1] - t1[1] * t2[0]) < 1e-12


def test_g_examples():
    r, R = 1.0, 2.0
    for a in (-1.2, 0.0, 0.4, 1.1):
        assert abs(egg_g(egg_circle_point(a, r), a, r, R)) < 1e-12
    rng = np.random.default_rng(0)
    for w in rng.uniform(-1, 1, size=(10, 2)):
        assert egg_g(w, math.pi / 2, r, R) == pytest.approx(-egg_g(w, -math.pi / 2, r, R), abs=1e-12)
    # direct substitution at alpha=0: beta=0, a0=(-R,0), n0=(0, r+R)
    a0, n0 = np.array([-R, 0.0]), np.array([0.0, r + R])
    assert egg_g(np.zeros(2), 0.0, r, R) == pytest.approx(-(a0 @ n0), abs=1e-15)
    # and at a shifted point, against the same substitution
    w = np.array([0.2, 0.3])
    assert egg_g(w, 0.0, r, R) == pytest.approx((w - a0) @ n0, abs=1e-14)


def test_origin_uses_vertical_chord():
    dec = egg_decompose(np.zeros(2), 1, 2)
    assert np.allclose(dec.weights, [0.5, 0.5])
    pts = sorted(tuple(np.round(s.coords, 12)) for s in dec.frame.states)
    assert pts == [(0.0, -1.0), (0.0, 1.0)]


@pytest.mark.parametrize("point", [egg_circle_point(0.7, 1), egg_ellipse_point(-0.3, 1, 2), egg_ellipse_point(1.0, 1, 2)])
def test_boundary_point_has_trivial_weight(point):
    dec = egg_decompose(point, 1, 2)
    k = int(np.argmax(dec.weights))
    assert dec.weights[k] == pytest.approx(1, abs=1e-9)
    assert np.allclose(dec.frame.states[k].coords, point, atol=1e-8)


def test_frame_effects_distinguish():
    m = egg(1, 2)
    dec = egg_decompose(np.array([0.1, -0.3]), 1, 2)
    e1, e2 = dec.frame.effects
    s1, s2 = dec.frame.states
    assert e1 @ s1.homogeneous() == pytest.approx(1) and e1 @ s2.homogeneous() == pytest.approx(0, abs=1e-12)
    Measurement(m, (Effect(e1), Effect(e2)))  # validates sum = u


def test_random_interior_points():
    rng = np.random.default_rng(5)
    n = 0
    while n < 200:
        x, y = rng.uniform(-2, 1), rng.uniform(-1, 1)
        if not egg_contains_point(x, y, 1, 2):
            continue
        n += 1
        dec = egg_decompose(np.array([x, y]), 1, 2)
        assert dec.meta["residual"] < 1e-8
        assert 0 <= dec.weights[0] <= 1


@settings(max_examples=40, deadline=None)
@given(st.floats(0.3, 3.0), st.floats(0.3, 3.0), st.floats(-0.99, 0.99), st.floats(-0.99, 0.99))
def test_decomposition_property(r, R, u, v):
    x = -R + (u + 1) / 2 * (r + R)
    h = r * math.sqrt(max(0.0, 1 - (x / R) ** 2)) if x < 0 else math.sqrt(max(0.0, r * r - x * x))
    dec = egg_decompose(np.array([x, v * h]), r, R)
    assert dec.meta["residual"] < 1e-8


def test_outside_point():
    with pytest.raises(DomainError):
        egg_decompose(np.array([1.5, 0.0]), 1, 2)


@pytest.mark.parametrize("r,R,second", [(1, 2, (1 / 3, 2 / 3)), (1, 3, (0.25, 0.75)), (1, 1, (0.5, 0.5))])
def test_witness(r, R, second):
    d1, d2, s1, s2 = egg_nonuniqueness_witness(r, R)
    assert np.allclose(d1.weights, [0.5, 0.5])
    assert np.allclose(d2.weights, second, atol=1e-15)
    for d in (d1, d2):
        assert d.meta["residual"] < 1e-12
    p = np.array(second)
    assert s1 == pytest.approx(math.log(2))
    assert s2 == pytest.approx(float(-np.sum(p * np.log(p))))


def test_witness_entropy_value():
    *_, s2 = egg_nonuniqueness_witness(1, 2)
    assert s2 == pytest.approx(0.6365141682948128, abs=1e-12)


def test_grid_sweep_small():
    rows = egg_grid_sweep(6, 1, 2)
    assert len(rows) == 36 and len(egg_grid_points(6, 1, 2)) == 36
    assert max(r["residual"] for r in rows) < 1e-8
