import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gptthermo.errors import NotSelfDualError
from gptthermo.models import (
    ball,
    classical,
    contains_cone,
    coords_to_herm,
    egg,
    gbit,
    herm_to_coords,
    inner_product,
    is_pure,
    ket_state,
    make_state,
    order_unit_functional,
    order_unit_value,
    order_unit_vector,
    probability_embedding,
    quantum,
    quantum_state,
    random_cone_element,
    random_pure_state,
    random_state,
    state_from_dict,
)

ALL_MODELS = [classical(3), quantum(2), quantum(3), ball(2), ball(3), gbit(), egg(1, 2), egg(1, 3)]
SELF_DUAL = [m for m in ALL_MODELS if m.has_self_dual_inner_product]


def test_dimensions():
    assert (classical(5).ambient_dim, classical(5).max_frame_size) == (5, 5)
    assert (quantum(3).ambient_dim, quantum(3).max_frame_size) == (9, 3)
    assert (ball(3).ambient_dim, ball(3).max_frame_size) == (4, 2)
    assert (gbit().ambient_dim, gbit().max_frame_size) == (3, 2)
    assert egg().max_frame_size == 2
    assert not gbit().has_self_dual_inner_product and not egg().has_self_dual_inner_product


def test_cone_examples():
    assert contains_cone(classical(3), make_state(classical(3), [0.2, 0.3, 0.5]))
    assert not contains_cone(quantum(2), quantum_state(np.diag([1.0, -0.01])))
    assert contains_cone(ball(2), make_state(ball(2), [1, 0.6, 0.8]))
    assert not contains_cone(ball(2), make_state(ball(2), [1, 0.6, 0.81]))
    assert contains_cone(gbit(), make_state(gbit(), [0.2, 0.9, 1.0]))
    assert not contains_cone(gbit(), make_state(gbit(), [1.2, 0.5, 1.0]))


def test_order_unit_examples():
    assert order_unit_value(classical(2), make_state(classical(2), [0.5, 0.5])) == pytest.approx(1)
    assert order_unit_value(quantum(2), quantum_state(np.diag([0.7, 0.3]))) == pytest.approx(1)
    assert order_unit_value(gbit(), make_state(gbit(), [1, 1, 1])) == pytest.approx(1)
    assert order_unit_value(egg(), make_state(egg(), [0.3, -0.2])) == pytest.approx(1)


def test_inner_product_examples():
    q = quantum(2)
    assert inner_product(q, quantum_state(np.diag([1.0, 0])), quantum_state(np.diag([0, 1.0]))) == pytest.approx(0)
    b = ball(2)
    r, s = np.array([0.6, 0.8]), np.array([0.3, -0.1])
    v, w = make_state(b, [1, *r]), make_state(b, [1, *s])
    assert inner_product(b, v, w) == pytest.approx((1 + r @ s) / 2)
    assert inner_product(b, v, v) == pytest.approx(1)
    assert inner_product(b, v, make_state(b, [1, *(-r)])) == pytest.approx(0)
    c = classical(3)
    e = np.eye(3)
    for j in range(3):
        for k in range(3):
            assert inner_product(c, make_state(c, e[j]), make_state(c, e[k])) == pytest.approx(float(j == k))


@pytest.mark.parametrize("m", [gbit(), egg()])
def test_inner_product_unavailable(m):
    with pytest.raises(NotSelfDualError, match="no self-dualizing inner product available"):
        inner_product(m, random_state(m, 0), random_state(m, 1))


def test_quantum_coordinates_match_trace_pairing():
    rng = np.random.default_rng(4)
    for _ in range(20):
        a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        b = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        a, b = a + a.conj().T, b + b.conj().T
        assert herm_to_coords(a) @ herm_to_coords(b) == pytest.approx(np.trace(a @ b).real)
        assert np.allclose(coords_to_herm(herm_to_coords(a), 3), a)


def test_random_pure_examples():
    s = random_pure_state(classical(4), 11)
    assert sorted(s.coords) == [0, 0, 0, 1]
    p = random_pure_state(quantum(2), 7).matrix()
    assert abs(np.trace(p).real - 1) < 1e-10 and abs(np.trace(p @ p).real - 1) < 1e-10
    x, y = random_pure_state(egg(1, 2), 3).coords
    on_circle = x >= 0 and abs(x * x + y * y - 1) < 1e-10
    on_ellipse = x <= 0 and abs((x / 2) ** 2 + y * y - 1) < 1e-10
    assert on_circle or on_ellipse


@pytest.mark.parametrize("m", ALL_MODELS, ids=str)
def test_sampled_cone_elements_have_positive_unit(m):
    for seed in range(200):
        v = random_cone_element(m, seed)
        assert contains_cone(m, v)
        assert order_unit_value(m, v) >= 0
    assert order_unit_value(m, make_state(m, np.zeros(m.ambient_dim), 0.0)) == 0


@pytest.mark.parametrize("m", SELF_DUAL, ids=str)
def test_self_dual_norms(m):
    for seed in range(100):
        a, b = random_state(m, seed), random_state(m, seed + 1000)
        assert -1e-12 <= inner_product(m, a, b) <= 1 + 1e-12
        p = random_pure_state(m, seed)
        assert inner_product(m, p, p) == pytest.approx(1, abs=1e-10)
        assert is_pure(m, p)
    mixed = make_state(m, order_unit_vector(m) / m.max_frame_size)
    assert inner_product(m, mixed, mixed) < 1


def test_ball_antipodal_sum_is_unit():
    m = ball(3)
    for seed in range(20):
        p = random_pure_state(m, seed)
        q = make_state(m, [1, *(-p.coords[1:])])
        assert np.allclose(p.coords + q.coords, order_unit_vector(m))


def test_quantum_frame_sums_to_identity():
    rng = np.random.default_rng(1)
    z = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    u, _ = np.linalg.qr(z)
    total = sum(ket_state(u[:, j]).matrix() for j in range(4))
    assert np.allclose(total, np.eye(4), atol=1e-10)


@pytest.mark.parametrize("m", ALL_MODELS, ids=str)
def test_probability_embedding(m):
    L, emb = probability_embedding(m)
    assert abs(np.linalg.det(L)) > 1e-12
    u = order_unit_functional(m)
    for seed in range(100):
        w = random_state(m, seed)
        y = emb.apply(w)
        assert np.all(y >= -1e-12) and np.all(y <= 1 + 1e-12)
        assert emb.order_unit @ y == pytest.approx(u @ w.homogeneous())
    if m.kind in ("classical", "gbit"):
        assert np.array_equal(L, np.eye(m.functional_dim))


@settings(max_examples=50, deadline=None)
@given(st.sampled_from(ALL_MODELS), st.integers(0, 10**6))
def test_json_round_trip(m, seed):
    w = random_state(m, seed)
    back = state_from_dict(json.loads(json.dumps(w.to_dict())))
    assert back.model == m
    assert np.max(np.abs(back.coords - w.coords)) <= 1e-12


def test_quantum_diag_and_matrix_inputs():
    d = {"model": {"kind": "quantum", "params": {"d": 2}}, "diag": [0.75, 0.25]}
    m = {"model": {"kind": "quantum", "params": {"d": 2}}, "matrix": {"real": [[0.5, 0], [0, 0.5]], "imag": [[0, 0.5], [-0.5, 0]]}}
    assert np.allclose(state_from_dict(d).coords, [0.75, 0.25, 0, 0])
    w = state_from_dict(m)
    assert is_pure(quantum(2), w)
    assert math.isclose(order_unit_value(quantum(2), w), 1.0)
