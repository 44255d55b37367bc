import itertools
import json
import math

import numpy as np
import pytest

from gptthermo.checks import random_frame, random_projective_measurement
from gptthermo.decomposition import Frame
from gptthermo.errors import InvalidMeasurementError, NotSelfDualError
from gptthermo.measurements import (
    Effect,
    Measurement,
    apply_projective,
    distinguishing_measurement,
    effect_is_valid,
    gbit_repeatability_check,
    gbit_side_operation,
    identity_measurement,
    is_valid_operation,
    measurement_from_dict,
    observable_apply_function,
    observable_eigendata_roundtrip,
    observable_from_spectral_data,
    observable_shift,
    pfister_discrimination,
    projective_measurement_from_faces,
    projective_measurement_from_frame,
    projectors_positive,
)
from gptthermo.models import (
    ball,
    classical,
    contains_cone,
    gbit,
    gbit_corner,
    herm_to_coords,
    ket_state,
    make_state,
    order_unit_functional,
    quantum,
    quantum_state,
    random_state,
)


def zframe(d):
    return Frame(quantum(d), tuple(ket_state(np.eye(d)[j]) for j in range(d)))


def test_distinguishing_quantum_z():
    m = distinguishing_measurement(quantum(2), zframe(2))
    assert np.allclose(m.effects[0].coords, herm_to_coords(np.diag([1.0, 0])))
    assert np.allclose(m.effects[1].coords, herm_to_coords(np.diag([0.0, 1])))


def test_distinguishing_partial_frame_remainder():
    q = quantum(3)
    f = Frame(q, (ket_state([1, 0, 0]), ket_state([0, 1, 0])))
    m = distinguishing_measurement(q, f)
    assert len(m.effects) == 3
    for j, s in enumerate(f.states):
        assert [e(s) for e in m.effects] == pytest.approx([float(k == j) for k in range(3)], abs=1e-12)
    assert np.allclose(m.effects[2].coords, herm_to_coords(np.diag([0.0, 0, 1])))


def test_distinguishing_ball():
    b = ball(2)
    r = np.array([0.6, -0.8])
    f = Frame(b, (make_state(b, [1, *r]), make_state(b, [1, *(-r)])))
    m = distinguishing_measurement(b, f)
    table = np.array([[e(s) for s in f.states] for e in m.effects])
    assert np.max(np.abs(table - np.eye(2))) < 1e-10


def test_distinguishing_gbit_uses_parallel_hyperplanes():
    g = gbit()
    f = Frame(g, (gbit_corner(1), gbit_corner(3)))
    from gptthermo.decomposition import gbit_frame

    m = distinguishing_measurement(g, gbit_frame(f.states))
    table = np.array([[e(s) for s in f.states] for e in m.effects])
    assert np.allclose(table, np.eye(2))
    for e in m.effects:
        assert effect_is_valid(g, e)


def test_measurement_sum_and_json():
    q = quantum(3)
    for seed in range(10):
        m = distinguishing_measurement(q, random_frame(q, seed))
        total = np.sum([e.coords for e in m.effects], axis=0)
        assert np.max(np.abs(total - order_unit_functional(q))) <= 1e-12
        back = measurement_from_dict(json.loads(json.dumps(m.to_dict())))
        assert all(np.array_equal(a.coords, b.coords) for a, b in zip(back.effects, m.effects))
    with pytest.raises(InvalidMeasurementError):
        Measurement(q, (Effect(herm_to_coords(np.diag([1.0, 0, 0]))),))


def _check_projectors(pm, tol=1e-9):
    ps = pm.projectors
    for j, k in itertools.product(range(len(ps)), repeat=2):
        target = ps[j] if j == k else np.zeros_like(ps[j])
        assert np.max(np.abs(ps[j] @ ps[k] - target)) <= tol
    assert np.allclose(np.sum(pm.units(), axis=0), order_unit_functional(pm.model), atol=1e-10)


def test_projective_from_frame_examples():
    q2 = quantum(2)
    pm = projective_measurement_from_frame(q2, zframe(2))
    for j, k in itertools.product(range(2), repeat=2):
        zk = zframe(2).states[k].coords
        assert np.allclose(pm.projectors[j] @ zk, zk if j == k else 0)
    q3 = quantum(3)
    _check_projectors(projective_measurement_from_frame(q3, random_frame(q3, 5)))
    b = ball(2)
    r = np.array([0.0, 1.0])
    w1, w2 = make_state(b, [1, *r]), make_state(b, [1, *(-r)])
    pm = projective_measurement_from_frame(b, Frame(b, (w1, w2)))
    explicit = np.outer(w1.coords, w1.coords) / (w1.coords @ w1.coords)
    assert np.allclose(pm.projectors[0], explicit)
    assert np.allclose(pm.projectors[0] @ w2.coords, 0)


def test_projective_errors():
    q3 = quantum(3)
    with pytest.raises(InvalidMeasurementError):
        projective_measurement_from_frame(q3, Frame(q3, (ket_state([1, 0, 0]),)))
    with pytest.raises(NotSelfDualError):
        projective_measurement_from_frame(gbit(), Frame(gbit(), (gbit_corner(1), gbit_corner(3))))
    plus = ket_state(np.array([1, 1, 0]) / math.sqrt(2))
    with pytest.raises(InvalidMeasurementError):
        projective_measurement_from_faces(q3, [Frame(q3, (ket_state([1, 0, 0]),)), Frame(q3, (plus,))])


def test_faces_rank2_in_qutrit():
    q3 = quantum(3)
    pm = projective_measurement_from_faces(q3, [Frame(q3, (ket_state([1, 0, 0]), ket_state([0, 1, 0])))])
    assert pm.face_ranks == (2, 1)
    rho = random_state(q3, 4)
    u1 = pm.units()[0]
    m = rho.matrix()
    assert u1 @ rho.coords == pytest.approx((m[0, 0] + m[1, 1]).real)
    # P1 acts as rho -> Pi rho Pi with Pi = diag(1,1,0)
    pi = np.diag([1.0, 1, 0])
    assert np.allclose(pm.projectors[0] @ rho.coords, herm_to_coords(pi @ m @ pi))


def test_faces_rank1_reduces_to_frame():
    q2 = quantum(2)
    fs = [Frame(q2, (s,)) for s in zframe(2).states]
    a = projective_measurement_from_faces(q2, fs)
    b = projective_measurement_from_frame(q2, zframe(2))
    assert all(np.allclose(x, y) for x, y in zip(a.projectors, b.projectors))


def test_faces_2_plus_2():
    q4 = quantum(4)
    f = random_frame(q4, 17)
    pm = projective_measurement_from_faces(q4, [Frame(q4, f.states[:2]), Frame(q4, f.states[2:])])
    assert np.max(np.abs(np.sum(pm.units(), axis=0) - order_unit_functional(q4))) < 1e-10
    _check_projectors(pm)


@pytest.mark.parametrize("m", [quantum(2), quantum(3), ball(2), ball(3), classical(3)], ids=str)
def test_projector_positivity_and_unit_bounds(m):
    rng = np.random.default_rng(21)
    for degenerate in (False, True):
        pm = random_projective_measurement(m, rng, degenerate)
        _check_projectors(pm)
        assert projectors_positive(m, pm, samples=500, seed=1)
        for u in pm.units():
            assert effect_is_valid(m, Effect(u))
        for face, u in zip(pm.faces, pm.units()):
            for s in face.states:
                assert u @ s.coords == pytest.approx(1, abs=1e-9)


def test_apply_projective_examples():
    q2 = quantum(2)
    pm = projective_measurement_from_frame(q2, zframe(2))
    w = quantum_state(np.diag([0.7, 0.3]))
    post, probs = apply_projective(q2, pm, w)
    assert np.allclose(post.coords, w.coords) and np.allclose(probs, [0.7, 0.3])
    plus = ket_state(np.array([1, 1]) / math.sqrt(2))
    post, probs = apply_projective(q2, pm, plus)
    assert np.allclose(post.matrix(), np.eye(2) / 2) and np.allclose(probs, [0.5, 0.5])
    rho = random_state(quantum(3), 2)
    post, probs = apply_projective(quantum(3), identity_measurement(quantum(3)), rho)
    assert np.allclose(post.coords, rho.coords) and np.allclose(probs, [1.0])


def test_observable_examples():
    q2 = quantum(2)
    fz = [Frame(q2, (s,)) for s in zframe(2).states]
    obs = observable_from_spectral_data([1.0, -1.0], fz)
    assert np.allclose(obs.vector(), herm_to_coords(np.diag([1.0, -1.0])))
    sq = observable_apply_function(obs, lambda x: x * x)
    assert sq.eigenvalues == (1.0,) and sq.eigenface_ranks == (2,)
    assert np.allclose(sq.eigenface_units[0], herm_to_coords(np.eye(2)))
    q3 = quantum(3)
    f3 = zframe(3).states
    obs3 = observable_from_spectral_data([1.0, 3.0], [Frame(q3, f3[:2]), Frame(q3, f3[2:])])
    assert obs3.eigenface_ranks == (2, 1)
    with pytest.raises(Exception):
        observable_from_spectral_data([1.0, 1.0, 3.0], [Frame(q3, (s,)) for s in f3])


def test_observable_roundtrip_two_bases():
    q3 = quantum(3)
    c = 1 / math.sqrt(2)
    basis_a = [ket_state([1, 0, 0]), ket_state([0, 1, 0])]
    basis_b = [ket_state([c, c, 0]), ket_state([c, -c, 0])]
    third = Frame(q3, (ket_state([0, 0, 1]),))
    oa = observable_from_spectral_data([2.0, -1.0], [Frame(q3, tuple(basis_a)), third])
    ob = observable_from_spectral_data([2.0, -1.0], [Frame(q3, tuple(basis_b)), third])
    assert np.allclose(oa.vector(), ob.vector(), atol=1e-12)
    assert np.allclose(oa.eigenface_units[0], ob.eigenface_units[0], atol=1e-12)
    assert observable_eigendata_roundtrip(q3, oa) and observable_eigendata_roundtrip(q3, ob)
    diag = observable_from_spectral_data([0.1, 0.2, 0.3], [Frame(q3, (s,)) for s in zframe(3).states])
    assert observable_eigendata_roundtrip(q3, diag)


def test_observable_shift():
    q4 = quantum(4)
    f = random_frame(q4, 6)
    obs = observable_from_spectral_data([-1.0, 0.5, 2.0], [Frame(q4, f.states[:2]), Frame(q4, f.states[2:3]), Frame(q4, f.states[3:])])
    shifted = observable_shift(obs, 100.0)
    assert min(shifted.eigenvalues) == 0.5 and max(shifted.eigenvalues) == 99.0
    assert np.allclose(shifted.vector(), obs.vector() + 100.0 * obs.eigenface_units[0])
    assert observable_eigendata_roundtrip(q4, shifted)


def test_pfister_examples():
    c = classical(4)
    e = np.eye(4)
    units = pfister_discrimination(c, *(Frame(c, (make_state(c, e[j]),)) for j in range(3)))
    assert all(np.allclose(u.coords, e[j]) for j, u in enumerate(units))
    q4 = quantum(4)
    ks = zframe(4).states
    units = pfister_discrimination(q4, Frame(q4, ks[:2]), Frame(q4, ks[2:3]), Frame(q4, ks[3:]))
    for u, d in zip(units, ([1, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1])):
        assert np.allclose(u.coords, herm_to_coords(np.diag(np.array(d, float))))


def test_pfister_rotated_qutrit():
    q3 = quantum(3)
    f = random_frame(q3, 9)
    frames = [Frame(q3, (s,)) for s in f.states]
    units = pfister_discrimination(q3, *frames)
    table = np.array([[u(fr.states[0]) for fr in frames] for u in units])
    assert np.max(np.abs(table - np.eye(3))) < 1e-9
    rest = order_unit_functional(q3) - np.sum([u.coords for u in units], axis=0)
    assert effect_is_valid(q3, Effect(rest))


def test_gbit_operation_repeatable():
    g = gbit()
    w1, w2, w3, w4 = (gbit_corner(i) for i in range(1, 5))
    t1, t2 = gbit_side_operation(w1, w3)
    assert np.allclose(t1 @ w2.coords, 0) and np.allclose(t1 @ w3.coords, 0)
    assert np.allclose(t1 @ w1.coords, w1.coords)
    u = order_unit_functional(g)
    assert u @ t1 @ w4.coords == pytest.approx(1)
    assert u @ t2 @ w2.coords == pytest.approx(1) and u @ t2 @ w3.coords == pytest.approx(1)
    assert gbit_repeatability_check(t1, t2)
    assert is_valid_operation(g, [t1, t2])


def test_gbit_operation_non_repeatable():
    g = gbit()
    v = make_state(g, [0.4, 0.6, 1.0])
    t1, t2 = gbit_side_operation(v, make_state(g, [0.2, 0.3, 1.0]), repeatable=False)
    assert is_valid_operation(g, [t1, t2])
    assert np.max(np.abs(t2 @ t1)) > 0.1
    assert not gbit_repeatability_check(t1, t2)
    with pytest.raises(Exception):
        gbit_side_operation(v, gbit_corner(3), repeatable=True)
    with pytest.raises(Exception):
        gbit_side_operation(make_state(g, [1.5, 0.5, 1.0]), gbit_corner(3), repeatable=False)


def test_projection_keeps_cone():
    q = quantum(3)
    pm = projective_measurement_from_faces(q, [Frame(q, random_frame(q, 1).states[:2])])
    for seed in range(50):
        w = random_state(q, seed)
        for p in pm.projectors:
            assert contains_cone(q, make_state(q, p @ w.coords))
