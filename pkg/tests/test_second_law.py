import math

import numpy as np
import pytest

from gptthermo.checks import random_frame, random_projective_measurement
from gptthermo.decomposition import Frame, classical_decomposition, majorizes
from gptthermo.measurements import apply_projective, projective_measurement_from_faces, projective_measurement_from_frame
from gptthermo.models import ball, ket_state, quantum, quantum_state, random_pure_state, random_state, rng_from
from gptthermo.second_law import (
    expected_swap_values,
    mixing_concavity_check,
    second_law_projective,
    swap_channel,
    swap_entropy_decrease_demo,
)


def zframe(d):
    return Frame(quantum(d), tuple(ket_state(np.eye(d)[j]) for j in range(d)))


def test_projective_examples():
    q = quantum(2)
    pm = projective_measurement_from_frame(q, zframe(2))
    rep = second_law_projective(q, ket_state(np.array([1, 1]) / math.sqrt(2)), pm)
    assert rep.s_before == pytest.approx(0, abs=1e-12)
    assert rep.s_after == pytest.approx(math.log(2), abs=1e-12)
    assert rep.passed and rep.delta == pytest.approx(rep.s_after - rep.s_before)
    rep = second_law_projective(q, quantum_state(np.diag([0.8, 0.2])), pm)
    assert rep.delta == pytest.approx(0, abs=1e-12)


def test_degenerate_qudit_seed13():
    q4 = quantum(4)
    f = random_frame(q4, 13)
    pm = projective_measurement_from_faces(q4, [Frame(q4, f.states[:2]), Frame(q4, f.states[2:])])
    rep = second_law_projective(q4, random_state(q4, 13), pm)
    assert rep.delta >= -1e-9 and rep.passed
    assert "degenerate" in rep.context


@pytest.mark.parametrize("m", [quantum(2), quantum(3), ball(2), ball(3)], ids=str)
def test_random_measurements_and_outcome_majorization(m):
    rng = rng_from(99)
    for trial in range(40):
        w = random_state(m, rng)
        pm = random_projective_measurement(m, rng, degenerate=trial % 4 == 0)
        assert second_law_projective(m, w, pm).delta >= -1e-9
        if all(r == 1 for r in pm.face_ranks):
            _, probs = apply_projective(m, pm, w)
            p = classical_decomposition(m, w).weights
            assert majorizes(p, probs, tol=1e-9)


def test_mixing_examples():
    q = quantum(2)
    w = random_state(q, 1)
    assert mixing_concavity_check(q, [w, w], [0.3, 0.7]).delta == pytest.approx(0, abs=1e-9)
    rep = mixing_concavity_check(q, [ket_state([1, 0]), ket_state([0, 1])], [0.5, 0.5])
    assert rep.delta == pytest.approx(math.log(2), abs=1e-12)
    rng = rng_from(4)
    for _ in range(100):
        k = int(rng.integers(2, 5))
        states = [random_state(quantum(3), rng) for _ in range(k)]
        lam = rng.dirichlet(np.ones(k))
        assert mixing_concavity_check(quantum(3), states, lam).delta >= -1e-9


@pytest.mark.parametrize("d", [2, 3])
def test_swap_demo(d):
    rep = swap_entropy_decrease_demo(d)
    before, after = expected_swap_values(d)
    assert rep.s_before == pytest.approx(before, abs=1e-12)
    assert rep.s_after == pytest.approx(after, abs=1e-12)
    assert rep.passed is False


def test_swap_pure_input():
    rep = swap_entropy_decrease_demo(2, random_pure_state(quantum(2), 5))
    assert rep.s_before == pytest.approx(0, abs=1e-9) and rep.delta == pytest.approx(0, abs=1e-9)


def test_swap_channel_is_replacement():
    rho = random_state(quantum(3), 8).matrix()
    out = swap_channel(rho)
    target = np.zeros((3, 3))
    target[0, 0] = 1
    assert np.allclose(out, target)
