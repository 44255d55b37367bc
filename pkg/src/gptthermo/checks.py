"""Randomised property suites shared by the CLI and the test-suite."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .decomposition import EIG_TOL, Frame, classical_decomposition, majorizes
from .entropy import (
    random_pure_decomposition,
    relative_entropy,
)
from .linalg import hermitian_eigendecomposition
from .measurements import (
    ProjectiveMeasurement,
    identity_measurement,
    projective_measurement_from_faces,
    projective_measurement_from_frame,
)
from .models import (
    StateSpaceModel,
    StateVector,
    ball,
    classical,
    ket_state,
    quantum,
    quantum_state,
    random_state,
    random_unit_vector,
    random_unitary,
    rng_from,
)
from .second_law import mixing_concavity_check, second_law_projective, swap_entropy_decrease_demo
from .thermo import GasConfig, run_petz_protocol

SELF_DUAL_MODELS = (classical(3), quantum(2), quantum(3), ball(2), ball(3))
SECOND_LAW_MODELS = (quantum(2), quantum(3), quantum(4), ball(2), ball(3))


# ---------------------------------------------------------------- generators

def random_frame(model: StateSpaceModel, rng: Any) -> Frame:
    """A uniformly rotated maximal frame."""
    rng = rng_from(rng)
    k = model.kind
    if k == "quantum":
        u = random_unitary(model.size, rng)
        return Frame(model, tuple(ket_state(u[:, j]) for j in range(model.size)))
    if k == "ball":
        n = random_unit_vector(model.size, rng)
        return Frame(model, tuple(StateVector(model, np.concatenate([[1.0], s * n])) for s in (1, -1)))
    if k == "classical":
        perm = rng.permutation(model.size)
        return Frame(model, tuple(StateVector(model, np.eye(model.size)[j]) for j in perm))
    raise ValueError(f"no random frames for {model}")


def random_partition(n: int, rng: np.random.Generator, force_block: bool = True) -> list[int]:
    """Random composition of ``n``; with ``force_block`` at least one part has size >= 2."""
    while True:
        cuts = sorted(rng.choice(np.arange(1, n), size=rng.integers(0, n), replace=False)) if n > 1 else []
        edges = [0, *cuts, n]
        sizes = [b - a for a, b in zip(edges, edges[1:])]
        if not force_block or n < 2 or max(sizes) >= 2:
            return sizes


def random_degenerate_state(model: StateSpaceModel, rng: Any) -> StateVector:
    """A quantum state whose spectrum has at least one repeated eigenvalue."""
    rng = rng_from(rng)
    d = model.size
    sizes = random_partition(d, rng)
    block_w = rng.dirichlet(np.ones(len(sizes)))
    lam = np.concatenate([[w / s] * s for w, s in zip(block_w, sizes)])
    u = random_unitary(d, rng)
    return quantum_state((u * lam) @ u.conj().T)


def random_projective_measurement(model: StateSpaceModel, rng: Any, degenerate: bool = False) -> ProjectiveMeasurement:
    rng = rng_from(rng)
    frame = random_frame(model, rng)
    if not degenerate:
        return projective_measurement_from_frame(model, frame)
    if model.kind == "ball":
        return identity_measurement(model)
    sizes = random_partition(frame.size, rng)
    faces, start = [], 0
    for s in sizes:
        faces.append(Frame(model, frame.states[start : start + s]))
        start += s
    return projective_measurement_from_faces(model, faces, complete=False)


def random_orthogonal_mixture(model: StateSpaceModel, rng: Any):
    """Weights and perfectly distinguishable (generally mixed) components."""
    rng = rng_from(rng)
    frame = random_frame(model, rng)
    n = frame.size
    sizes = random_partition(n, rng, force_block=False)
    comps, start = [], 0
    for s in sizes:
        block = frame.states[start : start + s]
        start += s
        p = rng.dirichlet(np.ones(s))
        coords = np.sum([pj * st.coords for pj, st in zip(p, block)], axis=0)
        comps.append(StateVector(model, coords))
    lam = rng.dirichlet(np.ones(len(comps)))
    return lam, comps


# ---------------------------------------------------------------- suites

@dataclass
class SuiteResult:
    name: str
    trials: int = 0
    passed: int = 0
    failed: int = 0
    worst_residual: float = 0.0
    expected_failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def record(self, good: bool, residual: float) -> None:
        self.trials += 1
        if good:
            self.passed += 1
        else:
            self.failed += 1
        if math.isfinite(residual):
            self.worst_residual = max(self.worst_residual, residual)

    def to_dict(self) -> dict:
        return {
            "suite": self.name,
            "trials": self.trials,
            "passed": self.passed,
            "failed": self.failed,
            "worst_residual": self.worst_residual,
            "expected_failures": self.expected_failures,
            "ok": self.ok,
        }


def suite_second_law(trials: int, seed: Any = 0) -> SuiteResult:
    """Random (state, projective measurement) pairs; residual is the largest entropy decrease."""
    rng = rng_from(seed)
    res = SuiteResult("second-law")
    for t in range(trials):
        model = SECOND_LAW_MODELS[t % len(SECOND_LAW_MODELS)]
        degenerate = t % 3 == 2
        pm = random_projective_measurement(model, rng, degenerate)
        rep = second_law_projective(model, random_state(model, rng), pm)
        res.record(rep.passed, max(-rep.delta, 0.0))
    demo = swap_entropy_decrease_demo(2)
    res.expected_failures.append({"name": "swap-demo(d=2)", **demo.to_dict()})
    return res


def suite_klein(trials: int, seed: Any = 0) -> SuiteResult:
    """``S(w||v) >= 0`` on random pairs, and ``S(w||w) = 0``; residual is the worst violation."""
    rng = rng_from(seed)
    res = SuiteResult("klein")
    for t in range(trials):
        model = SELF_DUAL_MODELS[t % len(SELF_DUAL_MODELS)]
        w, v = random_state(model, rng), random_state(model, rng)
        s = relative_entropy(model, w, v)
        same = relative_entropy(model, w, w)
        good = (s.infinite or s.value >= -1e-9) and abs(same.value) <= 1e-8 and (s.infinite or s.value > 1e-8)
        res.record(good, max(0.0, -s.value if not s.infinite else 0.0, abs(same.value)))
    return res


def suite_concavity(trials: int, seed: Any = 0) -> SuiteResult:
    rng = rng_from(seed)
    res = SuiteResult("concavity")
    for t in range(trials):
        model = SELF_DUAL_MODELS[t % len(SELF_DUAL_MODELS)]
        m = int(rng.integers(2, 5))
        states = [random_state(model, rng) for _ in range(m)]
        rep = mixing_concavity_check(model, states, rng.dirichlet(np.ones(m)))
        res.record(rep.passed, max(-rep.delta, 0.0))
    return res


def suite_petz(trials: int, seed: Any = 0) -> SuiteResult:
    rng = rng_from(seed)
    res = SuiteResult("petz")
    cfg = GasConfig()
    for t in range(trials):
        model = SELF_DUAL_MODELS[t % len(SELF_DUAL_MODELS)]
        lam, comps = random_orthogonal_mixture(model, rng)
        out = run_petz_protocol(model, lam, comps, cfg)
        res.record(out.passed, abs(out.relation_lhs - out.relation_rhs))
    return res


def suite_well_defined(trials: int, seed: Any = 0) -> SuiteResult:
    """Two independently rotated decompositions of degenerate quantum states agree."""
    rng = rng_from(seed)
    res = SuiteResult("well-defined")
    models = (quantum(2), quantum(3), quantum(4))
    for t in range(trials):
        model = models[t % 3]
        w = random_degenerate_state(model, rng)
        d1 = classical_decomposition(model, w, rng=rng)
        d2 = classical_decomposition(model, w, rng=rng)
        diff = float(np.max(np.abs(np.sort(d1.weights) - np.sort(d2.weights))))
        recon = max(d1.residual(w), d2.residual(w))
        res.record(diff <= 1e-9 and recon <= 1e-9, max(diff, recon))
    return res


DRAWS_PER_STATE = 5


def suite_collision(trials: int, seed: Any = 0) -> SuiteResult:
    """``sum q^2 <= sum p^2`` for random pure decompositions; residual is the largest excess.

    Each sampled state serves ``DRAWS_PER_STATE`` consecutive trials.
    """
    rng = rng_from(seed)
    res = SuiteResult("collision")
    t = 0
    while t < trials:
        model = SELF_DUAL_MODELS[(t // DRAWS_PER_STATE) % len(SELF_DUAL_MODELS)]
        w = random_state(model, rng)
        p = classical_decomposition(model, w).weights
        spec = hermitian_eigendecomposition(w.matrix(), EIG_TOL) if model.kind == "quantum" else None
        for _ in range(min(DRAWS_PER_STATE, trials - t)):
            q = random_pure_decomposition(model, w, rng, spectrum=spec).weights
            excess = float(np.sum(q**2) - np.sum(p**2))
            res.record(excess <= 1e-9 and majorizes(p, q, 1e-9), max(excess, 0.0))
            t += 1
    return res


SUITES: dict[str, Callable[[int, Any], SuiteResult]] = {
    "second-law": suite_second_law,
    "klein": suite_klein,
    "concavity": suite_concavity,
    "petz": suite_petz,
    "well-defined": suite_well_defined,
    "collision": suite_collision,
}
