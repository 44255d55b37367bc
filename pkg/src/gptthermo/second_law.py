"""Second-law checks: projective measurements, mixing, and the SWAP counterexample."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .entropy import spectral_entropy
from .measurements import ProjectiveMeasurement, apply_projective, validate_projectors
from .models import StateSpaceModel, StateVector, combine, quantum, quantum_state

SECOND_LAW_TOL = 1e-9


@dataclass(frozen=True)
class SecondLawReport:
    s_before: float
    s_after: float
    delta: float
    passed: bool
    context: str = ""

    @classmethod
    def from_values(cls, s_before: float, s_after: float, context: str) -> "SecondLawReport":
        delta = s_after - s_before
        return cls(s_before, s_after, delta, delta >= -SECOND_LAW_TOL, context)

    def to_dict(self) -> dict:
        return {
            "s_before": self.s_before,
            "s_after": self.s_after,
            "delta": self.delta,
            "passed": self.passed,
            "context": self.context,
        }


def second_law_projective(model: StateSpaceModel, w: StateVector, pm: ProjectiveMeasurement) -> SecondLawReport:
    """Entropy of ``w`` versus the post-measurement ensemble ``sum_j P_j w``."""
    validate_projectors(model, pm.projectors)
    post, _ = apply_projective(model, pm, w)
    kind = "non-degenerate" if all(r == 1 for r in pm.face_ranks) else "degenerate"
    return SecondLawReport.from_values(
        spectral_entropy(model, w).value,
        spectral_entropy(model, post).value,
        f"{kind} projective measurement does not decrease entropy",
    )


def mixing_concavity_check(
    model: StateSpaceModel, states: Sequence[StateVector], weights: Sequence[float]
) -> SecondLawReport:
    """``sum_j l_j S(w_j)`` before mixing versus ``S(sum_j l_j w_j)`` after."""
    lam = np.asarray(weights, dtype=float)
    before = float(sum(l * spectral_entropy(model, s).value for l, s in zip(lam, states)))
    after = spectral_entropy(model, combine(model, lam, states)).value
    return SecondLawReport.from_values(before, after, "entropy is concave: mixing does not decrease it")


def swap_channel(rho: np.ndarray) -> np.ndarray:
    """Swap ``rho`` with an ancilla in ``|1><1|`` and discard the ancilla.

    The map sends every density matrix to ``Tr(rho) |1><1|``.
    """
    d = rho.shape[0]
    anc = np.zeros((d, d), dtype=complex)
    anc[0, 0] = 1.0
    joint = np.kron(rho, anc)
    swap = np.zeros((d * d, d * d))
    for i in range(d):
        for j in range(d):
            swap[j * d + i, i * d + j] = 1.0
    out = swap @ joint @ swap.T
    return np.einsum("ijkj->ik", out.reshape(d, d, d, d))


def swap_entropy_decrease_demo(d: int, state: StateVector | None = None) -> SecondLawReport:
    """A valid but non-projective operation that lowers the entropy (maximally mixed by default)."""
    if d < 2:
        raise ValueError("d must be at least 2")
    model = quantum(d)
    w = state if state is not None else quantum_state(np.eye(d) / d)
    out = quantum_state(swap_channel(w.matrix()))
    return SecondLawReport.from_values(
        spectral_entropy(model, w).value,
        spectral_entropy(model, out).value,
        "SWAP with a pure ancilla: general operations may decrease entropy",
    )


def expected_swap_values(d: int) -> tuple[float, float]:
    return math.log(d), 0.0
