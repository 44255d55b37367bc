"""Frames, classical decompositions, majorization and Birkhoff decompositions."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .errors import DecompositionError, DomainError, InvalidMeasurementError, LinalgError
from .linalg import cluster_indices, hermitian_eigendecomposition
from .models import (
    CONE_TOL,
    GBIT_CORNERS,
    StateSpaceModel,
    StateVector,
    combine,
    contains_cone,
    coords_to_herm,
    inner_product,
    is_normalized,
    is_pure,
    ket_state,
    order_unit_functional,
    order_unit_vector,
    random_unit_vector,
    random_unitary,
    rng_from,
)

CLUSTER_GAP = 1e-8
RECON_TOL = 1e-9
EIG_TOL = 1e-12  # tighter than the solver default so weights stay well inside 1e-9


@dataclass(frozen=True, eq=False)
class Frame:
    """Perfectly distinguishable pure states.

    ``effects`` holds explicit distinguishing functionals for models without
    a self-dualizing inner product (gbit, egg); it is ``None`` otherwise.
    """

    model: StateSpaceModel
    states: tuple
    effects: tuple | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "states", tuple(self.states))
        if self.effects is not None:
            object.__setattr__(self, "effects", tuple(np.asarray(e, dtype=float) for e in self.effects))

    @property
    def size(self) -> int:
        return len(self.states)

    @property
    def is_maximal(self) -> bool:
        return self.size == self.model.max_frame_size

    def vector_sum(self) -> np.ndarray:
        return np.sum([s.homogeneous() for s in self.states], axis=0)


@dataclass(frozen=True, eq=False)
class ClassicalDecomposition:
    """Weights ``p`` and a frame with ``w = sum_j p_j w_j``."""

    weights: np.ndarray
    frame: Frame
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        p = np.asarray(self.weights, dtype=float).ravel()
        if p.size != self.frame.size:
            raise DomainError("weights and frame differ in length")
        if np.any(p < -1e-12) or abs(p.sum() - 1.0) > 1e-9:
            raise DomainError(f"weights are not a probability vector: {p}")
        p.setflags(write=False)
        object.__setattr__(self, "weights", p)

    def reconstruct(self) -> StateVector:
        return combine(self.frame.model, self.weights, self.frame.states)

    def residual(self, w: StateVector) -> float:
        return float(np.max(np.abs(self.reconstruct().homogeneous() - w.homogeneous())))


@dataclass(frozen=True, eq=False)
class DoublyStochasticMatrix:
    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.array(self.matrix, dtype=float)
        check_doubly_stochastic(m, 1e-9)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)


def check_doubly_stochastic(m: np.ndarray, tol: float) -> None:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DomainError("doubly stochastic matrix must be square")
    if np.min(m, initial=0.0) < -1e-12:
        raise DomainError("doubly stochastic matrix has negative entries")
    if np.max(np.abs(m.sum(axis=0) - 1.0)) > tol or np.max(np.abs(m.sum(axis=1) - 1.0)) > tol:
        raise DomainError("row or column sums differ from 1")


# ---------------------------------------------------------------- spectral data

def generalized_spectral_decomposition(
    model: StateSpaceModel, coords: np.ndarray, rng: Any = None
) -> tuple[np.ndarray, list[StateVector]]:
    """Write any element of ``A`` as ``sum_j a_j w_j`` over a maximal frame (self-dual models).

    With ``rng`` given, bases of degenerate clusters (quantum) or the axis of
    a degenerate ball element are randomised instead of fixed.
    """
    model.require_self_dual()
    c = np.asarray(coords, dtype=float)
    k = model.kind
    if k == "classical":
        basis = [StateVector(model, np.eye(model.size)[j]) for j in range(model.size)]
        return c.copy(), basis
    if k == "ball":
        a0, v = c[0], c[1:]
        n = float(np.linalg.norm(v))
        if n > 1e-12:
            axis = v / n
        elif rng is not None:
            axis = random_unit_vector(model.size, rng_from(rng))
        else:
            axis = np.eye(model.size)[0]
        states = [
            StateVector(model, np.concatenate([[1.0], axis])),
            StateVector(model, np.concatenate([[1.0], -axis])),
        ]
        return np.array([(a0 + n) / 2, (a0 - n) / 2]), states
    d = model.size
    h = coords_to_herm(c, d)
    spec = hermitian_eigendecomposition(h, EIG_TOL)
    vecs = spec.eigenvectors
    if rng is not None:
        gen = rng_from(rng)
        vecs = vecs.copy()
        for group in cluster_indices(spec.eigenvalues, CLUSTER_GAP):
            if len(group) > 1:
                vecs[:, group] = vecs[:, group] @ random_unitary(len(group), gen)
    states = [ket_state(vecs[:, j]) for j in range(d)]
    values = np.array([float(s.coords @ c) for s in states])
    return values, states


def classical_decomposition(model: StateSpaceModel, w: StateVector, rng: Any = None) -> ClassicalDecomposition:
    """Classical decomposition of a normalised state, dispatched by model."""
    # quantum positivity is read off the spectrum below instead of a second eigensolve
    if not is_normalized(model, w) or (model.kind != "quantum" and not contains_cone(model, w)):
        raise DomainError("classical decomposition needs a normalised state")
    if model.kind == "egg":
        from .egg import egg_decompose

        return egg_decompose(w, model.r, model.R)
    if model.kind == "gbit":
        return _gbit_decomposition(model, w)
    values, states = generalized_spectral_decomposition(model, w.coords, rng)
    if float(np.min(values)) < -CONE_TOL:
        raise DomainError("classical decomposition needs a normalised state")
    values = np.where(values < 0, 0.0, values)
    values = values / values.sum()
    return ClassicalDecomposition(values, Frame(model, tuple(states)))


def _gbit_decomposition(model: StateSpaceModel, w: StateVector, tol: float = 1e-9) -> ClassicalDecomposition:
    x = w.coords
    for i, j in itertools.combinations(range(4), 2):
        ci, cj = GBIT_CORNERS[i], GBIT_CORNERS[j]
        diff = ci - cj
        p = float((x - cj) @ diff / (diff @ diff))
        if -tol <= p <= 1 + tol and np.max(np.abs(cj + p * diff - x)) <= tol:
            p = min(max(p, 0.0), 1.0)
            frame = gbit_frame([StateVector(model, ci), StateVector(model, cj)])
            return ClassicalDecomposition(np.array([p, 1.0 - p]), frame)
    raise DecompositionError("no classical decomposition in this model")


# ---------------------------------------------------------------- non-self-dual frames

GBIT_EDGE_EFFECTS = (
    np.array([1.0, 0.0, 0.0]),   # a
    np.array([-1.0, 0.0, 1.0]),  # c - a
    np.array([0.0, 1.0, 0.0]),   # b
    np.array([0.0, -1.0, 1.0]),  # c - b
)


def gbit_frame(states: Sequence[StateVector]) -> Frame:
    """Two distinct gbit corners with their parallel-hyperplane effects."""
    if len(states) == 1:
        (s,) = states
        return Frame(s.model, (s,), (order_unit_functional(s.model),))
    if len(states) != 2:
        raise InvalidMeasurementError("a gbit frame has at most two states")
    s1, s2 = states
    for e in GBIT_EDGE_EFFECTS:
        if abs(e @ s1.coords - 1.0) < 1e-9 and abs(e @ s2.coords) < 1e-9:
            return Frame(s1.model, (s1, s2), (e, order_unit_functional(s1.model) - e))
    raise InvalidMeasurementError("gbit states are not perfectly distinguishable")


def is_frame(model: StateSpaceModel, states: Sequence[StateVector], tol: float = CONE_TOL) -> bool:
    states = list(states)
    if not states or len(states) > model.max_frame_size:
        return False
    if not all(is_pure(model, s, tol) for s in states):
        return False
    if model.has_self_dual_inner_product:
        return all(
            abs(inner_product(model, a, b)) <= 10 * tol for a, b in itertools.combinations(states, 2)
        )
    if len(states) == 1:
        return True
    a, b = states
    if model.kind == "gbit":
        return float(np.max(np.abs(a.coords - b.coords))) > 0.5
    from .egg import egg_outward_normal

    na = egg_outward_normal(a.coords, model.r, model.R)
    nb = egg_outward_normal(b.coords, model.r, model.R)
    return bool(na @ nb < -1.0 + 1e-7)


def frame_sums_to_order_unit(model: StateSpaceModel, frame: Frame, tol: float = 1e-9) -> bool:
    """Whether the frame vectors add up to the order-unit vector (self-dual models)."""
    model.require_self_dual()
    total = np.sum([s.coords for s in frame.states], axis=0)
    return bool(np.max(np.abs(total - order_unit_vector(model))) <= tol)


def frame_overlap_matrix(model: StateSpaceModel, frame_a: Frame, frame_b: Frame) -> DoublyStochasticMatrix:
    """``R_ij = <a_i, b_j>`` for two maximal frames."""
    model.require_self_dual()
    if not (frame_a.is_maximal and frame_b.is_maximal):
        raise DomainError("overlap matrix needs two maximal frames")
    m = np.array([[inner_product(model, a, b) for b in frame_b.states] for a in frame_a.states])
    return DoublyStochasticMatrix(m)


# ---------------------------------------------------------------- majorization

def majorizes(p: Sequence[float], q: Sequence[float], tol: float = 1e-12) -> bool:
    """True iff ``q`` is majorized by ``p`` (``q < p``)."""
    a = np.asarray(p, dtype=float).ravel()
    b = np.asarray(q, dtype=float).ravel()
    if np.any(a < -tol) or np.any(b < -tol):
        raise DomainError("majorization needs nonnegative vectors")
    n = max(a.size, b.size)
    a = np.sort(np.pad(a, (0, n - a.size)))[::-1]
    b = np.sort(np.pad(b, (0, n - b.size)))[::-1]
    return bool(np.all(np.cumsum(a) >= np.cumsum(b) - tol))


def _perfect_matching(support: np.ndarray) -> list[int] | None:
    """Kuhn's augmenting-path matching; returns ``col[row]`` or ``None``."""
    n = support.shape[0]
    match_col = [-1] * n  # row matched to each column

    def augment(row: int, seen: list[bool]) -> bool:
        for col in np.flatnonzero(support[row]):
            if seen[col]:
                continue
            seen[col] = True
            if match_col[col] < 0 or augment(match_col[col], seen):
                match_col[col] = row
                return True
        return False

    for row in range(n):
        if not augment(row, [False] * n):
            return None
    perm = [0] * n
    for col, row in enumerate(match_col):
        perm[row] = col
    return perm


def permutation_matrix(perm: Sequence[int]) -> np.ndarray:
    n = len(perm)
    m = np.zeros((n, n))
    m[np.arange(n), list(perm)] = 1.0
    return m


def birkhoff_decomposition(m, tol: float = 1e-9) -> list[tuple[float, tuple[int, ...]]]:
    """Convex decomposition into permutations; ``perm[i]`` is the column hit by row ``i``."""
    mat = m.matrix if isinstance(m, DoublyStochasticMatrix) else np.asarray(m, dtype=float)
    check_doubly_stochastic(mat, tol)
    n = mat.shape[0]
    work = np.where(mat > 0, mat, 0.0)
    eps = 1e-15 * n
    terms: list[tuple[float, tuple[int, ...]]] = []
    remaining = float(work.sum()) / n
    for _ in range(n * n):
        if remaining <= tol * 1e-3:
            break
        perm = _perfect_matching(work > eps)
        if perm is None:
            break
        idx = (np.arange(n), np.array(perm))
        weight = float(np.min(work[idx]))
        terms.append((weight, tuple(perm)))
        work[idx] -= weight
        work[work <= eps] = 0.0
        remaining -= weight
    if not terms:
        raise LinalgError("Birkhoff decomposition found no permutation")
    return terms
