"""Effects, measurements, projective measurements, observables and the gbit operations."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from .decomposition import CLUSTER_GAP, Frame, generalized_spectral_decomposition, is_frame
from .errors import DomainError, InvalidMeasurementError
from .linalg import cluster_indices, projector_onto_span
from .models import (
    CONE_TOL,
    StateSpaceModel,
    StateVector,
    contains_cone,
    effect_of_state,
    herm_to_coords,
    inner_product,
    is_normalized,
    ket_state,
    model_from_descriptor,
    order_unit_functional,
    order_unit_vector,
    random_cone_element,
    rng_from,
    state_from_homogeneous,
)

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True, eq=False)
class Effect:
    """Linear functional given by coordinates under the dot-product pairing."""

    coords: np.ndarray
    label: str = ""

    def __post_init__(self) -> None:
        c = np.array(self.coords, dtype=float).ravel()
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)

    def __call__(self, w: StateVector) -> float:
        return float(self.coords @ w.homogeneous())


@dataclass(frozen=True, eq=False)
class Measurement:
    model: StateSpaceModel
    effects: tuple

    def __post_init__(self) -> None:
        object.__setattr__(self, "effects", tuple(self.effects))
        total = np.sum([e.coords for e in self.effects], axis=0)
        if np.max(np.abs(total - order_unit_functional(self.model))) > 1e-9:
            raise InvalidMeasurementError("effects do not sum to the order unit")

    def probabilities(self, w: StateVector) -> np.ndarray:
        return np.array([e(w) for e in self.effects])

    def to_dict(self) -> dict:
        return {
            "model": self.model.descriptor(),
            "effects": [{"label": e.label, "coords": [float(x) for x in e.coords]} for e in self.effects],
        }


def measurement_from_dict(data: dict) -> Measurement:
    model = model_from_descriptor(data["model"])
    return Measurement(model, tuple(Effect(np.asarray(e["coords"]), e.get("label", "")) for e in data["effects"]))


def effect_is_valid(model: StateSpaceModel, e: Effect, samples: int = 200, seed: Any = 0, tol: float = 1e-9) -> bool:
    """Spot-check ``0 <= e(v) <= u_A(v)`` on sampled cone elements."""
    rng = rng_from(seed)
    u = order_unit_functional(model)
    for _ in range(samples):
        v = random_cone_element(model, rng).homogeneous()
        val = float(e.coords @ v)
        if val < -tol or val > float(u @ v) + tol:
            return False
    return True


def distinguishing_measurement(model: StateSpaceModel, frame: Frame) -> Measurement:
    """Measurement with ``e_k(w_j) = delta_kj`` on the frame, completed by a remainder effect."""
    if not is_frame(model, frame.states):
        raise InvalidMeasurementError("invalid frame")
    u = order_unit_functional(model)
    if frame.effects is not None:
        effs = list(frame.effects)
    else:
        effs = [effect_of_state(model, s) for s in frame.states]
    if frame.is_maximal:
        effs = effs[:-1]
    rest = u - np.sum(effs, axis=0) if effs else u
    effects = [Effect(e, f"e{j + 1}") for j, e in enumerate(effs)]
    effects.append(Effect(rest, f"e{len(effs) + 1}"))
    return Measurement(model, tuple(effects))


# ---------------------------------------------------------------- projective measurements

@dataclass(frozen=True, eq=False)
class ProjectiveMeasurement:
    """Mutually orthogonal projectors on ``A`` whose units add to ``u_A``."""

    model: StateSpaceModel
    projectors: tuple
    face_ranks: tuple
    faces: tuple = field(default_factory=tuple)

    def __post_init__(self) -> None:
        object.__setattr__(self, "projectors", tuple(np.asarray(p, dtype=float) for p in self.projectors))
        object.__setattr__(self, "face_ranks", tuple(int(r) for r in self.face_ranks))
        validate_projectors(self.model, self.projectors)

    def units(self) -> list[np.ndarray]:
        """Functional coordinates of ``u_A o P_j``."""
        u = order_unit_functional(self.model)
        return [p.T @ u for p in self.projectors]


def validate_projectors(model: StateSpaceModel, projectors: Sequence[np.ndarray], tol: float = 1e-9) -> None:
    u = order_unit_functional(model)
    for p in projectors:
        if np.max(np.abs(p - p.T)) > tol or np.max(np.abs(p @ p - p)) > tol:
            raise InvalidMeasurementError("projector is not symmetric and idempotent")
    for a, b in itertools.combinations(projectors, 2):
        if np.max(np.abs(a @ b)) > tol:
            raise InvalidMeasurementError("projectors are not mutually orthogonal")
    total = np.sum([p.T @ u for p in projectors], axis=0)
    if np.max(np.abs(total - u)) > tol:
        raise InvalidMeasurementError("projective units do not add to the order unit")


def projectors_positive(model: StateSpaceModel, pm: ProjectiveMeasurement, samples: int = 500, seed: Any = 0) -> bool:
    """Spot-check that each projector maps sampled cone elements into the cone."""
    rng = rng_from(seed)
    for _ in range(samples):
        v = random_cone_element(model, rng)
        for p in pm.projectors:
            if not contains_cone(model, state_from_homogeneous(model, p @ v.coords)):
                return False
    return True


def _ket_of(state: StateVector) -> np.ndarray:
    rho = state.matrix()
    j = int(np.argmax(np.real(np.diag(rho))))
    col = rho[:, j]
    return col / np.linalg.norm(col)


def face_span_vectors(model: StateSpaceModel, frame: Frame) -> list[np.ndarray]:
    """Coordinate vectors spanning the linear span of the face generated by ``frame``."""
    if model.kind == "ball" and frame.size == 2:
        return list(np.eye(model.ambient_dim))
    if model.kind != "quantum":
        return [np.asarray(s.coords, dtype=float) for s in frame.states]
    kets = [_ket_of(s) for s in frame.states]
    out = []
    for a, psi in enumerate(kets):
        out.append(herm_to_coords(np.outer(psi, psi.conj())))
        for phi in kets[a + 1:]:
            m = np.outer(psi, phi.conj())
            out.append(herm_to_coords((m + m.conj().T) / SQRT2))
            out.append(herm_to_coords(1j * (m - m.conj().T) / SQRT2))
    return out


def complete_frame(model: StateSpaceModel, states: Sequence[StateVector]) -> list[StateVector]:
    """Pure states extending ``states`` to a maximal frame (deterministic, canonical basis order)."""
    model.require_self_dual()
    k = model.kind
    n_missing = model.max_frame_size - len(states)
    if n_missing <= 0:
        return []
    if k == "ball":
        if not states:
            axis = np.eye(model.size)[0]
            return [StateVector(model, np.concatenate([[1.0], s * axis])) for s in (1, -1)]
        c = states[0].coords
        return [StateVector(model, np.concatenate([[1.0], -c[1:]]))]
    if k == "classical":
        basis = [np.asarray(s.coords) for s in states]
        out = []
        for j in range(model.size):
            e = np.eye(model.size)[j]
            if all(abs(e @ b) < 1e-9 for b in basis):
                out.append(StateVector(model, e))
        return out
    d = model.size
    kets = [_ket_of(s) for s in states]
    out = []
    for j in range(d):
        v = np.eye(d, dtype=complex)[:, j]
        for _ in range(2):
            for q in kets:
                v = v - (q.conj() @ v) * q
        nv = np.linalg.norm(v)
        if nv > 1e-6:
            v = v / nv
            kets.append(v)
            out.append(ket_state(v))
    return out[:n_missing]


def projective_measurement_from_frame(model: StateSpaceModel, frame: Frame) -> ProjectiveMeasurement:
    """Rank-one projectors ``P_j`` onto ``span{w_j}`` for a maximal frame."""
    model.require_self_dual()
    if not frame.is_maximal:
        raise InvalidMeasurementError("projective measurement from a frame needs a maximal frame")
    if not is_frame(model, frame.states):
        raise InvalidMeasurementError("invalid frame")
    projs = [projector_onto_span([s.coords]) for s in frame.states]
    faces = tuple(Frame(model, (s,)) for s in frame.states)
    return ProjectiveMeasurement(model, tuple(projs), (1,) * frame.size, faces)


def projective_measurement_from_faces(
    model: StateSpaceModel, face_frames: Sequence[Frame], complete: bool = True
) -> ProjectiveMeasurement:
    """Projectors onto the spans of mutually orthogonal faces, each given by a generating frame."""
    model.require_self_dual()
    union: list[StateVector] = []
    for f in face_frames:
        if not is_frame(model, f.states):
            raise InvalidMeasurementError("face generator is not a frame")
        union.extend(f.states)
    for (i, fa), (j, fb) in itertools.combinations(enumerate(face_frames), 2):
        for a in fa.states:
            for b in fb.states:
                if abs(inner_product(model, a, b)) > 1e-9:
                    raise InvalidMeasurementError(f"faces {i} and {j} are not orthogonal")
    faces = list(face_frames)
    if complete:
        faces += [Frame(model, (s,)) for s in complete_frame(model, union)]
    projs = [projector_onto_span(face_span_vectors(model, f)) for f in faces]
    return ProjectiveMeasurement(model, tuple(projs), tuple(f.size for f in faces), tuple(faces))


def identity_measurement(model: StateSpaceModel) -> ProjectiveMeasurement:
    n = model.ambient_dim
    return ProjectiveMeasurement(model, (np.eye(n),), (model.max_frame_size,))


def apply_projective(model: StateSpaceModel, pm: ProjectiveMeasurement, w: StateVector):
    """Post-measurement ensemble ``sum_j P_j w`` and outcome probabilities ``u_A(P_j w)``."""
    u = order_unit_functional(model)
    parts = [p @ w.coords for p in pm.projectors]
    post = StateVector(model, np.sum(parts, axis=0))
    return post, np.array([float(u @ x) for x in parts])


# ---------------------------------------------------------------- observables

@dataclass(frozen=True, eq=False)
class Observable:
    model: StateSpaceModel
    eigenvalues: tuple
    eigenface_units: tuple
    eigenface_ranks: tuple
    face_frames: tuple = field(default_factory=tuple)

    def vector(self) -> np.ndarray:
        return np.sum([a * u for a, u in zip(self.eigenvalues, self.eigenface_units)], axis=0)


def observable_from_spectral_data(values: Sequence[float], face_frames: Sequence[Frame]) -> Observable:
    if len(values) != len(face_frames) or not face_frames:
        raise DomainError("need one eigenface frame per eigenvalue")
    vals = [float(v) for v in values]
    if len(set(vals)) != len(vals):
        raise DomainError("eigenvalues must be distinct (merge degenerate faces first)")
    model = face_frames[0].model
    model.require_self_dual()
    union = [s for f in face_frames for s in f.states]
    if len(union) != model.max_frame_size or not is_frame(model, union):
        raise DomainError("eigenface frames must together form a maximal frame")
    units = tuple(np.sum([s.coords for s in f.states], axis=0) for f in face_frames)
    return Observable(model, tuple(vals), units, tuple(f.size for f in face_frames), tuple(face_frames))


def observable_apply_function(obs: Observable, f: Callable[[float], float], tol: float = 1e-12) -> Observable:
    """``f(A)``: map eigenvalues pointwise and merge faces whose images coincide."""
    groups: list[tuple[float, list[int]]] = []
    for i, a in enumerate(obs.eigenvalues):
        fa = float(f(a))
        for val, idx in groups:
            if abs(val - fa) <= tol:
                idx.append(i)
                break
        else:
            groups.append((fa, [i]))
    frames = []
    for _, idx in groups:
        states = tuple(s for i in idx for s in obs.face_frames[i].states)
        frames.append(Frame(obs.model, states))
    return observable_from_spectral_data([g[0] for g in groups], frames)


def observable_shift(obs: Observable, L: float) -> Observable:
    """``A + L u_F1`` where ``F1`` is the eigenface of the smallest eigenvalue."""
    i = int(np.argmin(obs.eigenvalues))
    vals = list(obs.eigenvalues)
    vals[i] += L
    return observable_from_spectral_data(vals, obs.face_frames)


def spectral_data_of_vector(model: StateSpaceModel, vec: np.ndarray, seed: Any = None, gap: float = CLUSTER_GAP):
    """Distinct eigenvalues (descending) and eigenface units of an element of ``A``."""
    values, states = generalized_spectral_decomposition(model, vec, seed)
    order = np.argsort(-values, kind="stable")
    values = values[order]
    states = [states[i] for i in order]
    scale = max(1.0, float(np.max(np.abs(values))))
    out_vals, out_units, out_ranks = [], [], []
    for group in cluster_indices(list(values), gap * scale):
        out_vals.append(float(np.mean(values[group])))
        out_units.append(np.sum([states[i].coords for i in group], axis=0))
        out_ranks.append(len(group))
    return out_vals, out_units, out_ranks


def observable_eigendata_roundtrip(model: StateSpaceModel, obs: Observable, seed: Any = 2024, tol: float = 1e-9) -> bool:
    """Rebuild ``A = sum_x a_x u_x`` and re-extract its spectral data from a rotated decomposition."""
    vec = obs.vector()
    vals, units, ranks = spectral_data_of_vector(model, vec, rng_from(seed))
    order = np.argsort(-np.asarray(obs.eigenvalues), kind="stable")
    ref_vals = [obs.eigenvalues[i] for i in order]
    ref_units = [obs.eigenface_units[i] for i in order]
    ref_ranks = [obs.eigenface_ranks[i] for i in order]
    if len(vals) != len(ref_vals) or list(ranks) != list(ref_ranks):
        return False
    scale = max(1.0, max(abs(v) for v in ref_vals))
    for a, b, ua, ub in zip(vals, ref_vals, units, ref_units):
        if abs(a - b) > tol * scale or np.max(np.abs(ua - ub)) > tol:
            return False
    return True


# ---------------------------------------------------------------- Pfister discrimination

def pfister_discrimination(model: StateSpaceModel, b1: Frame, b3: Frame, b4: Frame) -> list[Effect]:
    """Projective units ``u_1, u_3, u_4`` of the faces generated by ``b1``, ``b3``, ``b4``."""
    model.require_self_dual()
    frames = [b1, b3, b4]
    for f in frames:
        if not is_frame(model, f.states):
            raise InvalidMeasurementError("face generator is not a frame")
    for (i, fa), (j, fb) in itertools.combinations(enumerate(frames), 2):
        for a in fa.states:
            for b in fb.states:
                if abs(inner_product(model, a, b)) > 1e-9:
                    raise InvalidMeasurementError("input faces are not mutually orthogonal")
    units = [np.sum([s.coords for s in f.states], axis=0) for f in frames]
    rest = order_unit_vector(model) - np.sum(units, axis=0)
    if not contains_cone(model, StateVector(model, rest)):
        raise InvalidMeasurementError("units exceed the order unit")
    labels = ("u1", "u3", "u4")
    return [Effect(model.metric * u, lab) for u, lab in zip(units, labels)]


# ---------------------------------------------------------------- gbit operations

E_B = np.array([0.0, 1.0, 0.0])
E_NOT_B = np.array([0.0, -1.0, 1.0])


def gbit_side_operation(v: StateVector, v_prime: StateVector, repeatable: bool = True):
    """Maps ``T1(a,b,c) = b v`` and ``T2(a,b,c) = (c - b) v'`` distinguishing the ``b = 1`` and ``b = 0`` sides."""
    for s in (v, v_prime):
        if s.model.kind != "gbit" or not (is_normalized(s.model, s) and contains_cone(s.model, s)):
            raise DomainError("side operation needs normalised gbit states")
    if repeatable:
        if abs(v.coords[1] - 1.0) > CONE_TOL or abs(v_prime.coords[1]) > CONE_TOL:
            raise DomainError("repeatable variant needs v on the w1-w4 edge and v' on the w2-w3 edge")
    t1 = np.outer(v.coords, E_B)
    t2 = np.outer(v_prime.coords, E_NOT_B)
    return t1, t2


def gbit_repeatability_check(t1: np.ndarray, t2: np.ndarray, tol: float = 1e-12) -> bool:
    return bool(np.max(np.abs(t1 @ t2)) <= tol and np.max(np.abs(t2 @ t1)) <= tol)


def is_valid_operation(model: StateSpaceModel, maps: Sequence[np.ndarray], samples: int = 200, seed: Any = 0) -> bool:
    """Normalisation (``u o sum T = u``) and positivity on sampled cone elements."""
    u = order_unit_functional(model)
    total = np.sum(maps, axis=0)
    if np.max(np.abs(u @ total - u)) > 1e-12:
        return False
    rng = rng_from(seed)
    for _ in range(samples):
        v = random_cone_element(model, rng)
        for t in maps:
            if not contains_cone(model, state_from_homogeneous(model, t @ v.homogeneous())):
                return False
    return True
