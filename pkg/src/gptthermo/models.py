"""Concrete state-space models: classical, quantum, ball, gbit and egg.

Every model lives in a real ambient space ``A``.  States are plain coordinate
vectors; effects are coordinate vectors evaluated with the plain dot product
against the *homogeneous* coordinates of a state (identical to ``coords``
except for the egg, whose states carry an explicit normalisation).

Quantum coordinates of a Hermitian ``d x d`` matrix are the ``d`` diagonal
entries followed, for each pair ``j < k``, by ``sqrt(2) Re`` and
``sqrt(2) Im`` of entry ``(j, k)``.  With this scaling ``Tr(AB)`` is the dot
product of coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np

from .errors import DomainError, NotSelfDualError
from .linalg import hermitian_eigendecomposition

CONE_TOL = 1e-9
SQRT2 = math.sqrt(2.0)

KINDS = ("classical", "quantum", "ball", "gbit", "egg")


def rng_from(seed: Any = None) -> np.random.Generator:
    """Accept an int, ``None`` or an existing ``Generator``."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


@dataclass(frozen=True)
class StateSpaceModel:
    """A tagged concrete model.

    ``size`` is ``n`` for classical(n) and ``d`` for quantum(d) / ball(d);
    ``r`` and ``R`` are the egg radii.
    """

    kind: str
    size: int = 0
    r: float = 0.0
    R: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise DomainError(f"unknown model kind {self.kind!r}")
        if self.kind in ("classical", "quantum", "ball") and self.size < 1:
            raise DomainError(f"{self.kind} needs a positive dimension")
        if self.kind == "egg" and not (self.r > 0 and self.R > 0):
            raise DomainError("egg radii must be positive")

    @property
    def ambient_dim(self) -> int:
        k = self.kind
        if k == "classical":
            return self.size
        if k == "quantum":
            return self.size * self.size
        if k == "ball":
            return self.size + 1
        if k == "gbit":
            return 3
        return 2

    @property
    def functional_dim(self) -> int:
        """Length of effect coordinate vectors (egg adds the normalisation slot)."""
        return 3 if self.kind == "egg" else self.ambient_dim

    @property
    def max_frame_size(self) -> int:
        if self.kind in ("classical", "quantum"):
            return self.size
        return 2

    @property
    def has_self_dual_inner_product(self) -> bool:
        return self.kind in ("classical", "quantum", "ball")

    @property
    def metric(self) -> float:
        """Scale factor ``g`` with ``<v, w> = g * (v . w)``."""
        self.require_self_dual()
        return 0.5 if self.kind == "ball" else 1.0

    def require_self_dual(self) -> None:
        if not self.has_self_dual_inner_product:
            raise NotSelfDualError(f"no self-dualizing inner product available for {self.kind}")

    def descriptor(self) -> dict:
        if self.kind == "egg":
            params: dict = {"r": self.r, "R": self.R}
        elif self.kind == "gbit":
            params = {}
        elif self.kind == "classical":
            params = {"n": self.size}
        else:
            params = {"d": self.size}
        return {"kind": self.kind, "params": params}

    def __str__(self) -> str:
        if self.kind == "gbit":
            return "gbit"
        if self.kind == "egg":
            return f"egg({self.r:g},{self.R:g})"
        return f"{self.kind}({self.size})"


def classical(n: int) -> StateSpaceModel:
    return StateSpaceModel("classical", int(n))


def quantum(d: int) -> StateSpaceModel:
    return StateSpaceModel("quantum", int(d))


def ball(d: int) -> StateSpaceModel:
    return StateSpaceModel("ball", int(d))


def gbit() -> StateSpaceModel:
    return StateSpaceModel("gbit")


def egg(r: float = 1.0, R: float = 2.0) -> StateSpaceModel:
    return StateSpaceModel("egg", 0, float(r), float(R))


def model_from_descriptor(desc: dict) -> StateSpaceModel:
    try:
        kind = desc["kind"]
        params = desc.get("params", {}) or {}
    except (TypeError, KeyError, AttributeError) as exc:
        raise DomainError(f"malformed model descriptor: {desc!r}") from exc
    if kind == "classical":
        return classical(params["n"])
    if kind in ("quantum", "ball"):
        return StateSpaceModel(kind, int(params["d"]))
    if kind == "gbit":
        return gbit()
    if kind == "egg":
        return egg(params.get("r", 1.0), params.get("R", 2.0))
    raise DomainError(f"unknown model kind {kind!r}")


@dataclass(frozen=True, eq=False)
class StateVector:
    """Element of the ambient space of ``model``.

    For the egg, ``coords`` is the point ``(x, y)`` on the normalisation plane
    and ``scale`` the normalisation; for all other models ``scale`` is unused.
    """

    model: StateSpaceModel
    coords: np.ndarray
    scale: float = 1.0

    def __post_init__(self) -> None:
        c = np.array(self.coords, dtype=float).ravel()
        if c.size != self.model.ambient_dim:
            raise DomainError(
                f"{self.model} expects {self.model.ambient_dim} coordinates, got {c.size}"
            )
        if not np.all(np.isfinite(c)) or not math.isfinite(self.scale):
            raise DomainError("state coordinates must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)

    def homogeneous(self) -> np.ndarray:
        """Coordinates paired against effect functionals."""
        if self.model.kind == "egg":
            return np.array([self.scale * self.coords[0], self.scale * self.coords[1], self.scale])
        return self.coords

    def matrix(self) -> np.ndarray:
        """Density-matrix view (quantum only)."""
        if self.model.kind != "quantum":
            raise DomainError("matrix view exists only for quantum states")
        return coords_to_herm(self.coords, self.model.size)

    def to_dict(self) -> dict:
        out = {"model": self.model.descriptor(), "coords": [float(x) for x in self.coords]}
        if self.model.kind == "egg" and self.scale != 1.0:
            out["scale"] = float(self.scale)
        return out


def make_state(model: StateSpaceModel, coords: Iterable[float], scale: float = 1.0) -> StateVector:
    return StateVector(model, np.asarray(list(coords) if not isinstance(coords, np.ndarray) else coords), scale)


def state_from_homogeneous(model: StateSpaceModel, h: np.ndarray) -> StateVector:
    h = np.asarray(h, dtype=float)
    if model.kind != "egg":
        return StateVector(model, h)
    s = float(h[2])
    if abs(s) < 1e-300:
        return StateVector(model, np.zeros(2), 0.0)
    return StateVector(model, h[:2] / s, s)


def state_from_dict(data: dict) -> StateVector:
    try:
        model = model_from_descriptor(data["model"])
    except KeyError as exc:
        raise DomainError("state JSON needs a 'model' entry") from exc
    if "coords" in data:
        return StateVector(model, np.asarray(data["coords"], dtype=float), float(data.get("scale", 1.0)))
    if "matrix" in data and model.kind == "quantum":
        m = data["matrix"]
        h = np.asarray(m["real"], dtype=float) + 1j * np.asarray(m.get("imag", np.zeros_like(m["real"])), dtype=float)
        return quantum_state(h)
    if "diag" in data and model.kind == "quantum":
        return quantum_state(np.diag(np.asarray(data["diag"], dtype=float)))
    raise DomainError("state JSON needs 'coords'")


def combine(model: StateSpaceModel, weights: Sequence[float], states: Sequence[StateVector]) -> StateVector:
    """Linear combination ``sum_j weights[j] * states[j]`` in homogeneous coordinates."""
    if len(weights) != len(states):
        raise DomainError("weights and states differ in length")
    h = np.zeros(model.functional_dim)
    for p, s in zip(weights, states):
        h = h + float(p) * s.homogeneous()
    return state_from_homogeneous(model, h)


# ---------------------------------------------------------------- quantum coords

def _pairs(d: int) -> list[tuple[int, int]]:
    return [(j, k) for j in range(d) for k in range(j + 1, d)]


def herm_to_coords(h) -> np.ndarray:
    h = np.asarray(h, dtype=complex)
    d = h.shape[0]
    out = [h[j, j].real for j in range(d)]
    for j, k in _pairs(d):
        out.append(SQRT2 * h[j, k].real)
        out.append(SQRT2 * h[j, k].imag)
    return np.array(out, dtype=float)


def coords_to_herm(v, d: int) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    h = np.zeros((d, d), dtype=complex)
    h[np.arange(d), np.arange(d)] = v[:d]
    i = d
    for j, k in _pairs(d):
        z = (v[i] + 1j * v[i + 1]) / SQRT2
        h[j, k] = z
        h[k, j] = np.conj(z)
        i += 2
    return h


def quantum_state(h) -> StateVector:
    h = np.asarray(h, dtype=complex)
    return StateVector(quantum(h.shape[0]), herm_to_coords(h))


def ket_state(psi) -> StateVector:
    """Rank-one projector onto the (normalised) vector ``psi``."""
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    return quantum_state(np.outer(psi, psi.conj()))


# ---------------------------------------------------------------- egg geometry

def egg_half_height(x: float, r: float, R: float) -> float:
    """Half-width of the egg in ``y`` at abscissa ``x`` (``nan`` outside ``[-R, r]``)."""
    if x >= 0:
        return math.sqrt(max(r * r - x * x, 0.0)) if x <= r else float("nan")
    return r * math.sqrt(max(1.0 - (x / R) ** 2, 0.0)) if x >= -R else float("nan")


def egg_contains_point(x: float, y: float, r: float, R: float, tol: float = CONE_TOL) -> bool:
    if x >= 0:
        return math.hypot(x, y) <= r + tol
    return math.hypot(x / R, y / r) <= 1.0 + tol


def egg_circle_point(alpha: float, r: float) -> np.ndarray:
    return np.array([r * math.cos(alpha), r * math.sin(alpha)])


def egg_ellipse_point(beta: float, r: float, R: float) -> np.ndarray:
    return np.array([-R * math.cos(beta), r * math.sin(beta)])


def egg_support(direction: np.ndarray, r: float, R: float) -> float:
    """Support function ``max_{p in egg} direction . p`` in closed form."""
    cx, cy = float(direction[0]), float(direction[1])
    circ = r * math.hypot(cx, cy) if cx >= 0 else r * abs(cy)
    ell = math.hypot(R * cx, r * cy) if cx <= 0 else r * abs(cy)
    return max(circ, ell)


# ---------------------------------------------------------------- cone, unit, pairing

def order_unit_functional(model: StateSpaceModel) -> np.ndarray:
    """Coordinates of ``u_A`` under the dot-product pairing."""
    k = model.kind
    if k == "classical":
        return np.ones(model.size)
    if k == "quantum":
        return herm_to_coords(np.eye(model.size))
    if k == "ball":
        e = np.zeros(model.ambient_dim)
        e[0] = 1.0
        return e
    return np.array([0.0, 0.0, 1.0])


def order_unit_vector(model: StateSpaceModel) -> np.ndarray:
    """The element ``u`` of ``A`` with ``<u, .> = u_A`` (self-dual models only)."""
    return order_unit_functional(model) / model.metric


def order_unit_value(model: StateSpaceModel, v: StateVector) -> float:
    _check_model(model, v)
    return float(order_unit_functional(model) @ v.homogeneous())


def functional_value(model: StateSpaceModel, f: np.ndarray, v: StateVector) -> float:
    return float(np.asarray(f, dtype=float) @ v.homogeneous())


def inner_product(model: StateSpaceModel, v: StateVector, w: StateVector) -> float:
    model.require_self_dual()
    _check_model(model, v)
    _check_model(model, w)
    return model.metric * float(v.coords @ w.coords)


def effect_of_state(model: StateSpaceModel, w: StateVector) -> np.ndarray:
    """Functional coordinates of ``<w, .>``."""
    return model.metric * np.asarray(w.coords, dtype=float)


def contains_cone(model: StateSpaceModel, v: StateVector, tol: float = CONE_TOL) -> bool:
    _check_model(model, v)
    c = v.coords
    k = model.kind
    if k == "classical":
        return bool(np.all(c >= -tol))
    if k == "quantum":
        lam = hermitian_eigendecomposition(coords_to_herm(c, model.size)).eigenvalues
        return bool(lam[-1] >= -tol)
    if k == "ball":
        return bool(c[0] >= np.linalg.norm(c[1:]) - tol)
    if k == "gbit":
        a, b, s = c
        return bool(s >= -tol and -tol <= a <= s + tol and -tol <= b <= s + tol)
    if v.scale < -tol:
        return False
    if abs(v.scale) <= tol:
        return True
    return egg_contains_point(c[0], c[1], model.r, model.R, tol)


def is_normalized(model: StateSpaceModel, v: StateVector, tol: float = CONE_TOL) -> bool:
    return abs(order_unit_value(model, v) - 1.0) <= tol


def is_pure(model: StateSpaceModel, v: StateVector, tol: float = CONE_TOL) -> bool:
    """Pure normalised state test."""
    if not (is_normalized(model, v, tol) and contains_cone(model, v, tol)):
        return False
    if model.has_self_dual_inner_product:
        return abs(inner_product(model, v, v) - 1.0) <= 10 * tol
    if model.kind == "gbit":
        return any(np.max(np.abs(v.coords - w)) <= tol for w in GBIT_CORNERS)
    x, y = v.coords
    r, R = model.r, model.R
    if x >= 0:
        return abs(math.hypot(x, y) - r) <= tol * max(1.0, r)
    return abs(math.hypot(x / R, y / r) - 1.0) <= tol


GBIT_CORNERS = (
    np.array([1.0, 1.0, 1.0]),
    np.array([1.0, 0.0, 1.0]),
    np.array([0.0, 0.0, 1.0]),
    np.array([0.0, 1.0, 1.0]),
)


def gbit_corner(i: int) -> StateVector:
    """Corner ``w_i`` for ``i`` in 1..4."""
    return StateVector(gbit(), GBIT_CORNERS[i - 1])


def maximally_mixed(model: StateSpaceModel) -> StateVector:
    k = model.kind
    if k == "classical":
        return StateVector(model, np.full(model.size, 1.0 / model.size))
    if k == "quantum":
        return quantum_state(np.eye(model.size) / model.size)
    if k == "ball":
        c = np.zeros(model.ambient_dim)
        c[0] = 1.0
        return StateVector(model, c)
    if k == "gbit":
        return StateVector(model, np.array([0.5, 0.5, 1.0]))
    return StateVector(model, np.zeros(2))


def _check_model(model: StateSpaceModel, v: StateVector) -> None:
    if v.model != model:
        raise DomainError(f"state belongs to {v.model}, not {model}")


# ---------------------------------------------------------------- sampling

def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / SQRT2
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_unit_vector(d: int, rng: np.random.Generator) -> np.ndarray:
    while True:
        v = rng.normal(size=d)
        n = np.linalg.norm(v)
        if n > 1e-12:
            return v / n


def random_pure_state(model: StateSpaceModel, seed: Any = None) -> StateVector:
    rng = rng_from(seed)
    k = model.kind
    if k == "classical":
        c = np.zeros(model.size)
        c[rng.integers(model.size)] = 1.0
        return StateVector(model, c)
    if k == "quantum":
        d = model.size
        return ket_state(rng.normal(size=d) + 1j * rng.normal(size=d))
    if k == "ball":
        return StateVector(model, np.concatenate([[1.0], random_unit_vector(model.size, rng)]))
    if k == "gbit":
        return gbit_corner(int(rng.integers(4)) + 1)
    angle = rng.uniform(-math.pi / 2, math.pi / 2)
    if rng.random() < 0.5:
        return StateVector(model, egg_circle_point(angle, model.r))
    return StateVector(model, egg_ellipse_point(angle, model.r, model.R))


def random_state(model: StateSpaceModel, seed: Any = None) -> StateVector:
    """A generic normalised (typically mixed) state."""
    rng = rng_from(seed)
    k = model.kind
    if k == "classical":
        return StateVector(model, rng.dirichlet(np.ones(model.size)))
    if k == "quantum":
        d = model.size
        lam = rng.dirichlet(np.ones(d))
        u = random_unitary(d, rng)
        return quantum_state((u * lam) @ u.conj().T)
    if k == "ball":
        d = model.size
        radius = rng.random() ** (1.0 / d)
        return StateVector(model, np.concatenate([[1.0], radius * random_unit_vector(d, rng)]))
    if k == "gbit":
        return StateVector(model, np.array([rng.random(), rng.random(), 1.0]))
    r, R = model.r, model.R
    while True:
        x, y = rng.uniform(-R, r), rng.uniform(-r, r)
        if egg_contains_point(x, y, r, R, 0.0):
            return StateVector(model, np.array([x, y]))


def random_cone_element(model: StateSpaceModel, seed: Any = None) -> StateVector:
    rng = rng_from(seed)
    s = random_state(model, rng) if rng.random() < 0.7 else random_pure_state(model, rng)
    t = float(rng.exponential())
    return state_from_homogeneous(model, t * s.homogeneous())


# ---------------------------------------------------------------- embedding

@dataclass(frozen=True)
class ProbabilityEmbedding:
    """Invertible linear map ``L`` on homogeneous coordinates plus the pulled-back unit."""

    matrix: np.ndarray
    order_unit: np.ndarray
    description: dict = field(default_factory=dict)

    def apply(self, v: StateVector) -> np.ndarray:
        return self.matrix @ v.homogeneous()


def probability_embedding(model: StateSpaceModel) -> tuple[np.ndarray, ProbabilityEmbedding]:
    """Linear change of coordinates under which every normalised state has entries in ``[0, 1]``.

    Each coordinate ``x`` bounded by ``|x| <= c * u_A`` is replaced by
    ``(x + c * u_A) / (2c)``; coordinates already in ``[0, 1]`` are kept.
    """
    k = model.kind
    n = model.functional_dim
    u = order_unit_functional(model)
    if k in ("classical", "gbit"):
        L = np.eye(n)
        u_b = u.copy()
    elif k == "ball":
        L = np.zeros((n, n))
        L[0, 0] = 1.0
        L[1:, 0] = 0.5
        L[1:, 1:] = 0.5 * np.eye(n - 1)
        u_b = np.zeros(n)
        u_b[0] = 1.0
    elif k == "quantum":
        d = model.size
        L = np.eye(n)
        bound = 1.0 / SQRT2  # |sqrt2 * rho_jk| <= sqrt2 / 2 for density matrices
        for i in range(d, n):
            L[i, :] = 0.0
            L[i, i] = 1.0 / (2 * bound)
            L[i, :d] += 0.5
        u_b = np.zeros(n)
        u_b[:d] = 1.0
    else:
        r, R = model.r, model.R
        L = np.array([[1.0 / (r + R), 0.0, R / (r + R)], [0.0, 1.0 / (2 * r), 0.5], [0.0, 0.0, 1.0]])
        u_b = np.array([0.0, 0.0, 1.0])
    emb = ProbabilityEmbedding(L, u_b, {"source": model.descriptor(), "order_unit": u_b.tolist()})
    return L, emb
