"""Spectral, Renyi, relative, measurement and decomposition entropies.

Thermodynamic quantities use natural logarithms; the information-theoretic
family (Renyi, measurement and decomposition entropies) defaults to base 2.
Every report states its base.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .decomposition import (
    CLUSTER_GAP,
    EIG_TOL,
    ClassicalDecomposition,
    classical_decomposition,
    is_frame,
)
from .errors import DecompositionError, DomainError, InvalidMeasurementError
from .linalg import cluster_indices, hermitian_eigendecomposition
from .measurements import Effect, Measurement, distinguishing_measurement
from .models import (
    GBIT_CORNERS,
    StateSpaceModel,
    StateVector,
    combine,
    egg_contains_point,
    egg_support,
    inner_product,
    is_normalized,
    ket_state,
    order_unit_functional,
    random_pure_state,
    rng_from,
)

ZERO_WEIGHT = 1e-12
KERNEL_TOL = 1e-10


def _log_fn(base):
    if base in ("e", None):
        return np.log
    if base in (2, "2"):
        return np.log2
    raise DomainError(f"unsupported log base {base!r}")


def _base_label(base) -> str:
    return "e" if base in ("e", None) else "2"


# ---------------------------------------------------------------- probability vectors

def shannon(p: Sequence[float], base="e") -> float:
    """``-sum p log p`` with ``0 log 0 = 0``."""
    q = np.asarray(p, dtype=float)
    q = q[q > 0]
    return float(-np.sum(q * _log_fn(base)(q))) + 0.0


def renyi(p: Sequence[float], alpha: float, base=2) -> float:
    """Order-``alpha`` Renyi entropy of a probability vector (``alpha`` in ``[0, inf]``)."""
    return float(renyi_batch(np.asarray(p, dtype=float)[None, :], alpha, base)[0])


def renyi_batch(P: np.ndarray, alpha: float, base=2) -> np.ndarray:
    """Row-wise Renyi entropies of a batch of probability vectors."""
    if alpha < 0:
        raise DomainError("Renyi order must be nonnegative")
    log = _log_fn(base)
    P = np.where(P > ZERO_WEIGHT, P, 0.0)  # same support cut for every order
    if alpha == 0:
        out = log(np.sum(P > 0, axis=1).astype(float))
    elif alpha == 1:
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.where(P > 0, P * log(np.where(P > 0, P, 1.0)), 0.0)
        out = -np.sum(terms, axis=1)
    elif math.isinf(alpha):
        out = -log(np.max(P, axis=1))
    else:
        out = log(np.sum(P**alpha, axis=1)) / (1.0 - alpha)
    return out + 0.0


# ---------------------------------------------------------------- reports

@dataclass(frozen=True, eq=False)
class EntropyReport:
    value: float
    base: str = "e"
    method: str = "spectral"
    witness: Any = None
    alpha: float = 1.0
    infinite: bool = False

    def to_dict(self) -> dict:
        out: dict = {"value": self.value, "base": self.base, "method": self.method, "alpha": _alpha_json(self.alpha)}
        w = self.witness
        if isinstance(w, Measurement):
            out["witness"] = {"kind": "measurement", **w.to_dict()}
        elif isinstance(w, (ClassicalDecomposition, PureDecomposition)):
            states = w.frame.states if isinstance(w, ClassicalDecomposition) else w.states
            out["witness"] = {
                "kind": "decomposition",
                "weights": [float(x) for x in w.weights],
                "states": [[float(x) for x in s.coords] for s in states],
            }
        return out


def _alpha_json(alpha: float):
    return "inf" if math.isinf(alpha) else alpha


@dataclass(frozen=True, eq=False)
class PureDecomposition:
    """Convex decomposition into pure states (not necessarily distinguishable)."""

    weights: np.ndarray
    states: tuple

    def reconstruct(self) -> StateVector:
        return combine(self.states[0].model, self.weights, self.states)


def spectral_entropy(
    model: StateSpaceModel,
    w: StateVector,
    base="e",
    decomposition: ClassicalDecomposition | None = None,
) -> EntropyReport:
    """``-sum p_j log p_j`` over the weights of a classical decomposition of ``w``."""
    if model.kind == "egg":
        raise DomainError("entropy not well-defined in this model")
    dec = decomposition if decomposition is not None else classical_decomposition(model, w)
    return EntropyReport(shannon(dec.weights, base), _base_label(base), "spectral", dec, 1.0)


def renyi_entropy(model: StateSpaceModel, w: StateVector, alpha: float, base=2) -> EntropyReport:
    if model.kind == "egg":
        raise DomainError("entropy not well-defined in this model")
    dec = classical_decomposition(model, w)
    return EntropyReport(renyi(dec.weights, alpha, base), _base_label(base), "spectral", dec, alpha)


# ---------------------------------------------------------------- measurement entropy search

def _haar_batch(n: int, d: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.normal(size=(n, d, d)) + 1j * rng.normal(size=(n, d, d))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=1, axis2=2)
    return q * (diag / np.abs(diag))[:, None, :]


def _unit_batch(n: int, d: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=(n, d))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def _frame_batch(model: StateSpaceModel, w: StateVector, n: int, rng: np.random.Generator):
    """Outcome distributions of ``n`` random maximal-frame measurements plus their parameters."""
    k = model.kind
    if k == "quantum":
        u = _haar_batch(n, model.size, rng)
        rho = w.matrix()
        probs = np.real(np.einsum("bij,ik,bkj->bj", u.conj(), rho, u))
        return probs, u
    if k == "ball":
        nv = _unit_batch(n, model.size, rng)
        x = nv @ w.coords[1:]
        return np.stack([(1 + x) / 2, (1 - x) / 2], axis=1), nv
    perms = np.array([rng.permutation(model.size) for _ in range(n)])
    return w.coords[perms], perms


def _frame_effects(model: StateSpaceModel, param) -> list[np.ndarray]:
    """Effects ``<w_j, .>`` of the frame encoded by ``param`` (inverse of ``_frame_batch``)."""
    k = model.kind
    if k == "quantum":
        return [ket_state(param[:, j]).coords for j in range(model.size)]
    if k == "ball":
        return [0.5 * np.concatenate([[1.0], s * param]) for s in (1, -1)]
    return [np.eye(model.size)[j] for j in param]


def _tangent_pair_effects(model: StateSpaceModel, theta: np.ndarray):
    """Egg: effects from pairs of parallel supporting lines with normal angle ``theta``."""
    n = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    hmax = np.array([egg_support(v, model.r, model.R) for v in n])
    hmin = -np.array([egg_support(-v, model.r, model.R) for v in n])
    e1 = np.concatenate([n, -hmin[:, None]], axis=1) / (hmax - hmin)[:, None]
    return e1


def measurement_entropy_search(
    model: StateSpaceModel, w: StateVector, alpha: float = 1.0, budget: int = 10_000, seed: Any = 0, base=2
) -> EntropyReport:
    """Minimum outcome entropy over sampled fine-grained measurements.

    Self-dual models sample mixtures of one to three random maximal-frame
    measurements ``{lambda_k c <w_kj, .>}``, half of them further split into
    proportional sub-effects.  The gbit uses the extremal-effect family
    ``{l a, l (c-a), (1-l) b, (1-l) (c-b)}`` and the egg mixtures of
    parallel-tangent pairs.  The eigenframe measurement is always evaluated.
    Reports the minimum found, not a proven infimum.
    """
    rng = rng_from(seed)
    if not is_normalized(model, w):
        raise DomainError("measurement entropy needs a normalised state")
    best_val, best_meas = math.inf, None

    def consider(val: float, build) -> None:
        nonlocal best_val, best_meas
        if val < best_val - 1e-12:
            best_val, best_meas = val, build

    try:
        dec = classical_decomposition(model, w)
        frame = dec.frame
        if frame.is_maximal or frame.effects is not None:
            meas = distinguishing_measurement(model, frame)
            consider(renyi(meas.probabilities(w), alpha, base), lambda m=meas: m)
    except (DecompositionError, DomainError, InvalidMeasurementError):
        pass

    n = max(int(budget), 0)
    if n and model.has_self_dual_inner_product:
        n_frames = rng.integers(1, 4, size=n)
        lam = np.zeros((n, 3))
        for kk in (1, 2, 3):
            idx = np.flatnonzero(n_frames == kk)
            lam[idx, :kk] = rng.dirichlet(np.ones(kk), size=idx.size)
        probs, params = [], []
        for j in range(3):
            p, par = _frame_batch(model, w, n, rng)
            probs.append(p * lam[:, j : j + 1])
            params.append(par)
        P = np.concatenate(probs, axis=1)
        split = rng.random(size=P.shape)
        refine = rng.random(n) < 0.5
        split[~refine] = 1.0
        P_full = np.concatenate([P * split, P * (1 - split)], axis=1)
        vals = renyi_batch(P_full, alpha, base)
        i = int(np.argmin(vals))

        def build(i=i) -> Measurement:
            effects = []
            for j in range(3):
                if lam[i, j] == 0:
                    continue
                for m, e in enumerate(_frame_effects(model, params[j][i])):
                    c = split[i, j * P.shape[1] // 3 + m]
                    for frac in (c, 1 - c):
                        if frac > 0:
                            effects.append(Effect(lam[i, j] * frac * np.asarray(e), ""))
            return Measurement(model, tuple(Effect(e.coords, f"e{t + 1}") for t, e in enumerate(effects)))

        consider(float(vals[i]), build)
    elif n and model.kind == "gbit":
        a, b, _ = w.coords
        lam = np.concatenate([[0.0, 1.0], rng.random(n)])
        P = np.stack([lam * a, lam * (1 - a), (1 - lam) * b, (1 - lam) * (1 - b)], axis=1)
        vals = renyi_batch(P, alpha, base)
        i = int(np.argmin(vals))
        effs = [np.array([1.0, 0, 0]), np.array([-1.0, 0, 1]), np.array([0, 1.0, 0]), np.array([0, -1.0, 1])]
        weights = [lam[i], lam[i], 1 - lam[i], 1 - lam[i]]
        consider(
            float(vals[i]),
            lambda: Measurement(
                model,
                tuple(Effect(c * e, lab) for c, e, lab in zip(weights, effs, ("a", "c-a", "b", "c-b")) if c > 0),
            ),
        )
    elif n and model.kind == "egg":
        h = w.homogeneous()
        n_frames = rng.integers(1, 3, size=n)
        theta = rng.uniform(0, 2 * math.pi, size=(n, 2))
        mix = np.where(n_frames == 1, 1.0, rng.random(n))
        e_a = _tangent_pair_effects(model, theta[:, 0])
        e_b = _tangent_pair_effects(model, theta[:, 1])
        pa, pb = e_a @ h, e_b @ h
        P = np.stack([mix * pa, mix * (1 - pa), (1 - mix) * pb, (1 - mix) * (1 - pb)], axis=1)
        vals = renyi_batch(P, alpha, base)
        i = int(np.argmin(vals))
        u = order_unit_functional(model)

        def build_egg(i=i) -> Measurement:
            parts = [mix[i] * e_a[i], mix[i] * (u - e_a[i]), (1 - mix[i]) * e_b[i], (1 - mix[i]) * (u - e_b[i])]
            return Measurement(model, tuple(Effect(e, f"e{t + 1}") for t, e in enumerate(parts) if np.any(e)))

        consider(float(vals[i]), build_egg)
    witness = best_meas() if best_meas is not None else None
    return EntropyReport(float(best_val), _base_label(base), "measurement-search", witness, alpha)


# ---------------------------------------------------------------- decomposition entropy search

def random_pure_decomposition(
    model: StateSpaceModel, w: StateVector, rng: Any = None, size: int | None = None, spectrum=None
) -> PureDecomposition:
    """A random convex decomposition of ``w`` into pure states.

    ``spectrum`` may carry a precomputed eigendecomposition of a quantum ``w``.
    """
    rng = rng_from(rng)
    k = model.kind
    if k == "classical":
        p = w.coords
        supp = np.flatnonzero(p > ZERO_WEIGHT)
        m = size if size is not None else int(rng.integers(supp.size, supp.size + 3))
        m = max(m, supp.size)
        owners = np.concatenate([supp, rng.choice(supp, size=m - supp.size)])
        weights = np.zeros(m)
        for j in supp:
            idx = np.flatnonzero(owners == j)
            weights[idx] = p[j] * rng.dirichlet(np.ones(idx.size))
        states = tuple(StateVector(model, np.eye(model.size)[j]) for j in owners)
        return PureDecomposition(weights, states)
    if k == "quantum":
        d = model.size
        spec = spectrum if spectrum is not None else hermitian_eigendecomposition(w.matrix(), EIG_TOL)
        lam = np.clip(spec.eigenvalues, 0.0, None)
        rank = int(np.sum(lam > ZERO_WEIGHT))
        vecs = spec.eigenvectors[:, :rank] * np.sqrt(lam[:rank])
        m = size if size is not None else int(rng.integers(max(rank, 1), d + 3))
        m = max(m, rank)
        z = rng.normal(size=(m, rank)) + 1j * rng.normal(size=(m, rank))
        iso, _ = np.linalg.qr(z)  # m x rank, orthonormal columns
        phis = vecs @ iso.T  # column j = sum_k iso[j, k] sqrt(lam_k) |k>
        q = np.sum(np.abs(phis) ** 2, axis=0)
        keep = q > 1e-15
        states = tuple(ket_state(phis[:, j]) for j in np.flatnonzero(keep))
        q = q[keep]
        return PureDecomposition(q / q.sum(), states)
    if k == "gbit":
        a, b, _ = w.coords
        lo, hi = max(0.0, a + b - 1.0), min(a, b)
        u = rng.random()
        t = lo if u < 0.125 else hi if u < 0.25 else rng.uniform(lo, hi)
        q = np.array([t, a - t, 1 - a - b + t, b - t])
        q = np.clip(q, 0.0, None)
        keep = q > ZERO_WEIGHT
        states = tuple(StateVector(model, c) for c, kp in zip(GBIT_CORNERS, keep) if kp)
        return PureDecomposition(q[keep] / q[keep].sum(), states)
    return _ray_exit_decomposition(model, w, rng, size)


def _ray_exit_decomposition(model, w, rng, size) -> PureDecomposition:
    """Ball/egg: ``m-1`` random pure points, the last found where the ray from their mean through ``w`` exits."""
    m = size if size is not None else int(rng.integers(2, model.max_frame_size + 3))
    x0 = w.coords[1:] if model.kind == "ball" else w.coords
    for _ in range(100):
        pts = [
            (s.coords[1:] if model.kind == "ball" else s.coords)
            for s in (random_pure_state(model, rng) for _ in range(m - 1))
        ]
        s_w = rng.dirichlet(np.ones(m - 1))
        mean = np.sum([c * p for c, p in zip(s_w, pts)], axis=0)
        d = x0 - mean
        dd = float(d @ d)
        if dd < 1e-14:
            continue
        if model.kind == "ball":
            rd = float(x0 @ d)
            disc = rd * rd - dd * (float(x0 @ x0) - 1.0)
            s = (-rd + math.sqrt(max(disc, 0.0))) / dd
            exit_pt = x0 + s * d
            exit_pt = exit_pt / np.linalg.norm(exit_pt)
        else:
            r, R = model.r, model.R
            lo, hi = 0.0, 1.0
            while egg_contains_point(*(x0 + hi * d), r, R, 0.0):
                hi *= 2
            for _ in range(80):
                mid = 0.5 * (lo + hi)
                if egg_contains_point(*(x0 + mid * d), r, R, 0.0):
                    lo = mid
                else:
                    hi = mid
            s = lo
            exit_pt = x0 + s * d
        weights = np.concatenate([s_w * s / (1 + s), [1.0 / (1 + s)]])
        coords = pts + [exit_pt]
        if model.kind == "ball":
            coords = [np.concatenate([[1.0], c]) for c in coords]
        return PureDecomposition(weights, tuple(StateVector(model, c) for c in coords))
    raise DomainError("could not sample a decomposition")


def decomposition_entropy_search(
    model: StateSpaceModel, w: StateVector, alpha: float = 1.0, budget: int = 10_000, seed: Any = 0, base=2
) -> EntropyReport:
    """Minimum Renyi entropy of weights over sampled pure decompositions of ``w``.

    Random restarts draw decompositions of sizes 2 to ``max_frame_size + 2``;
    each restart is refined by merging or dropping zero weights.  The
    classical decomposition is always included when it exists.  Reports the
    minimum found.
    """
    rng = rng_from(seed)
    if not is_normalized(model, w):
        raise DomainError("decomposition entropy needs a normalised state")
    best_val, best = math.inf, None
    try:
        dec = classical_decomposition(model, w)
        keep = dec.weights > ZERO_WEIGHT
        best = PureDecomposition(dec.weights[keep], tuple(s for s, k in zip(dec.frame.states, keep) if k))
        best_val = renyi(best.weights, alpha, base)
    except (DecompositionError, DomainError):
        pass
    spec = hermitian_eigendecomposition(w.matrix(), EIG_TOL) if model.kind == "quantum" else None
    for _ in range(int(budget)):
        cand = _refine(random_pure_decomposition(model, w, rng, spectrum=spec))
        val = renyi(cand.weights, alpha, base)
        if val < best_val - 1e-12:
            best_val, best = val, cand
    return EntropyReport(float(best_val), _base_label(base), "decomposition-search", best, alpha)


def _refine(dec: PureDecomposition, tol: float = 1e-9) -> PureDecomposition:
    """Merge weights of coinciding pure states and drop zeros (never increases any Renyi entropy)."""
    merged_w: list[float] = []
    merged_s: list[StateVector] = []
    for p, s in zip(dec.weights, dec.states):
        if p <= ZERO_WEIGHT:
            continue
        for i, t in enumerate(merged_s):
            if np.max(np.abs(t.coords - s.coords)) <= tol:
                merged_w[i] += float(p)
                break
        else:
            merged_w.append(float(p))
            merged_s.append(s)
    return PureDecomposition(np.array(merged_w), tuple(merged_s))


# ---------------------------------------------------------------- log state, relative entropy

@dataclass(frozen=True, eq=False)
class LogState:
    """``sum_x ln(p_x) u_x`` over the nonzero spectral clusters; ``kernel_unit`` spans the zero cluster."""

    vector: np.ndarray
    kernel_unit: np.ndarray | None
    cluster_weights: tuple = field(default_factory=tuple)
    cluster_units: tuple = field(default_factory=tuple)


def log_state(model: StateSpaceModel, w: StateVector) -> LogState:
    model.require_self_dual()
    dec = classical_decomposition(model, w)
    order = np.argsort(-dec.weights, kind="stable")
    p = dec.weights[order]
    states = [dec.frame.states[i] for i in order]
    vec = np.zeros(model.ambient_dim)
    kernel = None
    weights, units = [], []
    for group in cluster_indices(list(p), CLUSTER_GAP):
        unit = np.sum([states[i].coords for i in group], axis=0)
        px = float(np.mean(p[group]))
        if px <= ZERO_WEIGHT:
            kernel = unit if kernel is None else kernel + unit
            continue
        vec += math.log(px) * unit
        weights.append(px)
        units.append(unit)
    return LogState(vec, kernel, tuple(weights), tuple(units))


@dataclass(frozen=True)
class RelativeEntropy:
    value: float
    infinite: bool = False


def relative_entropy(model: StateSpaceModel, w: StateVector, v: StateVector) -> RelativeEntropy:
    """``S(w || v) = -S(w) - <w, ln v>`` in nats; infinite when ``w`` overlaps the kernel of ``v``."""
    model.require_self_dual()
    lv = log_state(model, v)
    if lv.kernel_unit is not None and model.metric * float(w.coords @ lv.kernel_unit) > KERNEL_TOL:
        return RelativeEntropy(math.inf, True)
    s_w = spectral_entropy(model, w).value
    return RelativeEntropy(-s_w - model.metric * float(w.coords @ lv.vector))


# ---------------------------------------------------------------- mixtures

def perfectly_distinguishable(model: StateSpaceModel, states: Sequence[StateVector], tol: float = 1e-9) -> bool:
    """Whether normalised ``states`` can be told apart with certainty by one measurement."""
    if len(states) <= 1:
        return True
    if model.has_self_dual_inner_product:
        return all(abs(inner_product(model, a, b)) <= tol for a, b in itertools.combinations(states, 2))
    if len(states) > 2:
        return False
    a, b = states
    if model.kind == "gbit":
        from .decomposition import GBIT_EDGE_EFFECTS

        return any(abs(e @ a.coords - 1) <= tol and abs(e @ b.coords) <= tol for e in GBIT_EDGE_EFFECTS)
    return is_frame(model, states)


def orthogonal_mixture_relation(
    model: StateSpaceModel, weights: Sequence[float], components: Sequence[StateVector]
) -> tuple[float, float, bool]:
    """``S(sum l_j w_j)`` versus ``sum l_j S(w_j) + H(l)`` for distinguishable components (nats)."""
    lam = np.asarray(weights, dtype=float)
    if np.any(lam < 0) or abs(lam.sum() - 1) > 1e-9 or lam.size != len(components):
        raise DomainError("weights must be a probability vector matching the components")
    if not perfectly_distinguishable(model, components):
        raise DomainError("components are not perfectly distinguishable")
    mix = combine(model, lam, components)
    lhs = spectral_entropy(model, mix).value
    rhs = float(sum(l * spectral_entropy(model, c).value for l, c in zip(lam, components))) + shannon(lam)
    return lhs, rhs, abs(lhs - rhs) <= 1e-8


def gbit_entropy_inconsistency(a: float) -> float:
    """Entropy assigned to the gbit centre by mixing the edge states ``v_a``, ``v'_a`` (nats)."""
    if not 0.0 <= a <= 1.0:
        raise DomainError("a must lie in [0, 1]")
    return shannon([a, 1.0 - a]) + math.log(2.0)


def gbit_edge_states(a: float) -> tuple[StateVector, StateVector]:
    """``v_a = a w1 + (1-a) w2`` and ``v'_a = a w3 + (1-a) w4``; their even mixture is the centre."""
    from .models import gbit, gbit_corner

    g = gbit()
    v = combine(g, [a, 1 - a], [gbit_corner(1), gbit_corner(2)])
    vp = combine(g, [a, 1 - a], [gbit_corner(3), gbit_corner(4)])
    return v, vp


def entropy_sweep(
    model: StateSpaceModel,
    w: StateVector,
    alphas: Sequence[float],
    methods: Sequence[str] = ("spectral", "measurement", "decomposition"),
    budget: int = 2000,
    seed: Any = 0,
) -> list[dict]:
    """Rows ``alpha, value, method`` (bits)."""
    rows = []
    for a in alphas:
        for m in methods:
            if m == "spectral":
                rep = renyi_entropy(model, w, a)
            elif m == "measurement":
                rep = measurement_entropy_search(model, w, a, budget, seed)
            else:
                rep = decomposition_entropy_search(model, w, a, budget, seed)
            rows.append({"alpha": _alpha_json(a), "value": rep.value, "method": rep.method})
    return rows
