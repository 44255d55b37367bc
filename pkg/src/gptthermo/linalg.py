"""Dense real linear algebra: Jacobi eigensolver, projectors, bisection.

Nothing in here knows about state spaces.  Complex Hermitian matrices are
handled through their real embedding ``[[X, -Y], [Y, X]]`` so that a single
real symmetric solver serves every model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import LinalgError

DEFAULT_TOL = 1e-10
MAX_SWEEPS = 100


@dataclass(frozen=True)
class SpectralData:
    """Eigenvalues in descending order and matching orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def _as_square(m, name: str = "matrix") -> np.ndarray:
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise LinalgError(f"{name} must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise LinalgError(f"{name} has non-finite entries")
    return a


def off_diagonal_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.sqrt(np.sum(off * off)))


@lru_cache(maxsize=64)
def round_robin_pairs(n: int) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
    """Circle-method schedule: rounds of disjoint index pairs covering every pair once."""
    idx = list(range(n)) + ([-1] if n % 2 else [])
    m = len(idx)
    rounds = []
    for _ in range(m - 1):
        pairs = [(idx[i], idx[m - 1 - i]) for i in range(m // 2)]
        pairs = [(min(a, b), max(a, b)) for a, b in pairs if a >= 0 and b >= 0]
        rounds.append((np.array([a for a, _ in pairs]), np.array([b for _, b in pairs])))
        idx = [idx[0], idx[-1], *idx[1:-1]]
    return tuple(rounds)


@lru_cache(maxsize=64)
def _flat_schedule(n: int) -> tuple[tuple[np.ndarray, ...], ...]:
    """Flat offsets of the (p,p), (q,q), (p,q), (q,p) entries for each round."""
    return tuple((p * n + p, q * n + q, p * n + q, q * n + p) for p, q in round_robin_pairs(n))


def symmetric_eigendecomposition(m, tol: float = DEFAULT_TOL) -> SpectralData:
    """Cyclic Jacobi eigendecomposition of a real symmetric matrix.

    Each sweep visits every (p, q) pair once in round-robin order; the
    rotations of one round act on disjoint planes and are applied together.
    Sweeps stop once the off-diagonal Frobenius norm drops below ``tol``
    (raised to the attainable floating-point floor for badly scaled input).
    """
    a = _as_square(m).copy()
    n = a.shape[0]
    if np.max(np.abs(a - a.T), initial=0.0) > tol * max(1.0, np.max(np.abs(a), initial=0.0)):
        raise LinalgError("matrix is not symmetric within tolerance")
    a = 0.5 * (a + a.T)
    v = np.eye(n)
    target = max(tol, 1e-15 * n * float(np.linalg.norm(a)))
    schedule = _flat_schedule(n) if n > 1 else ()
    eye_flat = np.eye(n).ravel()
    for _ in range(MAX_SWEEPS):
        if off_diagonal_norm(a) < target:
            break
        for pp, qq, pq, qp in schedule:
            flat = a.ravel()
            apq = flat[pq]
            if not apq.any():
                continue
            diff = flat[qq] - flat[pp]
            # |theta| <= pi/4 with tan(2 theta) = 2 a_pq / (a_qq - a_pp); division-free
            theta = 0.5 * np.arctan2(2.0 * apq * np.where(diff < 0, -1.0, 1.0), np.abs(diff))
            c = np.cos(theta)
            s = np.sin(theta)
            # J = identity except J[p,p] = J[q,q] = c, J[p,q] = s, J[q,p] = -s; A <- J^T A J
            j = eye_flat.copy()
            j[pp] = c
            j[qq] = c
            j[pq] = s
            j[qp] = -s
            j = j.reshape(n, n)
            a = j.T @ a @ j
            a.ravel()[pq] = 0.0
            a.ravel()[qp] = 0.0
            v = v @ j
    else:
        if off_diagonal_norm(a) >= target:
            raise LinalgError("Jacobi iteration did not converge")
    vals = np.diag(a).copy()
    order = np.argsort(-vals, kind="stable")
    return SpectralData(vals[order], v[:, order])


def real_embedding(h) -> np.ndarray:
    """Real symmetric 2d x 2d matrix ``[[X, -Y], [Y, X]]`` for Hermitian ``X + iY``."""
    h = np.asarray(h, dtype=complex)
    x, y = h.real, h.imag
    return np.block([[x, -y], [y, x]])


def cluster_indices(values: Sequence[float], gap: float) -> list[list[int]]:
    """Group indices of a descending sequence whose consecutive gaps are below ``gap``."""
    groups: list[list[int]] = []
    for i, val in enumerate(values):
        if groups and abs(values[groups[-1][-1]] - val) < gap:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def complex_gram_schmidt(cands: np.ndarray, k: int) -> np.ndarray:
    """Pick ``k`` orthonormal complex vectors from the columns of ``cands`` by pivoted Gram-Schmidt."""
    work = np.array(cands, dtype=complex)
    out = []
    for _ in range(k):
        norms = np.linalg.norm(work, axis=0)
        j = int(np.argmax(norms))
        if norms[j] < 1e-6:
            raise LinalgError("degenerate eigenspace could not be resolved")
        q = work[:, j] / norms[j]
        out.append(q)
        work = work - np.outer(q, q.conj() @ work)
    return np.array(out).T


def hermitian_eigendecomposition(h, tol: float = DEFAULT_TOL, pair_tol: float = 1e-9) -> SpectralData:
    """Eigendecomposition of a complex Hermitian matrix via its real embedding.

    The embedding has each eigenvalue twice; pairs closer than ``pair_tol``
    (plus any genuinely degenerate neighbours) are grouped, and complex
    eigenvectors are recovered as ``u + i v`` followed by Gram-Schmidt.
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise LinalgError(f"matrix must be square, got shape {h.shape}")
    d = h.shape[0]
    if np.max(np.abs(h - h.conj().T), initial=0.0) > tol * max(1.0, np.max(np.abs(h), initial=0.0)):
        raise LinalgError("matrix is not Hermitian within tolerance")
    spec = symmetric_eigendecomposition(real_embedding(h), tol)
    vals, vecs = spec.eigenvalues, spec.eigenvectors
    out_vecs = []
    gap = max(pair_tol, 10 * tol)
    for group in cluster_indices(vals, gap):
        if len(group) % 2:
            raise LinalgError("real embedding eigenvalues failed to pair")
        cands = vecs[:d, group] + 1j * vecs[d:, group]
        out_vecs.append(complex_gram_schmidt(cands, len(group) // 2))
    u = np.hstack(out_vecs)
    # Rayleigh quotients are more accurate than averaging the paired values.
    lam = np.real(np.einsum("ij,ik,kj->j", u.conj(), h, u))
    order = np.argsort(-lam, kind="stable")
    return SpectralData(lam[order], u[:, order])


def projector_onto_span(vectors: Sequence, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthogonal projector onto the span of ``vectors`` (dependent vectors are dropped)."""
    vs = [np.asarray(v, dtype=float).ravel() for v in vectors]
    if not vs:
        raise LinalgError("need at least one vector")
    n = vs[0].size
    basis: list[np.ndarray] = []
    for v in vs:
        if v.size != n:
            raise LinalgError("vectors have inconsistent dimensions")
        scale = float(np.linalg.norm(v))
        if scale == 0.0:
            raise LinalgError("zero vector in span request")
        w = v.copy()
        for _ in range(2):  # re-orthogonalise once for stability
            for b in basis:
                w -= (b @ w) * b
        nw = float(np.linalg.norm(w))
        if nw > max(tol, 1e-12) * scale * 1e3:
            basis.append(w / nw)
    q = np.array(basis).T
    return q @ q.T


def bisection_root(f: Callable[[float], float], a: float, b: float, tol: float = DEFAULT_TOL) -> float:
    """Bisection on ``[a, b]``; stops when ``|f(x)| <= tol`` or the bracket is narrower than ``tol``."""
    fa, fb = f(a), f(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if fa * fb > 0:
        raise LinalgError(f"f(a) and f(b) have the same sign: f({a})={fa}, f({b})={fb}")
    lo, hi, flo = a, b, fa
    max_iter = math.ceil(math.log2(max(abs(b - a), tol) / tol)) + 2
    mid = 0.5 * (lo + hi)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if abs(fm) <= tol or abs(hi - lo) <= tol:
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return mid
