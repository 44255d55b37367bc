"""Egg state space: tangent-line decomposition and the non-uniqueness witness.

The egg is the half-disc ``x >= 0, x^2 + y^2 <= r^2`` glued to the half-ellipse
``x <= 0, (x/R)^2 + (y/r)^2 <= 1``.  For every circle angle ``alpha`` the
tangent at ``p1 = (r cos a, r sin a)`` is parallel to the tangent at the
ellipse point ``p2 = (-R cos b, r sin b)`` with ``b = beta(alpha)``; the chord
``l_alpha`` joins them.  A point ``w`` lies on ``l_alpha`` iff ``g_w(alpha) = 0``.
"""

from __future__ import annotations

import math

import numpy as np

from .decomposition import ClassicalDecomposition, Frame
from .errors import DomainError
from .linalg import bisection_root
from .models import (
    StateVector,
    egg,
    egg_circle_point,
    egg_contains_point,
    egg_ellipse_point,
    egg_half_height,
)

SCAN_SAMPLES = 720
HALF_PI = math.pi / 2


def egg_beta(alpha, r: float, R: float):
    """Ellipse angle matching circle angle ``alpha``; continuous with ``beta(0) = 0``.

    Equals ``arccot(-(R/r) cot alpha)`` on the branch with values in ``[-pi/2, pi/2]``.
    """
    a = np.asarray(alpha, dtype=float)
    with np.errstate(over="ignore", invalid="ignore"):
        b = np.arctan(-(r / R) * np.tan(a))
    b = np.where(a >= HALF_PI, -HALF_PI, np.where(a <= -HALF_PI, HALF_PI, b))
    return float(b) if b.ndim == 0 else b


def _chord(alpha, r: float, R: float):
    """Offset ``a``, direction ``t`` and normal ``n`` of the chord ``l_alpha``."""
    al = np.asarray(alpha, dtype=float)
    be = np.asarray(egg_beta(al, r, R))
    ca, sa, cb, sb = np.cos(al), np.sin(al), np.cos(be), np.sin(be)
    a = np.stack([-R * cb, r * sb], axis=-1)
    t = np.stack([r * ca + R * cb, r * sa - r * sb], axis=-1)
    n = np.stack([-r * sa + r * sb, r * ca + R * cb], axis=-1)
    return a, t, n


def egg_g(w, alpha, r: float, R: float):
    """``g_w(alpha) = (w - a_alpha) . n_alpha``; vectorised over ``alpha``."""
    a, _, n = _chord(alpha, r, R)
    val = np.sum((np.asarray(w, dtype=float) - a) * n, axis=-1)
    return float(val) if np.ndim(val) == 0 else val


def _g_scalar(wx: float, wy: float, alpha: float, r: float, R: float) -> float:
    if alpha >= HALF_PI:
        be = -HALF_PI
    elif alpha <= -HALF_PI:
        be = HALF_PI
    else:
        be = math.atan(-(r / R) * math.tan(alpha))
    ca, sa, cb, sb = math.cos(alpha), math.sin(alpha), math.cos(be), math.sin(be)
    return (wx + R * cb) * (-r * sa + r * sb) + (wy - r * sb) * (r * ca + R * cb)


def egg_outward_normal(point, r: float, R: float) -> np.ndarray:
    """Unit outward normal at a boundary point."""
    x, y = float(point[0]), float(point[1])
    if x >= 0:
        v = np.array([x, y])
    else:
        v = np.array([x / (R * R), y / (r * r)])
    return v / np.linalg.norm(v)


def egg_pair_effects(p1, p2, r: float, R: float) -> tuple[np.ndarray, np.ndarray]:
    """Effects from the two parallel tangent lines through ``p1`` and ``p2``.

    Returns homogeneous functionals ``e1, e2`` with ``e1(p1) = 1``,
    ``e1(p2) = 0`` and ``e1 + e2 = u``.
    """
    nrm = egg_outward_normal(p1, r, R)
    h1, h2 = float(nrm @ p1), float(nrm @ p2)
    e1 = np.array([nrm[0], nrm[1], -h2]) / (h1 - h2)
    return e1, np.array([0.0, 0.0, 1.0]) - e1


def _decomposition_at(w: np.ndarray, alpha: float, r: float, R: float) -> ClassicalDecomposition:
    a, t, _ = _chord(alpha, r, R)
    p = float((w - a) @ t / (t @ t))
    p = min(max(p, 0.0), 1.0)
    p1 = egg_circle_point(alpha, r)
    p2 = egg_ellipse_point(egg_beta(alpha, r, R), r, R)
    model = egg(r, R)
    s1, s2 = StateVector(model, p1), StateVector(model, p2)
    frame = Frame(model, (s1, s2), egg_pair_effects(p1, p2, r, R))
    residual = float(np.linalg.norm(p * p1 + (1 - p) * p2 - w))
    return ClassicalDecomposition(np.array([p, 1.0 - p]), frame, {"alpha": alpha, "residual": residual})


def egg_decompose(w, r: float, R: float, tol: float = 1e-12) -> ClassicalDecomposition:
    """Decompose a point of the egg into two perfectly distinguishable boundary points.

    Scans ``g_w`` on 720 intervals of ``[-pi/2, pi/2]`` (from ``+pi/2`` down),
    takes the first exact zero or sign change, and bisects to ``tol``.
    """
    pt = np.asarray(w.coords if isinstance(w, StateVector) else w, dtype=float)
    if isinstance(w, StateVector) and abs(w.scale - 1.0) > 1e-9:
        raise DomainError("egg decomposition needs a normalised state")
    if not egg_contains_point(pt[0], pt[1], r, R):
        raise DomainError(f"point ({pt[0]:g}, {pt[1]:g}) lies outside the egg")
    grid = np.linspace(HALF_PI, -HALF_PI, SCAN_SAMPLES + 1)
    g = egg_g(pt, grid, r, R)
    zero_tol = tol * (r + R) ** 2
    zeros = np.flatnonzero(np.abs(g) <= zero_tol)
    changes = np.flatnonzero(g[:-1] * g[1:] < 0)
    first_zero = int(zeros[0]) if zeros.size else grid.size
    first_change = int(changes[0]) if changes.size else grid.size
    if first_zero <= first_change and zeros.size:
        alpha = float(grid[first_zero])
    elif changes.size:
        i = first_change
        wx, wy = float(pt[0]), float(pt[1])
        alpha = bisection_root(lambda x: _g_scalar(wx, wy, x, r, R), float(grid[i + 1]), float(grid[i]), tol)
    else:
        raise DomainError("no sign change of g_w found")
    return _decomposition_at(pt, alpha, r, R)


def shannon_nats(p) -> float:
    p = np.asarray(p, dtype=float)
    p = p[p > 0]
    return float(-np.sum(p * np.log(p)))


def egg_nonuniqueness_witness(r: float, R: float):
    """Two classical decompositions of the origin with different weight multisets.

    Returns ``(dec_1, dec_2, S_1, S_2)``: the vertical chord (``alpha = pi/2``)
    with weights ``(1/2, 1/2)`` and the horizontal chord (``alpha = 0``) with
    weights ``(r/(r+R), R/(r+R))`` on ``((-R, 0), (r, 0))``.
    """
    origin = np.zeros(2)
    d1 = _decomposition_at(origin, HALF_PI, r, R)
    d0 = _decomposition_at(origin, 0.0, r, R)
    f = d0.frame
    d2 = ClassicalDecomposition(
        d0.weights[::-1].copy(),
        Frame(f.model, f.states[::-1], f.effects[::-1]),
        d0.meta,
    )
    return d1, d2, shannon_nats(d1.weights), shannon_nats(d2.weights)


def egg_grid_points(n: int, r: float, R: float) -> np.ndarray:
    """``n x n`` interior points: cell-centred abscissae, cell-centred fractions of the local height."""
    pts = []
    for i in range(n):
        x = -R + (i + 0.5) * (r + R) / n
        h = egg_half_height(x, r, R)
        for j in range(n):
            pts.append((x, (-1.0 + (2 * j + 1) / n) * h))
    return np.array(pts)


def egg_grid_sweep(n: int, r: float, R: float) -> list[dict]:
    """Rows ``x, y, alpha, p, residual`` for the interior grid."""
    rows = []
    for x, y in egg_grid_points(n, r, R):
        dec = egg_decompose(np.array([x, y]), r, R)
        rows.append(
            {
                "x": float(x),
                "y": float(y),
                "alpha": float(dec.meta["alpha"]),
                "p": float(dec.weights[0]),
                "residual": float(dec.meta["residual"]),
            }
        )
    return rows
