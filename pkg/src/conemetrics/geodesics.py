"""Projective straight-line geodesics shared by both cone metrics.

Between interior points x and y of one part, with beta = M(y/x) and
alpha = 1/M(x/y), the curve

    phi(s) = ((beta^s - alpha^s)/(beta - alpha)) y
           + ((beta*alpha^s - alpha*beta^s)/(beta - alpha)) x

(and alpha^s x when beta = alpha) is a minimal geodesic for the Thompson
and the Hilbert metric simultaneously.  The coefficients are evaluated in
a fused expm1 form so the removable singularity at beta = alpha causes no
cancellation.
"""

from __future__ import annotations

import math

from dataclasses import dataclass

import numpy as np

from .cones import ConePoint, SymPDCone, same_cone_pair, sym_to_vec
from .errors import DifferentPartsError
from .metrics import Metric, PathSample, distance

__all__ = [
    "DEGENERACY_RTOL",
    "Geodesic",
    "bicombing",
    "geodesic_combine",
    "geodesic_combine_batch",
    "make_geodesic",
    "midpoint",
    "sample_geodesic",
    "spd_geodesic",
    "spd_geodesic_batch",
]

DEGENERACY_RTOL = 1e-12


def geodesic_combine(x: np.ndarray, y: np.ndarray, alpha: float, beta: float, s: float) -> np.ndarray:
    """Coordinates of the geodesic point at parameter ``s``."""
    if beta - alpha <= DEGENERACY_RTOL * beta:
        return alpha**s * x
    u = math.log(alpha / beta)
    w = math.expm1(s * u) / math.expm1(u)
    return (beta ** (s - 1.0) * w) * y + (beta**s * (1.0 - w)) * x


def geodesic_combine_batch(X: np.ndarray, Y: np.ndarray, alpha, beta, s) -> np.ndarray:
    """Vectorized :func:`geodesic_combine` over rows; ``s`` may vary per row."""
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    s = np.broadcast_to(np.asarray(s, dtype=float), alpha.shape)
    degenerate = (beta - alpha) <= DEGENERACY_RTOL * beta
    ratio = np.where(degenerate, 0.5, alpha / beta)
    u = np.log(ratio)
    with np.errstate(divide="ignore", invalid="ignore"):
        w = np.expm1(s * u) / np.expm1(u)
    cy = beta ** (s - 1.0) * w
    cx = beta**s * (1.0 - w)
    out = cy[:, None] * Y + cx[:, None] * X
    if np.any(degenerate):
        deg_scale = alpha[degenerate] ** s[degenerate]
        out[degenerate] = deg_scale[:, None] * X[degenerate]
    return out


@dataclass(frozen=True, eq=False)
class Geodesic:
    """Precomputed geodesic data: endpoints plus the order bounds alpha, beta."""

    x: ConePoint
    y: ConePoint
    alpha: float
    beta: float
    degenerate: bool

    def evaluate(self, s: float) -> ConePoint:
        if not 0.0 <= s <= 1.0:
            raise ValueError("geodesic parameter must lie in [0, 1]")
        coords = geodesic_combine(self.x.coords, self.y.coords, self.alpha, self.beta, s)
        return ConePoint(self.x.cone, coords)

    __call__ = evaluate


def make_geodesic(x: ConePoint, y: ConePoint) -> Geodesic:
    cone = same_cone_pair(x, y)
    beta = cone.sup_bound(y.coords, x.coords)
    m = cone.sup_bound(x.coords, y.coords)
    if not (math.isfinite(beta) and math.isfinite(m)):
        raise DifferentPartsError("no geodesic joins points in different parts")
    alpha = 1.0 / m
    return Geodesic(x, y, alpha, beta, degenerate=(beta - alpha) <= DEGENERACY_RTOL * beta)


def midpoint(x: ConePoint, y: ConePoint) -> ConePoint:
    return make_geodesic(x, y).evaluate(0.5)


def bicombing(x: ConePoint, y: ConePoint, t: float, metric: Metric | str) -> ConePoint:
    """Unit-speed point along the geodesic from x toward y, parked at y.

    Travels at unit speed in the chosen metric for t in [0, d(x, y)] and
    returns y for any later time.  Projectively equal endpoints (Hilbert
    distance zero) return y by convention.
    """
    if t < 0.0:
        raise ValueError("bicombing time must be nonnegative")
    d = distance(x, y, metric)
    if t >= d:
        return y
    if t == 0.0:
        return x
    return make_geodesic(x, y).evaluate(t / d)


def sample_geodesic(g: Geodesic, n: int) -> PathSample:
    """Uniformly sampled geodesic as a path on [0, 1] with n points."""
    if n < 2:
        raise ValueError("need at least two samples")
    times = np.linspace(0.0, 1.0, n)
    alphas = np.full(n, g.alpha)
    betas = np.full(n, g.beta)
    X = np.broadcast_to(g.x.coords, (n, g.x.cone.dim))
    Y = np.broadcast_to(g.y.coords, (n, g.y.cone.dim))
    points = geodesic_combine_batch(X, Y, alphas, betas, times)
    return PathSample(g.x.cone, times, points)


# ---------------------------------------------------------------------------
# the spectral geodesic of the positive-definite matrix cone


def _spd_sqrt_pair(m: np.ndarray):
    w, U = np.linalg.eigh(m)
    sqrt_w = np.sqrt(w)
    root = (U * sqrt_w) @ U.T
    inv_root = (U / sqrt_w) @ U.T
    return root, inv_root


def spd_geodesic(X: ConePoint, Y: ConePoint, s: float) -> ConePoint:
    """Matrix power interpolation X^(1/2) (X^(-1/2) Y X^(-1/2))^s X^(1/2)."""
    cone = same_cone_pair(X, Y)
    if not isinstance(cone, SymPDCone):
        raise TypeError("the spectral geodesic is defined on the sympd cone only")
    if not 0.0 <= s <= 1.0:
        raise ValueError("geodesic parameter must lie in [0, 1]")
    xm = X.matrix()
    ym = Y.matrix()
    root, inv_root = _spd_sqrt_pair(xm)
    inner = inv_root @ ym @ inv_root
    inner = 0.5 * (inner + inner.T)
    w, V = np.linalg.eigh(inner)
    powered = (V * w**s) @ V.T
    out = root @ powered @ root
    out = 0.5 * (out + out.T)
    return ConePoint(cone, sym_to_vec(out))


def spd_geodesic_batch(cone: SymPDCone, Xm: np.ndarray, Ym: np.ndarray, s: float) -> np.ndarray:
    """Batched matrix form of :func:`spd_geodesic` on stacked (T, n, n) inputs."""
    w, U = np.linalg.eigh(Xm)
    sqrt_w = np.sqrt(w)
    root = (U * sqrt_w[..., None, :]) @ np.swapaxes(U, -1, -2)
    inv_root = (U / sqrt_w[..., None, :]) @ np.swapaxes(U, -1, -2)
    inner = inv_root @ Ym @ inv_root
    inner = 0.5 * (inner + np.swapaxes(inner, -1, -2))
    e, V = np.linalg.eigh(inner)
    powered = (V * e[..., None, :] ** s) @ np.swapaxes(V, -1, -2)
    out = root @ powered @ root
    return 0.5 * (out + np.swapaxes(out, -1, -2))
