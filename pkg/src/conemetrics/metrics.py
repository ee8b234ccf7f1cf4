"""Thompson and Hilbert distances, infinitesimal norms, and path lengths.

Both distances are built from the order bounds of :mod:`conemetrics.cones`:

    d_T(x, y) = log max(M(x/y), M(y/x))        (a metric on each part)
    d_H(x, y) = log (M(x/y) * M(y/x))          (zero exactly on rays)

Their infinitesimal counterparts at a base point ``x`` measure a tangent
vector ``v`` through the signed order bounds M(v/x) and m(v/x); integrating
them along paths recovers the distances, which is what
:func:`path_length` verifies numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .cones import Cone, ConePoint, same_cone_pair
from .errors import BoundarySearchError, ConeGeometryError

__all__ = [
    "Metric",
    "PathSample",
    "TangentVector",
    "distance",
    "distance_batch",
    "finsler_hilbert_seminorm",
    "finsler_norm",
    "finsler_thompson_norm",
    "hilbert_cross_ratio",
    "hilbert_distance",
    "hilbert_distance_batch",
    "path_length",
    "thompson_distance",
    "thompson_distance_batch",
]


class Metric(str, Enum):
    THOMPSON = "thompson"
    HILBERT = "hilbert"


# ---------------------------------------------------------------------------
# distances


def thompson_distance(x: ConePoint, y: ConePoint) -> float:
    """log max(M(x/y), M(y/x)); +inf between different parts."""
    cone = same_cone_pair(x, y)
    a = cone.sup_bound(x.coords, y.coords)
    b = cone.sup_bound(y.coords, x.coords)
    if not (math.isfinite(a) and math.isfinite(b)):
        return math.inf
    return math.log(max(a, b))


def hilbert_distance(x: ConePoint, y: ConePoint) -> float:
    """log(M(x/y) * M(y/x)); scale-invariant, zero exactly on common rays."""
    cone = same_cone_pair(x, y)
    a = cone.sup_bound(x.coords, y.coords)
    b = cone.sup_bound(y.coords, x.coords)
    if not (math.isfinite(a) and math.isfinite(b)):
        return math.inf
    return math.log(a) + math.log(b)


def distance(x: ConePoint, y: ConePoint, metric: Metric | str) -> float:
    if Metric(metric) is Metric.THOMPSON:
        return thompson_distance(x, y)
    return hilbert_distance(x, y)


def thompson_distance_batch(cone: Cone, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    a = cone.sup_bound_batch(X, Y)
    b = cone.sup_bound_batch(Y, X)
    return np.log(np.maximum(a, b))


def hilbert_distance_batch(cone: Cone, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    a = cone.sup_bound_batch(X, Y)
    b = cone.sup_bound_batch(Y, X)
    return np.log(a) + np.log(b)


def distance_batch(cone: Cone, X: np.ndarray, Y: np.ndarray, metric: Metric | str) -> np.ndarray:
    if Metric(metric) is Metric.THOMPSON:
        return thompson_distance_batch(cone, X, Y)
    return hilbert_distance_batch(cone, X, Y)


# ---------------------------------------------------------------------------
# cross-ratio form of the Hilbert distance


def _chord_boundary(cone: Cone, base: np.ndarray, chord: np.ndarray, forward: bool) -> float:
    """Boundary parameter of p(t) = base + t*chord, bracketing from inside.

    With ``forward`` the search runs past t=1, otherwise below t=0.  The
    returned parameter is accurate to the floating-point bottom of the
    bisection bracket.
    """

    def inside(t: float) -> bool:
        return cone.contains_interior(base + t * chord)

    if forward:
        lo, probe = 1.0, 2.0
    else:
        lo, probe = 0.0, -1.0
    while inside(probe):
        lo = probe
        probe *= 2.0
        if abs(probe) > 1e15:
            raise BoundarySearchError(
                "chord never leaves the cone; the cross-section is unbounded here"
            )
    hi = probe
    for _ in range(500):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if inside(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def hilbert_cross_ratio(x: ConePoint, y: ConePoint, functional) -> float:
    """Hilbert distance computed as a log cross ratio on the section {l = 1}.

    The two boundary points of the section collinear with x and y are found
    by bisection on interior membership, making this an independent route
    to the same number as :func:`hilbert_distance`.
    """
    cone = same_cone_pair(x, y)
    l = cone.validate(functional, "functional")
    lx = float(l @ x.coords)
    ly = float(l @ y.coords)
    if lx <= 0.0 or ly <= 0.0:
        raise ValueError("functional must be positive on the given points")
    xh = x.coords / lx
    yh = y.coords / ly
    chord = yh - xh
    scale = max(float(np.max(np.abs(xh))), float(np.max(np.abs(yh))))
    if float(np.max(np.abs(chord))) <= 1e-13 * scale:
        return 0.0  # projectively equal: degenerate chord
    t_b = _chord_boundary(cone, xh, chord, forward=True)
    t_a = _chord_boundary(cone, xh, chord, forward=False)
    # Section points sit at parameters t_a < 0 <= x, 1 <= y < t_b.
    cross = (t_b * (1.0 - t_a)) / ((t_b - 1.0) * (-t_a))
    return math.log(cross)


# ---------------------------------------------------------------------------
# infinitesimal norms


@dataclass(frozen=True, eq=False)
class TangentVector:
    """An ambient direction attached to an interior base point."""

    base: ConePoint
    direction: np.ndarray

    def __post_init__(self):
        arr = self.base.cone.validate(self.direction, "tangent direction")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "direction", arr)


def finsler_thompson_norm(v: TangentVector) -> float:
    """max(M(v/x), M(-v/x)): the gauge of the order interval [-x, x]."""
    sup, inf = v.base.cone.sup_inf_bounds(v.direction, v.base.coords)
    return max(sup, -inf)


def finsler_hilbert_seminorm(v: TangentVector) -> float:
    """M(v/x) - m(v/x); vanishes exactly on multiples of the base point."""
    sup, inf = v.base.cone.sup_inf_bounds(v.direction, v.base.coords)
    return max(sup - inf, 0.0)


def finsler_norm(v: TangentVector, metric: Metric | str) -> float:
    if Metric(metric) is Metric.THOMPSON:
        return finsler_thompson_norm(v)
    return finsler_hilbert_seminorm(v)


# ---------------------------------------------------------------------------
# numeric path length


@dataclass(frozen=True, eq=False)
class PathSample:
    """A sampled path on [0, 1] with chord-difference derivative estimates.

    ``times`` must increase strictly from 0 to 1 and every sample must be
    interior.  ``segment_derivatives`` holds the chord difference of each
    segment, which is the midpoint-rule derivative estimate used by
    :func:`path_length`.
    """

    cone: Cone
    times: np.ndarray
    points: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        p = np.asarray(self.points, dtype=float)
        if t.ndim != 1 or t.shape[0] < 2:
            raise ValueError("a path needs at least two samples")
        if p.shape != (t.shape[0], self.cone.dim):
            raise ConeGeometryError(
                f"points have shape {p.shape}, expected {(t.shape[0], self.cone.dim)}"
            )
        if abs(t[0]) > 1e-12 or abs(t[-1] - 1.0) > 1e-12:
            raise ValueError("path parameter must run from 0 to 1")
        if np.any(np.diff(t) <= 0.0):
            raise ValueError("path times must increase strictly")
        if not np.all(self.cone.contains_interior_batch(p)):
            raise ConeGeometryError("every path sample must be interior to the cone")
        t = t.copy()
        p = p.copy()
        t.setflags(write=False)
        p.setflags(write=False)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "points", p)

    @property
    def segment_derivatives(self) -> np.ndarray:
        return np.diff(self.points, axis=0) / np.diff(self.times)[:, None]


_MAX_SEGMENT_THOMPSON = 0.1


def path_length(path: PathSample, metric: Metric | str) -> float:
    """Composite midpoint-rule length of a sampled path.

    Each segment contributes |chord slope| measured at the segment's
    chordal midpoint, times the segment width.  Grids whose consecutive
    samples are farther than Thompson distance 0.1 are refused since the
    derivative estimates are then meaningless.
    """
    metric = Metric(metric)
    cone = path.cone
    p0, p1 = path.points[:-1], path.points[1:]
    seg_dt = thompson_distance_batch(cone, p0, p1)
    if np.any(seg_dt > _MAX_SEGMENT_THOMPSON):
        raise ConeGeometryError(
            "path grid too coarse: consecutive samples exceed Thompson distance "
            f"{_MAX_SEGMENT_THOMPSON}"
        )
    mids = 0.5 * (p0 + p1)
    sup, inf = cone.sup_inf_bounds_batch(path.segment_derivatives, mids)
    if metric is Metric.THOMPSON:
        speeds = np.maximum(sup, -inf)
    else:
        speeds = sup - inf
    return float(np.sum(speeds * np.diff(path.times)))
