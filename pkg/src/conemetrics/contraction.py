"""Derivative norms of geodesic averaging on the orthant, and sharp bounds.

For a fixed exponent s in (0, 1), the map

    g(x) = phi(s; ones, x)            on the interior of the orthant

is the geodesic average of every point with the all-ones vector.  Away
from ties in the extreme coordinates, g is differentiable, and the matrix
of logarithmic derivatives

    h[i][j] = (x_j / g_i(x)) * dg_i/dx_j (x)

has closed-form entries.  Its operator norm, measured in the Thompson
norm or the Hilbert seminorm at x and g(x), controls how much geodesic
averaging contracts distances.  This module provides the closed forms,
two independent exact maximizations, finite-difference cross-checks, the
radius-dependent supremum bounds, and checkers for the corresponding
inequalities between cone points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

import numpy as np

from .cones import ConePoint
from .errors import NonSmoothPointError
from .geodesics import make_geodesic, midpoint
from .metrics import Metric, distance, hilbert_distance

__all__ = [
    "DerivativeTable",
    "InequalityReport",
    "ScalarFunctions",
    "bound_hilbert",
    "bound_thompson",
    "check_busemann",
    "check_contraction",
    "check_semihyperbolic",
    "contraction_bound",
    "derivative_table",
    "fd_derivative_table",
    "hilbert_opnorm_analytic",
    "hilbert_opnorm_bruteforce",
    "hilbert_opnorm_numeric",
    "hilbert_opnorm_pair",
    "thompson_opnorm_analytic",
    "thompson_opnorm_numeric",
    "unit_geodesic_map",
]

_TIE_RTOL = 1e-12


def _check_exponent(s: float) -> float:
    s = float(s)
    if not 0.0 < s < 1.0:
        raise ValueError("exponent must lie strictly between 0 and 1")
    return s


def _positive_vector(x) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1 or arr.size < 1:
        raise ValueError("expected a one-dimensional coordinate vector")
    if not np.all(np.isfinite(arr)) or not np.all(arr > 0.0):
        raise ValueError("coordinates must be finite and strictly positive")
    return arr


@dataclass(frozen=True)
class ScalarFunctions:
    """The three scalar profiles behind the derivative formulas.

    gamma(t) = (1 - t^s) / (1 - t)  with gamma(1) = s, strictly decreasing;
    theta(t) = (1 - s) - t^s + s t, nonnegative with a double zero at t=1;
    cap_gamma(t) = 2*gamma(t) - s, decreasing on (0, 1) with limit s at 1.
    """

    s: float

    def __post_init__(self):
        _check_exponent(self.s)

    def gamma(self, t: float) -> float:
        if t < 0.0:
            raise ValueError("gamma is defined for t >= 0")
        if t == 0.0:
            return 1.0
        if t == 1.0:
            return self.s
        u = math.log(t)
        return math.expm1(self.s * u) / math.expm1(u)

    def theta(self, t: float) -> float:
        return (1.0 - self.s) - t**self.s + self.s * t

    def cap_gamma(self, t: float) -> float:
        return 2.0 * self.gamma(t) - self.s


def unit_geodesic_map(x, s: float) -> np.ndarray:
    """Geodesic average phi(s; ones, x) of orthant coordinates ``x``."""
    s = _check_exponent(s)
    arr = _positive_vector(x)
    b = float(arr.max())
    a = float(arr.min())
    if b - a <= _TIE_RTOL * b:
        return a**s * np.ones_like(arr)
    u = math.log(a / b)
    w = math.expm1(s * u) / math.expm1(u)
    return (b ** (s - 1.0) * w) * arr + (b**s * (1.0 - w)) * np.ones_like(arr)


# ---------------------------------------------------------------------------
# the logarithmic derivative table


@dataclass(frozen=True, eq=False)
class DerivativeTable:
    """Logarithmic derivatives h[i][j] of the geodesic average at ``x``.

    ``order`` sorts the coordinates ascending; ``min_index`` and
    ``max_index`` are the positions of the strict extremes in the original
    frame.  ``h`` is expressed in the original frame; ``sorted_h`` gives
    the ascending frame the closed forms are stated in.
    """

    x: np.ndarray
    s: float
    order: np.ndarray
    min_index: int
    max_index: int
    h: np.ndarray

    @property
    def sorted_h(self) -> np.ndarray:
        return self.h[np.ix_(self.order, self.order)]


def _sorted_frame(x: np.ndarray):
    order = np.argsort(x, kind="stable")
    p = x[order]
    n = p.size
    if n >= 2:
        if p[1] - p[0] <= _TIE_RTOL * p[1]:
            raise NonSmoothPointError("tied minimum coordinate: derivative undefined here")
        if p[-1] - p[-2] <= _TIE_RTOL * p[-1]:
            raise NonSmoothPointError("tied maximum coordinate: derivative undefined here")
    return order, p


def derivative_table(x, s: float) -> DerivativeTable:
    s = _check_exponent(s)
    arr = _positive_vector(x)
    n = arr.size
    if n == 1:
        return DerivativeTable(arr, s, np.array([0]), 0, 0, np.array([[s]]))
    order, p = _sorted_frame(arr)
    lo, hi = p[0], p[-1]
    lo_s, hi_s = lo**s, hi**s
    sf = ScalarFunctions(s)
    hs = np.zeros((n, n))
    hs[0, 0] = s
    hs[-1, -1] = s
    for i in range(1, n - 1):
        e_i = p[i] * (hi_s - lo_s) + hi * lo_s - lo * hi_s
        hs[i, 0] = (hi - p[i]) / (hi - lo) * sf.theta(hi / lo) * lo ** (s + 1.0) / e_i
        hs[i, i] = (hi_s - lo_s) * p[i] / e_i
        hs[i, -1] = -(p[i] - lo) / (hi - lo) * sf.theta(lo / hi) * hi ** (s + 1.0) / e_i
    h = np.zeros((n, n))
    h[np.ix_(order, order)] = hs
    return DerivativeTable(arr, s, order, int(order[0]), int(order[-1]), h)


def fd_derivative_table(x, s: float, step: float = 1e-6) -> np.ndarray:
    """Centered finite differences of the geodesic average, as an h table.

    Steps are relative to each coordinate.  Only valid when ``x`` keeps a
    strict margin from tied extremes, so the perturbed points stay in the
    same smooth region.
    """
    s = _check_exponent(s)
    arr = _positive_vector(x)
    n = arr.size
    g0 = unit_geodesic_map(arr, s)
    table = np.zeros((n, n))
    for j in range(n):
        d = step * arr[j]
        plus = arr.copy()
        plus[j] += d
        minus = arr.copy()
        minus[j] -= d
        table[:, j] = arr[j] * (unit_geodesic_map(plus, s) - unit_geodesic_map(minus, s)) / (
            2.0 * d * g0
        )
    return table


# ---------------------------------------------------------------------------
# operator norms: closed forms and independent exact maximizations


def thompson_opnorm_analytic(x, s: float) -> float:
    """Closed-form Thompson operator norm of the derivative at ``x``."""
    s = _check_exponent(s)
    arr = _positive_vector(x)
    n = arr.size
    if n == 1:
        return s
    _, p = _sorted_frame(arr)
    if n == 2:
        return s
    lo, hi, second = p[0], p[-1], p[-2]
    lo_s, hi_s = lo**s, hi**s
    sf = ScalarFunctions(s)
    e = second * (hi_s - lo_s) + hi * lo_s - lo * hi_s
    return (
        (hi - second) / (hi - lo) * sf.theta(hi / lo) * lo ** (s + 1.0)
        + (hi_s - lo_s) * second
        + (second - lo) / (hi - lo) * sf.theta(lo / hi) * hi ** (s + 1.0)
    ) / e


def hilbert_opnorm_analytic(x, s: float) -> float:
    """Closed-form Hilbert operator norm of the derivative at ``x``."""
    s = _check_exponent(s)
    arr = _positive_vector(x)
    n = arr.size
    if n < 2:
        raise ValueError("the Hilbert seminorm needs ambient dimension at least 2")
    _, p = _sorted_frame(arr)
    if n == 2:
        return s
    lo, hi, second = p[0], p[-1], p[-2]
    lo_s, hi_s = lo**s, hi**s
    sf = ScalarFunctions(s)
    e = second * (hi_s - lo_s) + hi * lo_s - lo * hi_s
    return (
        (hi - second) / (hi - lo) * sf.theta(hi / lo) * lo ** (s + 1.0)
        + (hi_s - lo_s) * second
    ) / e


def thompson_opnorm_numeric(x, s: float) -> float:
    """Exact maximization over the unit ball: max over rows of sum |h[i][j]|.

    The Thompson unit ball at ``x`` has extreme points with components
    +-x_j, so the supremum of each output row is the absolute row sum of
    the h table.  Independent of the closed form above.
    """
    table = derivative_table(x, s)
    return float(np.abs(table.h).sum(axis=1).max())


def _pair_gains(h: np.ndarray) -> np.ndarray:
    diff = h[:, None, :] - h[None, :, :]
    return np.clip(diff, 0.0, None).sum(axis=-1)


def hilbert_opnorm_numeric(x, s: float) -> float:
    """Exact maximization over the Hilbert unit slab.

    Row sums of h are constant, so the objective for an ordered row pair
    (i, k) is shift-invariant and its optimum over {max v - min v <= 1} is
    the positive part sum of h[i] - h[k]; maximize over pairs.
    """
    table = derivative_table(x, s)
    return float(_pair_gains(table.h).max())


def hilbert_opnorm_pair(x, s: float) -> tuple[float, tuple[int, int]]:
    """Value plus the maximizing ordered row pair, as ascending-frame positions."""
    table = derivative_table(x, s)
    gains = _pair_gains(table.h)
    flat = int(np.argmax(gains))
    i, k = divmod(flat, gains.shape[0])
    inv = np.empty_like(table.order)
    inv[table.order] = np.arange(table.order.size)
    pos = (int(inv[i]), int(inv[k]))
    return float(gains[i, k]), (min(pos), max(pos))


def hilbert_opnorm_bruteforce(x, s: float, functional=None) -> float:
    """Enumerate all two-level slab vertices; optionally shift onto {l(v) = 0}.

    With a positive functional the candidate vectors are shifted along the
    all-ones direction onto the section tangent plane before evaluating,
    which leaves both the constraint slab and the objective unchanged.
    Exponential in the dimension; guarded to small sizes.
    """
    table = derivative_table(x, s)
    n = table.h.shape[0]
    if n > 14:
        raise ValueError("brute-force enumeration is limited to dimension 14")
    weights = None
    if functional is not None:
        weights = np.asarray(functional, dtype=float) * table.x
        if np.any(weights <= 0.0):
            raise ValueError("functional must be positive on the orthant interior")
    best = 0.0
    for bits in product((0.0, 1.0), repeat=n):
        w = np.array(bits)
        if weights is not None:
            w = w - (weights @ w) / weights.sum()
        rows = table.h @ w
        best = max(best, float(rows.max() - rows.min()))
    return best


# ---------------------------------------------------------------------------
# radius-dependent supremum bounds


def bound_thompson(R: float, s: float) -> float:
    """2*(1 - e^(-R s))/(1 - e^(-R)) - s: supremum of the Thompson norm on a radius-R ball."""
    s = _check_exponent(s)
    if not R > 0.0:
        raise ValueError("radius must be positive")
    return 2.0 * math.expm1(-R * s) / math.expm1(-R) - s


def bound_hilbert(R: float, s: float) -> float:
    """(1 - e^(-R s))/(1 - e^(-R)): supremum of the Hilbert norm on a radius-R ball."""
    s = _check_exponent(s)
    if not R > 0.0:
        raise ValueError("radius must be positive")
    return math.expm1(-R * s) / math.expm1(-R)


def contraction_bound(R: float, s: float, metric: Metric | str) -> float:
    if Metric(metric) is Metric.THOMPSON:
        return bound_thompson(R, s)
    return bound_hilbert(R, s)


def bound_batch(R: np.ndarray, s: float, metric: Metric | str) -> np.ndarray:
    R = np.asarray(R, dtype=float)
    ratio = np.where(R > 0.0, np.expm1(-R * s) / np.expm1(np.where(R > 0.0, -R, -1.0)), s)
    if Metric(metric) is Metric.THOMPSON:
        return 2.0 * ratio - s
    return ratio


# ---------------------------------------------------------------------------
# inequality checkers


@dataclass(frozen=True, eq=False)
class InequalityReport:
    """Outcome of a single inequality check between cone points."""

    kind: str
    metric: str
    lhs: float
    rhs: float
    satisfied: bool
    s: float | None = None
    R: float | None = None
    witness_points: dict | None = None
    details: dict | None = None

    def to_dict(self) -> dict:
        data = {
            "kind": self.kind,
            "metric": self.metric,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "R": self.R,
            "s": self.s,
            "satisfied": self.satisfied,
            "witness_points": self.witness_points,
        }
        if self.details:
            data.update(self.details)
        return data


def _witness(**named) -> dict:
    return {name: point.coords.tolist() for name, point in named.items()}


def _span_dimension(*points: ConePoint) -> int:
    stack = np.stack([p.coords for p in points])
    svals = np.linalg.svd(stack, compute_uv=False)
    return int(np.sum(svals > 1e-10 * svals[0]))


def check_busemann(u: ConePoint, x: ConePoint, y: ConePoint, metric: Metric | str,
                   tol: float = 1e-9) -> InequalityReport:
    """Record whether d(m_ux, m_uy) <= d(x, y)/2 for geodesic midpoints.

    This is a recorder, not an assertion: with the projective straight-line
    midpoints the inequality can fail in dimension three and up, and the
    report simply states what happened.
    """
    metric = Metric(metric)
    lhs = distance(midpoint(u, x), midpoint(u, y), metric)
    rhs = 0.5 * distance(x, y, metric)
    return InequalityReport(
        kind="busemann",
        metric=metric.value,
        lhs=lhs,
        rhs=rhs,
        satisfied=bool(lhs <= rhs + tol),
        witness_points=_witness(u=u, x=x, y=y),
    )


def check_contraction(u: ConePoint, x: ConePoint, y: ConePoint, s: float,
                      metric: Metric | str, tol: float = 1e-9) -> InequalityReport:
    """Check d(phi(s;u,x), phi(s;u,y)) against the radius-dependent bound.

    The radius actually used is max(d_H(u,x), d_H(u,y)), which makes the
    check strictly harder than quoting any nominal sampling radius.  When
    the three points span at most two dimensions the sharper factor ``s``
    applies and is reported alongside.
    """
    s = _check_exponent(s)
    metric = Metric(metric)
    r_used = max(hilbert_distance(u, x), hilbert_distance(u, y))
    lhs = distance(make_geodesic(u, x).evaluate(s), make_geodesic(u, y).evaluate(s), metric)
    d_xy = distance(x, y, metric)
    factor = contraction_bound(r_used, s, metric) if r_used > 0.0 else s
    rhs = factor * d_xy
    span_dim = _span_dimension(u, x, y)
    flat_rhs = s * d_xy
    details = {
        "span_dim": span_dim,
        "factor": factor,
        "flat_rhs": flat_rhs,
        "flat_satisfied": bool(lhs <= flat_rhs + tol) if span_dim <= 2 else None,
    }
    return InequalityReport(
        kind="contraction",
        metric=metric.value,
        lhs=lhs,
        rhs=rhs,
        satisfied=bool(lhs <= rhs + tol),
        s=s,
        R=r_used,
        witness_points=_witness(u=u, x=x, y=y),
        details=details,
    )


def check_semihyperbolic(x: ConePoint, y: ConePoint, x2: ConePoint, y2: ConePoint,
                         t: float, metric: Metric | str, tol: float = 1e-9) -> InequalityReport:
    """Fellow-traveller check: perturbed unit-speed tracks stay within 8.

    Requires d(x, x2) <= 1 and d(y, y2) <= 1 in the chosen metric.
    """
    metric = Metric(metric)
    from .geodesics import bicombing  # local import keeps module load order simple

    d_xx = distance(x, x2, metric)
    d_yy = distance(y, y2, metric)
    if d_xx > 1.0 + tol or d_yy > 1.0 + tol:
        raise ValueError("endpoint perturbations must stay within distance 1")
    z = bicombing(x, y, t, metric)
    z2 = bicombing(x2, y2, t, metric)
    lhs = distance(z, z2, metric)
    return InequalityReport(
        kind="semihyperbolic",
        metric=metric.value,
        lhs=lhs,
        rhs=8.0,
        satisfied=bool(lhs <= 8.0 + tol),
        R=None,
        s=None,
        witness_points=_witness(x=x, y=y, x2=x2, y2=y2),
        details={"t": t},
    )
